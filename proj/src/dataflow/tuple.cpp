#include "dataflow/tuple.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

namespace pdsp {

std::size_t tuple_wire_bytes(const Tuple& t) {
    std::size_t bytes = 0;
    for (const auto& v : t.values) {
        if (auto* s = std::get_if<std::string>(&v))
            bytes += s->size();
        else
            bytes += 8;
    }
    return bytes;
}

int compare_values(const Value& a, const Value& b) {
    DataType ta = value_type(a);
    DataType tb = value_type(b);
    if (ta != tb) return ta < tb ? -1 : 1;
    switch (ta) {
        case DataType::Integer: {
            auto x = std::get<std::int64_t>(a), y = std::get<std::int64_t>(b);
            return x < y ? -1 : (x > y ? 1 : 0);
        }
        case DataType::Double: {
            auto x = std::get<double>(a), y = std::get<double>(b);
            return x < y ? -1 : (x > y ? 1 : 0);
        }
        case DataType::String:
            return std::get<std::string>(a).compare(std::get<std::string>(b));
    }
    return 0;
}

std::uint64_t hash_value(const Value& v) {
    if (auto* i = std::get_if<std::int64_t>(&v)) {
        return fnv1a64(i, sizeof(*i));
    }
    if (auto* d = std::get_if<double>(&v)) {
        std::uint64_t bits;
        std::memcpy(&bits, d, sizeof(bits));
        return fnv1a64(&bits, sizeof(bits));
    }
    const auto& s = std::get<std::string>(v);
    return fnv1a64(s.data(), s.size());
}

std::string tuple_canonical(const Tuple& t) {
    std::ostringstream os;
    os.precision(17);
    for (const auto& v : t.values) {
        if (auto* i = std::get_if<std::int64_t>(&v))
            os << 'i' << *i;
        else if (auto* d = std::get_if<double>(&v))
            os << 'd' << *d;
        else
            os << 's' << std::get<std::string>(v).size() << ':' << std::get<std::string>(v);
        os << '|';
    }
    os << '@' << t.event_ts;
    return os.str();
}

namespace {

bool starts_with(const std::string& s, const std::string& prefix) {
    return s.size() >= prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace

double value_as_double(const Value& v) {
    if (auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    if (auto* d = std::get_if<double>(&v)) return *d;
    throw_invalid("string value has no numeric interpretation");
}

bool filter_matches(const FilterSpec& filter, const Tuple& t) {
    if (filter.field_index >= t.values.size())
        throw_invalid("filter field index out of range");
    const Value& field = t.values[filter.field_index];
    DataType ft = value_type(field);
    DataType lt = value_type(filter.literal);

    if (filter_fn_is_string_only(filter.fn)) {
        if (ft != DataType::String || lt != DataType::String)
            throw_invalid("string filter function applied to non-string operand");
        const auto& s = std::get<std::string>(field);
        const auto& lit = std::get<std::string>(filter.literal);
        switch (filter.fn) {
            case FilterFn::StartsWith: return starts_with(s, lit);
            case FilterFn::EndsWith: return ends_with(s, lit);
            case FilterFn::StartsNotWith: return !starts_with(s, lit);
            case FilterFn::EndsNotWith: return !ends_with(s, lit);
            default: break;
        }
    }

    if (ft != lt) throw_invalid("filter literal type does not match field type");
    int cmp = compare_values(field, filter.literal);
    switch (filter.fn) {
        case FilterFn::Le: return cmp <= 0;
        case FilterFn::Ge: return cmp >= 0;
        case FilterFn::Ne: return cmp != 0;
        case FilterFn::Eq: return cmp == 0;
        case FilterFn::Lt: return cmp < 0;
        case FilterFn::Gt: return cmp > 0;
        default: break;
    }
    throw_invalid("unhandled filter function");
}

std::string filter_applicability(const FilterSpec& filter, const TupleSchema& schema) {
    if (filter.field_index >= schema.width())
        return "filter field index " + std::to_string(filter.field_index) + " out of schema range";
    DataType ft = schema.fields[filter.field_index];
    DataType lt = value_type(filter.literal);
    if (filter_fn_is_string_only(filter.fn)) {
        if (ft != DataType::String) return "string filter function on non-string field";
        if (lt != DataType::String) return "string filter function with non-string literal";
        return "";
    }
    if (ft != lt) return "filter literal type does not match field type";
    return "";
}

} // namespace pdsp
