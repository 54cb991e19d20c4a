#pragma once

// Shared plan-building helpers for the test suites.

#include <optional>
#include <string>
#include <vector>

#include "dataflow/types.hpp"

namespace pdsp::testing {

inline StreamSpec int_double_stream(double rate = 1000.0, ArrivalKind arrival = ArrivalKind::Uniform) {
    StreamSpec s;
    s.schema.fields = {DataType::Integer, DataType::Double};
    s.event_rate = rate;
    s.arrival = arrival;
    return s;
}

inline OperatorSpec make_source(const std::string& id) {
    OperatorSpec op;
    op.id = id;
    op.kind = OpKind::Source;
    return op;
}

inline OperatorSpec make_filter(const std::string& id, std::size_t field, FilterFn fn, Value literal,
                                double sel = 0.5) {
    OperatorSpec op;
    op.id = id;
    op.kind = OpKind::Filter;
    op.inbound.kind = PartitioningKind::Forward;
    op.filter = FilterSpec{field, fn, std::move(literal), sel};
    return op;
}

inline OperatorSpec make_map(const std::string& id) {
    OperatorSpec op;
    op.id = id;
    op.kind = OpKind::Map;
    op.inbound.kind = PartitioningKind::Forward;
    return op;
}

inline OperatorSpec make_agg(const std::string& id, AggFn fn, WindowSpec window,
                             std::optional<std::size_t> key_field, std::optional<std::size_t> value_field) {
    OperatorSpec op;
    op.id = id;
    op.kind = OpKind::WindowAggregate;
    if (key_field) {
        op.inbound.kind = PartitioningKind::Hashing;
        op.inbound.key_field = key_field;
    } else {
        op.inbound.kind = PartitioningKind::Rebalance;
    }
    op.agg = AggSpec{fn, window, key_field, value_field};
    return op;
}

inline OperatorSpec make_join(const std::string& id, WindowSpec window, std::size_t left_key,
                              std::size_t right_key, const std::string& left_op) {
    OperatorSpec op;
    op.id = id;
    op.kind = OpKind::WindowJoin;
    op.inbound.kind = PartitioningKind::Hashing;
    op.inbound.key_field = left_key;
    op.join = JoinSpec{window, left_key, right_key, left_op};
    return op;
}

inline OperatorSpec make_sink(const std::string& id) {
    OperatorSpec op;
    op.id = id;
    op.kind = OpKind::Sink;
    op.inbound.kind = PartitioningKind::Rebalance;
    return op;
}

inline WindowSpec tumbling_count(std::int64_t length) {
    return WindowSpec{WindowKind::Tumbling, WindowPolicy::Count, length, std::nullopt};
}

inline WindowSpec tumbling_time(std::int64_t length_ms) {
    return WindowSpec{WindowKind::Tumbling, WindowPolicy::Time, length_ms, std::nullopt};
}

inline WindowSpec sliding_count(std::int64_t length, std::int64_t slide) {
    return WindowSpec{WindowKind::Sliding, WindowPolicy::Count, length, slide};
}

inline WindowSpec sliding_time(std::int64_t length_ms, std::int64_t slide_ms) {
    return WindowSpec{WindowKind::Sliding, WindowPolicy::Time, length_ms, slide_ms};
}

// source -> filter(f0 < 500000) -> keyed agg(sum f1) -> sink, all parallelism 1.
inline QueryPlan linear_plan(double rate = 1000.0) {
    QueryPlan plan;
    plan.id = "test-linear";
    plan.structure_tag = "linear";
    plan.operators.push_back(make_source("src0"));
    plan.operators.push_back(make_filter("filter1", 0, FilterFn::Lt, Value{std::int64_t{500000}}, 0.5));
    plan.operators.push_back(make_agg("agg2", AggFn::Sum, tumbling_time(100), 0, 1));
    plan.operators.push_back(make_sink("sink3"));
    plan.edges = {{"src0", "filter1"}, {"filter1", "agg2"}, {"agg2", "sink3"}};
    plan.streams["src0"] = int_double_stream(rate);
    return plan;
}

// Two sources with integer keys joined on field 0.
inline QueryPlan two_way_join_plan(double rate = 1000.0, std::int64_t window_ms = 100) {
    QueryPlan plan;
    plan.id = "test-2way";
    plan.structure_tag = "2-way-join";
    plan.operators.push_back(make_source("src0"));
    plan.operators.push_back(make_source("src1"));
    auto f0 = make_filter("filter2", 0, FilterFn::Ge, Value{std::int64_t{0}}, 1.0);
    auto f1 = make_filter("filter3", 0, FilterFn::Ge, Value{std::int64_t{0}}, 1.0);
    plan.operators.push_back(f0);
    plan.operators.push_back(f1);
    plan.operators.push_back(make_join("join4", tumbling_time(window_ms), 0, 0, "filter2"));
    plan.operators.push_back(make_sink("sink5"));
    plan.edges = {{"src0", "filter2"}, {"src1", "filter3"}, {"filter2", "join4"},
                  {"filter3", "join4"}, {"join4", "sink5"}};
    plan.streams["src0"] = int_double_stream(rate);
    plan.streams["src1"] = int_double_stream(rate);
    return plan;
}

} // namespace pdsp::testing
