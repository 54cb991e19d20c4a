#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "util/error.hpp"

namespace pdsp {

enum class DataType { Integer, Double, String };

const char* data_type_name(DataType t);
DataType data_type_from_name(const std::string& name);

struct TupleSchema {
    std::vector<DataType> fields;

    std::size_t width() const { return fields.size(); }
    bool operator==(const TupleSchema&) const = default;
};

enum class WindowKind { Sliding, Tumbling };
enum class WindowPolicy { Count, Time };

// Window lengths are tuples for count policy and milliseconds for time policy.
struct WindowSpec {
    WindowKind kind = WindowKind::Tumbling;
    WindowPolicy policy = WindowPolicy::Time;
    std::int64_t length = 1;
    std::optional<std::int64_t> slide; // sliding only; tumbling implies slide == length

    double length_us() const { return static_cast<double>(length) * 1000.0; }
    double slide_us() const { return static_cast<double>(slide.value_or(length)) * 1000.0; }
    std::int64_t slide_or_length() const { return slide.value_or(length); }
    bool operator==(const WindowSpec&) const = default;
};

enum class FilterFn {
    Le,
    Ge,
    Ne,
    Eq,
    Lt,
    Gt,
    StartsWith,
    EndsWith,
    EndsNotWith,
    StartsNotWith,
};

const char* filter_fn_name(FilterFn fn);
FilterFn filter_fn_from_name(const std::string& name);
bool filter_fn_is_string_only(FilterFn fn);

using Value = std::variant<std::int64_t, double, std::string>;

DataType value_type(const Value& v);
std::string value_to_display(const Value& v);

struct FilterSpec {
    std::size_t field_index = 0;
    FilterFn fn = FilterFn::Lt;
    Value literal;
    double estimated_selectivity = 1.0;
    bool operator==(const FilterSpec&) const = default;
};

enum class AggFn { Min, Max, Avg, Mean, Sum };

const char* agg_fn_name(AggFn fn);
AggFn agg_fn_from_name(const std::string& name);

struct AggSpec {
    AggFn fn = AggFn::Sum;
    WindowSpec window;
    std::optional<std::size_t> key_field;
    // Field aggregated; absent means each tuple contributes 1.0 (count-style).
    std::optional<std::size_t> value_field;
    bool operator==(const AggSpec&) const = default;
};

struct JoinSpec {
    WindowSpec window; // time policy only
    std::size_t left_key = 0;
    std::size_t right_key = 0;
    std::string left_op; // upstream operator id of the left input
    bool operator==(const JoinSpec&) const = default;
};

// Deterministic stand-ins for the user-defined operators of the application
// suite. Each behavior has a fixed output schema relative to its input.
enum class UdoBehavior {
    SentimentScore, // adds double score from a keyword table
    GeoBucket,      // adds int bucket = ip % 256
    MedianOutlier,  // sliding per-key buffer, exact median via BFPRT, adds median + flag
    RoadMatch,      // adds int segment id from rounded coordinates
    TopicThreshold, // passes tuples whose numeric field >= threshold
    RollingCtr,     // per-key EMA of a ratio of two numeric fields
};

const char* udo_behavior_name(UdoBehavior b);
UdoBehavior udo_behavior_from_name(const std::string& name);

struct UdoSpec {
    std::string name;
    UdoBehavior behavior = UdoBehavior::SentimentScore;
    std::map<std::string, double> params;
    bool operator==(const UdoSpec&) const = default;
};

enum class OpKind {
    Source,
    Filter,
    Map,
    FlatMap,
    WindowAggregate,
    WindowJoin,
    Udo,
    Sink,
};

const char* op_kind_name(OpKind k);
OpKind op_kind_from_name(const std::string& name);

enum class PartitioningKind { Forward, Rebalance, Hashing };

const char* partitioning_kind_name(PartitioningKind k);
PartitioningKind partitioning_kind_from_name(const std::string& name);

struct Partitioning {
    PartitioningKind kind = PartitioningKind::Forward;
    std::optional<std::size_t> key_field; // hashing only; index into the upstream output schema
    bool operator==(const Partitioning&) const = default;
};

struct OperatorSpec {
    std::string id;
    OpKind kind = OpKind::Source;
    int parallelism = 1;
    Partitioning inbound;
    std::optional<FilterSpec> filter;
    std::optional<AggSpec> agg;
    std::optional<JoinSpec> join;
    std::optional<UdoSpec> udo;
    bool operator==(const OperatorSpec&) const = default;
};

// Stateful operators keep keyed or windowed state; with parallelism > 1 they
// must be hash-partitioned for results to be independent of the degree.
bool op_is_stateful(const OperatorSpec& op);

enum class ArrivalKind { Uniform, Poisson, Zipf };

const char* arrival_kind_name(ArrivalKind k);
ArrivalKind arrival_kind_from_name(const std::string& name);

struct StreamSpec {
    TupleSchema schema;
    double event_rate = 1000.0; // events per second
    ArrivalKind arrival = ArrivalKind::Uniform;
    double zipf_skew = 1.0;   // zipf arrival kind only
    bool replay = false;      // cycle values with a fixed period, mimicking a looped finite source
    int string_pool = 1000;   // distinct string values per stream
    int key_cardinality = 100; // value domain of field 0 when it is an integer
    bool operator==(const StreamSpec&) const = default;
};

struct Edge {
    std::string from;
    std::string to;
    bool operator==(const Edge&) const = default;
};

struct QueryPlan {
    std::string id;
    std::string structure_tag;
    std::vector<OperatorSpec> operators;
    std::vector<Edge> edges;
    std::map<std::string, StreamSpec> streams; // per source operator id
    std::vector<std::string> notes;            // e.g. partitioning coercions applied by the enumerator

    const OperatorSpec* find_op(const std::string& id) const;
    OperatorSpec* find_op(const std::string& id);
    std::vector<std::string> inputs_of(const std::string& id) const;
    std::vector<std::string> outputs_of(const std::string& id) const;
    int max_parallelism() const;
};

enum class ParallelismCategory { XS, S, M, L, XL, XXL };

const char* parallelism_category_name(ParallelismCategory c);

// Table-driven bucketing of the maximum operator parallelism:
// 1<=XS<8, 8<=S<16, 16<=M<32, 32<=L<64, 64<=XL<128, XXL>=128.
ParallelismCategory categorize_parallelism(int max_degree);

// Output schema of one operator given the schemas of its inputs (one entry,
// or two for joins in left/right order). Throws Error on inconsistency.
TupleSchema operator_output_schema(const OperatorSpec& op, const std::vector<TupleSchema>& inputs,
                                   const StreamSpec* source_stream);

// Topological order of operator indices; throws if the edge set has a cycle.
std::vector<std::size_t> topological_order(const QueryPlan& plan);

// Output schema per operator id, computed along the dataflow.
std::map<std::string, TupleSchema> compute_schemas(const QueryPlan& plan);

// Walks upstream from `op_id` to the first source feeding it (DFS over the
// reversed edges, smallest operator id first). Useful for relating a filter
// on a stateless chain back to its source stream.
const OperatorSpec* upstream_source_of(const QueryPlan& plan, const std::string& op_id);

const std::vector<std::string>& synthetic_structure_tags();
const std::vector<std::string>& application_codes();
bool is_synthetic_structure(const std::string& tag);
bool is_application_code(const std::string& tag);

} // namespace pdsp
