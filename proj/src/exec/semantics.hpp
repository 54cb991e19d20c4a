#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dataflow/physical.hpp"
#include "dataflow/tuple.hpp"
#include "exec/cost.hpp"

namespace pdsp {

inline constexpr std::size_t kNoIndex = std::numeric_limits<std::size_t>::max();

// One unit of work at one instance: a consumed input tuple, or the final
// close (window flush). Service time is at speed factor 1.0 and excludes the
// coordination term, which depends on where the instance lands.
struct SemStep {
    std::size_t in_message = kNoIndex; // kNoIndex for source steps and closes
    bool is_close = false;
    double source_event_ts = 0;  // source steps: production instant
    double service_speed1 = 0;   // µs
    double event_ts = 0;         // consumed tuple event time (trace)
    double production_ts = 0;    // lineage for sink latency samples
    std::vector<std::size_t> out_messages;
};

struct SemMessage {
    std::size_t channel = 0;        // into PhysicalPlan.channels
    std::size_t consumer_step = 0;  // step index at the consuming instance
    std::uint32_t wire_bytes = 0;
};

// Logical outcome of a run: identical across execution modes, placements and
// (for key-partitioned plans) parallelism degrees.
struct SemanticsResult {
    std::vector<std::vector<SemStep>> steps; // per instance
    std::vector<SemMessage> messages;
    std::vector<std::string> sink_outputs;   // canonical tuple forms, delivery order
    std::uint64_t output_digest = 0;         // over the sorted multiset
    std::size_t sink_deliveries = 0;
    std::vector<std::vector<std::size_t>> inbound_channels; // per instance, sorted
};

// Runs the dataflow logically over a virtual stream horizon of duration_us.
// Per-instance inputs are consumed in (event_ts, channel rank) merge order.
SemanticsResult run_semantics(const PhysicalPlan& phys, const CostModelParams& cost, std::uint64_t seed,
                              double duration_us);

std::uint64_t digest_of_multiset(std::vector<std::string> canonical);

// Channel selection per partitioning strategy, shared by the simulation and
// the threaded engine so tuples take identical routes in both modes.
class ChannelRouter {
public:
    explicit ChannelRouter(const PhysicalPlan& phys);

    // Channels leaving `from_instance` along `edge`, ordered by target.
    const std::vector<std::size_t>& group(std::size_t from_instance, std::size_t edge) const;

    // Picks the route for one tuple; advances the rebalance cursor.
    std::size_t pick(std::size_t from_instance, std::size_t edge, const Tuple& t);

    const std::vector<std::vector<std::size_t>>& inbound() const { return inbound_; }

private:
    const PhysicalPlan& phys_;
    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> groups_;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> cursors_;
    std::vector<std::vector<std::size_t>> inbound_;
    std::vector<PartitioningKind> edge_partitioning_;
    std::vector<std::optional<std::size_t>> edge_key_;
};

} // namespace pdsp
