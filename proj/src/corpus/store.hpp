#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dataflow/types.hpp"
#include "exec/cluster.hpp"

namespace pdsp {

inline constexpr const char* kHarnessVersion = "0.1.0";

// One executed parallel plan with its measured labels: the corpus unit the
// cost models train on.
struct RunRecord {
    std::uint64_t id = 0;
    QueryPlan plan; // full plan, stream parameters included
    std::string cluster_name;
    std::string cluster_digest;
    ClusterProfile cluster; // node list, so featurization can re-derive placement
    std::string strategy;   // enumeration strategy tag
    std::string placement_policy = "round_robin";
    std::string mode = "sim";
    double latency_label_us = 0;  // mean of per-run medians
    double throughput_label_tps = 0;
    std::uint64_t seed = 0;
    std::string version = kHarnessVersion;
};

nlohmann::json run_record_to_json(const RunRecord& r);
RunRecord run_record_from_json(const nlohmann::json& j);

// Line-delimited record file standing in for the database role: append-only,
// single writer, readable after a crash mid-append (a partial trailing line
// is skipped with a warning).
class CorpusStore {
public:
    // Opens (creating if absent) and scans the file; invalid lines are
    // counted, reported on stderr once, and ignored.
    explicit CorpusStore(std::string path);

    // Durable append; returns the record id (monotone from 0).
    std::uint64_t append(RunRecord record);

    const std::vector<RunRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    std::size_t skipped_lines() const { return skipped_; }
    const std::string& path() const { return path_; }

    static std::vector<RunRecord> load(const std::string& path);

private:
    std::string path_;
    std::vector<RunRecord> records_;
    std::size_t skipped_ = 0;
};

enum class SplitKey { ByRecord, ByPlanStructure };

struct SplitSpec {
    double train_fraction = 0.8;
    double val_fraction = 0.1;
    double test_fraction = 0.1;
    SplitKey key = SplitKey::ByRecord;
    std::uint64_t seed = 1;
    // by_plan_structure: these structures go entirely to test
    std::vector<std::string> holdout_structures;

    void validate() const;
};

struct Split {
    std::vector<std::size_t> train; // indices into the record list
    std::vector<std::size_t> val;
    std::vector<std::size_t> test;
};

// Deterministic, disjoint, exhaustive train/val/test split.
Split split_records(const std::vector<RunRecord>& records, const SplitSpec& spec);

// Flat CSV of features and labels for external tooling.
std::string corpus_to_csv(const std::vector<RunRecord>& records);

} // namespace pdsp
