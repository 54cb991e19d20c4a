#include "corpus/store.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "dataflow/plan_io.hpp"
#include "dataflow/validate.hpp"
#include "ml/features.hpp"
#include "util/rng.hpp"

namespace pdsp {

using nlohmann::json;

json run_record_to_json(const RunRecord& r) {
    json j;
    j["id"] = r.id;
    j["plan"] = plan_to_json(r.plan);
    j["cluster"] = cluster_to_json(r.cluster);
    j["cluster_digest"] = r.cluster_digest;
    j["strategy"] = r.strategy;
    j["placement"] = r.placement_policy;
    j["mode"] = r.mode;
    j["labels"] = {{"latency_us", r.latency_label_us}, {"throughput_tps", r.throughput_label_tps}};
    j["seed"] = r.seed;
    j["version"] = r.version;
    return j;
}

RunRecord run_record_from_json(const json& j) {
    static const std::set<std::string> allowed = {
        "id", "plan", "cluster", "cluster_digest", "strategy", "placement",
        "mode", "labels", "seed", "version",
    };
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw_invalid("unknown run record field: " + it.key());

    RunRecord r;
    r.id = j.at("id").get<std::uint64_t>();
    r.plan = plan_from_json(j.at("plan"));
    r.cluster = cluster_from_json(j.at("cluster"));
    r.cluster_name = r.cluster.name;
    r.cluster_digest = j.at("cluster_digest").get<std::string>();
    r.strategy = j.at("strategy").get<std::string>();
    r.placement_policy = j.at("placement").get<std::string>();
    r.mode = j.at("mode").get<std::string>();
    r.latency_label_us = j.at("labels").at("latency_us").get<double>();
    r.throughput_label_tps = j.at("labels").at("throughput_tps").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.version = j.at("version").get<std::string>();

    if (r.latency_label_us <= 0 || r.throughput_label_tps <= 0)
        throw_invalid("run record " + std::to_string(r.id) + " has non-positive labels");
    require_valid(r.plan);
    return r;
}

CorpusStore::CorpusStore(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_);
    if (!in) return; // new store
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            records_.push_back(run_record_from_json(json::parse(line)));
        } catch (const std::exception& e) {
            ++skipped_;
            std::cerr << "corpus " << path_ << ":" << lineno << ": skipping invalid record ("
                      << e.what() << ")\n";
        }
    }
}

std::uint64_t CorpusStore::append(RunRecord record) {
    record.id = records_.empty() ? 0 : records_.back().id + 1;
    if (record.latency_label_us <= 0 || record.throughput_label_tps <= 0)
        throw_invalid("run record labels must be positive");
    require_valid(record.plan);

    // If a crash left a partial trailing line, terminate it first so the new
    // record starts on its own line; the partial line stays skippable.
    bool needs_newline = false;
    {
        std::ifstream in(path_, std::ios::binary | std::ios::ate);
        if (in && in.tellg() > 0) {
            in.seekg(-1, std::ios::end);
            char last;
            in.get(last);
            needs_newline = last != '\n';
        }
    }
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    if (!out) throw_io("cannot open corpus for append: " + path_);
    if (needs_newline) out << '\n';
    out << run_record_to_json(record).dump() << '\n';
    out.flush();
    if (!out) throw_io("corpus append failed: " + path_);

    records_.push_back(std::move(record));
    return records_.back().id;
}

std::vector<RunRecord> CorpusStore::load(const std::string& path) {
    std::ifstream probe(path);
    if (!probe) throw_io("cannot open corpus: " + path);
    probe.close();
    CorpusStore store(path);
    return store.records();
}

void SplitSpec::validate() const {
    if (train_fraction <= 0 || val_fraction <= 0 || test_fraction <= 0)
        throw_invalid("split fractions must be positive");
    double sum = train_fraction + val_fraction + test_fraction;
    if (std::abs(sum - 1.0) > 1e-9) throw_invalid("split fractions must sum to 1");
}

Split split_records(const std::vector<RunRecord>& records, const SplitSpec& spec) {
    spec.validate();
    if (records.empty()) throw_invalid("cannot split an empty corpus");

    Split split;
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < records.size(); ++i) pool.push_back(i);

    if (spec.key == SplitKey::ByPlanStructure) {
        std::set<std::string> holdout(spec.holdout_structures.begin(), spec.holdout_structures.end());
        std::vector<std::size_t> rest;
        for (std::size_t i : pool) {
            if (holdout.count(records[i].plan.structure_tag))
                split.test.push_back(i);
            else
                rest.push_back(i);
        }
        // remaining records split train/val by their relative fractions
        Rng rng(mix_seed(spec.seed, 77));
        rng.shuffle(rest);
        double rel_train = spec.train_fraction / (spec.train_fraction + spec.val_fraction);
        auto n_train = static_cast<std::size_t>(std::floor(rel_train * static_cast<double>(rest.size())));
        for (std::size_t i = 0; i < rest.size(); ++i)
            (i < n_train ? split.train : split.val).push_back(rest[i]);
        if (split.train.empty() || split.val.empty() || split.test.empty())
            throw_invalid("split infeasible: a bucket came out empty (holdout split over " +
                          std::to_string(records.size()) + " records)");
        return split;
    }

    Rng rng(mix_seed(spec.seed, 77));
    rng.shuffle(pool);
    auto n = static_cast<double>(pool.size());
    auto n_train = static_cast<std::size_t>(std::floor(spec.train_fraction * n));
    auto n_val = static_cast<std::size_t>(std::floor(spec.val_fraction * n));
    if (n_train == 0 || n_val == 0 || n_train + n_val >= pool.size())
        throw_invalid("split infeasible for corpus of size " + std::to_string(pool.size()));
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (i < n_train)
            split.train.push_back(pool[i]);
        else if (i < n_train + n_val)
            split.val.push_back(pool[i]);
        else
            split.test.push_back(pool[i]);
    }
    return split;
}

std::string corpus_to_csv(const std::vector<RunRecord>& records) {
    std::ostringstream os;
    os << "id,structure,strategy,cluster,mode,seed";
    for (const auto& name : flat_feature_names()) os << ',' << name;
    os << ",latency_us,throughput_tps\n";
    for (const auto& r : records) {
        os << r.id << ',' << r.plan.structure_tag << ',' << r.strategy << ',' << r.cluster_name << ','
           << r.mode << ',' << r.seed;
        auto features = featurize_flat(r);
        for (double f : features) os << ',' << f;
        os << ',' << r.latency_label_us << ',' << r.throughput_label_tps << '\n';
    }
    return os.str();
}

} // namespace pdsp
