#include "harness/stages.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "dataflow/plan_io.hpp"
#include "dataflow/validate.hpp"
#include "ml/features.hpp"

namespace pdsp {

using nlohmann::json;
namespace fs = std::filesystem;

const char* kReportCsvHeader = "structure,category,cluster,n,p50_us";

HarnessConfig apply_overrides(const HarnessConfig& base, const json& overrides) {
    if (overrides.is_null() || overrides.empty()) return base;
    json merged = base.to_json();
    for (auto it = overrides.begin(); it != overrides.end(); ++it) {
        if (it.value().is_object() && merged.contains(it.key()) && merged[it.key()].is_object()) {
            for (auto inner = it.value().begin(); inner != it.value().end(); ++inner)
                merged[it.key()][inner.key()] = inner.value();
        } else {
            merged[it.key()] = it.value();
        }
    }
    return HarnessConfig::from_json(merged);
}

namespace {

void ensure_parent_dir(const std::string& path) {
    fs::path p(path);
    if (p.has_parent_path() && !p.parent_path().empty()) fs::create_directories(p.parent_path());
}

std::string write_text(const std::string& path, const std::string& text) {
    ensure_parent_dir(path);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw_io("cannot write " + path);
    out << text;
    if (!out) throw_io("write failed: " + path);
    return path;
}

} // namespace

json stage_generate(const HarnessConfig& config, const std::string& out_plans_path) {
    auto plans = generate_corpus(config.generator);
    ensure_parent_dir(out_plans_path);
    write_plan_file(out_plans_path, plans);

    std::map<std::string, std::size_t> per_structure;
    for (const auto& p : plans) per_structure[p.structure_tag]++;
    json summary;
    summary["plans"] = plans.size();
    summary["path"] = out_plans_path;
    summary["per_structure"] = per_structure;
    return summary;
}

json stage_enumerate(const HarnessConfig& config, const std::string& plans_in,
                     const std::string& plans_out) {
    auto bases = read_plan_file(plans_in);
    if (bases.empty()) throw_invalid("no plans in " + plans_in);
    auto cluster = resolve_cluster(config.cluster);

    std::vector<QueryPlan> out;
    for (const auto& base : bases) {
        RuleContext ctx = RuleContext::from_plan(base, config.strategy.per_core_capacity,
                                                 cluster.total_cores());
        ctx.join_selectivity = config.strategy.join_selectivity;
        auto enumeration = enumerate(base, config.strategy.strategy, ctx, config.generator.seed);
        std::size_t emitted = 0;
        std::size_t cap = enumeration->total().value_or(config.strategy.random_count);
        while (enumeration->has_next() && emitted < cap) {
            out.push_back(enumeration->next());
            ++emitted;
        }
    }
    ensure_parent_dir(plans_out);
    write_plan_file(plans_out, out);
    json summary;
    summary["bases"] = bases.size();
    summary["plans"] = out.size();
    summary["path"] = plans_out;
    summary["strategy"] = strategy_kind_name(config.strategy.strategy.kind);
    return summary;
}

json stage_run(const HarnessConfig& config, const std::string& plans_path,
               const std::string& corpus_path) {
    auto bases = read_plan_file(plans_path);
    if (bases.empty()) throw_invalid("no plans in " + plans_path);
    auto cluster = resolve_cluster(config.cluster);

    ensure_parent_dir(corpus_path);
    CorpusStore store(corpus_path);

    json failures = json::array();
    std::size_t appended = 0;
    std::ostringstream metrics_csv;
    metrics_csv << kLatencyCsvHeader << '\n';

    std::size_t record_index = store.size();
    for (const auto& base : bases) {
        try {
            bool pre_enumerated = base.max_parallelism() > 1;
            std::vector<QueryPlan> assignments;
            if (pre_enumerated) {
                // run the plan exactly as loaded
                assignments.push_back(base);
            } else {
                RuleContext ctx = RuleContext::from_plan(base, config.strategy.per_core_capacity,
                                                         cluster.total_cores());
                ctx.join_selectivity = config.strategy.join_selectivity;
                auto enumeration =
                    enumerate(base, config.strategy.strategy, ctx, config.generator.seed);
                std::size_t cap = enumeration->total().value_or(config.strategy.random_count);
                std::size_t emitted = 0;
                while (enumeration->has_next() && emitted < cap) {
                    assignments.push_back(enumeration->next());
                    ++emitted;
                }
            }

            for (const auto& plan : assignments) {
                std::uint64_t run_seed = mix_seed(config.generator.seed, record_index);
                auto options = config.run_options(run_seed);
                if (config.trace && config.mode == ExecMode::Sim) {
                    // dump one traced run per plan before the measured protocol
                    RunOptions traced = options;
                    traced.collect_trace = true;
                    auto result = run_sim(plan, cluster, config.cost, traced);
                    fs::create_directories(config.traces_dir);
                    std::ofstream trace_out(
                        (fs::path(config.traces_dir) / ("trace_" + plan.id + ".jsonl")).string(),
                        std::ios::trunc);
                    for (const auto& ev : result.trace)
                        trace_out << json{{"t_us", ev.t_us},
                                          {"instance", ev.instance},
                                          {"step", ev.step},
                                          {"kind", std::string(1, ev.kind)}}
                                         .dump()
                                  << '\n';
                }
                auto protocol = run_protocol(plan, cluster, config.cost, options, config.mode,
                                             config.protocol_runs, config.vary_run_seeds);

                RunRecord record;
                record.plan = plan;
                record.cluster = cluster;
                record.cluster_name = cluster.name;
                record.cluster_digest = cluster.digest();
                record.strategy = strategy_kind_name(config.strategy.strategy.kind);
                record.placement_policy = placement_policy_name(config.placement);
                record.mode = exec_mode_name(config.mode);
                record.latency_label_us = protocol.mean_of_medians;
                record.throughput_label_tps = protocol.throughput_tps;
                record.seed = run_seed;
                store.append(record);
                ++appended;
                ++record_index;
                metrics_csv << latency_csv_row(plan.id, cluster.name, exec_mode_name(config.mode),
                                               static_cast<std::size_t>(config.protocol_runs),
                                               protocol.latency, protocol.throughput_tps)
                            << '\n';
            }
        } catch (const std::exception& e) {
            failures.push_back({{"plan", base.id}, {"error", e.what()}});
        }
    }

    std::string metrics_path;
    if (!config.results_dir.empty()) {
        fs::create_directories(config.results_dir);
        metrics_path = (fs::path(config.results_dir) / "metrics.csv").string();
        write_text(metrics_path, metrics_csv.str());
    }

    json summary;
    summary["records"] = appended;
    summary["corpus"] = corpus_path;
    summary["failures"] = failures;
    summary["metrics_csv"] = metrics_path;
    return summary;
}

std::string stage_report(const HarnessConfig& config, const std::string& corpus_path,
                         const std::vector<std::string>& group_by) {
    (void)config;
    auto records = CorpusStore::load(corpus_path);
    if (records.empty()) throw_invalid("corpus is empty: " + corpus_path);

    std::set<std::string> keys(group_by.begin(), group_by.end());
    if (keys.empty()) keys = {"structure", "category", "cluster"};
    for (const auto& k : keys)
        if (k != "structure" && k != "category" && k != "cluster")
            throw_invalid("unknown group-by key: " + k + " (expected structure, category, cluster)");

    std::map<std::tuple<std::string, std::string, std::string>, std::vector<double>> groups;
    for (const auto& r : records) {
        std::string structure = keys.count("structure") ? r.plan.structure_tag : "*";
        std::string category =
            keys.count("category")
                ? parallelism_category_name(categorize_parallelism(r.plan.max_parallelism()))
                : "*";
        std::string cluster = keys.count("cluster") ? r.cluster_name : "*";
        groups[{structure, category, cluster}].push_back(r.latency_label_us);
    }

    std::ostringstream os;
    os << kReportCsvHeader << '\n';
    for (auto& [key, latencies] : groups) {
        os << std::get<0>(key) << ',' << std::get<1>(key) << ',' << std::get<2>(key) << ','
           << latencies.size() << ',' << percentile_nearest_rank(latencies, 0.5) << '\n';
    }
    return os.str();
}

std::string stage_corpus_export(const std::string& corpus_path) {
    auto records = CorpusStore::load(corpus_path);
    if (records.empty()) throw_invalid("corpus is empty: " + corpus_path);
    return corpus_to_csv(records);
}

json stage_train(const HarnessConfig& config, const std::string& corpus_path,
                 const std::string& model_out_path) {
    auto records = CorpusStore::load(corpus_path);
    auto split = split_records(records, config.split);
    auto model = train(records, split, config.train);
    ensure_parent_dir(model_out_path);
    model.save(model_out_path);

    auto report = evaluate(model, records, split.test);
    json summary;
    summary["model"] = model_kind_name(config.train.kind);
    summary["path"] = model_out_path;
    summary["train_records"] = split.train.size();
    summary["val_records"] = split.val.size();
    summary["test_records"] = split.test.size();
    summary["stopped_epoch"] = model.stopped_epoch;
    summary["best_epoch"] = model.best_epoch;
    summary["train_seconds"] = model.train_seconds;
    summary["test_q50"] = report.overall.median;
    summary["test_q95"] = report.overall.p95;
    return summary;
}

std::string stage_evaluate(const HarnessConfig& config, const std::string& model_path,
                           const std::string& corpus_path, bool test_subset_only) {
    auto model = TrainedModel::load(model_path);
    auto records = CorpusStore::load(corpus_path);
    std::vector<std::size_t> subset;
    if (test_subset_only) {
        auto split = split_records(records, config.split);
        subset = split.test;
    } else {
        for (std::size_t i = 0; i < records.size(); ++i) subset.push_back(i);
    }
    auto report = evaluate(model, records, subset);
    return evaluation_to_csv(model, report);
}

std::string stage_compare(const HarnessConfig& config,
                          const std::vector<std::pair<std::string, std::string>>& strategy_corpora) {
    std::vector<std::pair<std::string, std::vector<RunRecord>>> corpora;
    for (const auto& [strategy, path] : strategy_corpora)
        corpora.push_back({strategy, CorpusStore::load(path)});
    auto rows = compare_enumeration_training(corpora, config.train, config.split);
    return comparison_to_csv(rows);
}

json stage_pipeline(const HarnessConfig& config, const std::string& out_dir) {
    fs::create_directories(out_dir);
    auto path_in = [&](const std::string& name) { return (fs::path(out_dir) / name).string(); };
    json summary;

    auto run_stage = [&](const std::string& name, auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            throw Error(e.code(), "pipeline stage '" + name + "' failed: " + e.what());
        } catch (const std::exception& e) {
            throw Error(ErrorCode::Internal, "pipeline stage '" + name + "' failed: " + e.what());
        }
    };

    std::string plans_path = path_in("plans.jsonl");
    run_stage("generate", [&] { summary["generate"] = stage_generate(config, plans_path); });

    // one corpus per compared strategy; the first one feeds training
    std::vector<std::pair<std::string, std::string>> strategy_corpora;
    run_stage("run", [&] {
        json runs = json::object();
        for (const auto& strategy_name : config.pipeline_compare) {
            HarnessConfig strategy_config = config;
            strategy_config.strategy.strategy.kind = strategy_kind_from_name(strategy_name);
            std::string corpus_path = path_in("corpus_" + strategy_name + ".jsonl");
            if (fs::exists(corpus_path)) fs::remove(corpus_path); // idempotent re-runs
            auto run_summary = stage_run(strategy_config, plans_path, corpus_path);
            if (!run_summary["failures"].empty())
                throw Error(ErrorCode::Execution,
                            "plan failures: " + run_summary["failures"].dump());
            runs[strategy_name] = run_summary;
            strategy_corpora.push_back({strategy_name, corpus_path});
        }
        summary["run"] = runs;
    });

    const std::string main_corpus = strategy_corpora.front().second;
    std::vector<RunRecord> records;
    Split split;
    run_stage("split", [&] {
        records = CorpusStore::load(main_corpus);
        split = split_records(records, config.split);
        summary["split"] = {{"train", split.train.size()},
                            {"val", split.val.size()},
                            {"test", split.test.size()}};
    });

    run_stage("train", [&] {
        json models = json::object();
        std::ostringstream eval_csv;
        eval_csv << kEvalCsvHeader << '\n';
        std::vector<std::string> model_names = config.pipeline_models;
        model_names.push_back("mean_baseline"); // comparison floor
        for (const auto& name : model_names) {
            TrainConfig tc = config.train;
            tc.kind = model_kind_from_name(name);
            auto model = train(records, split, tc);
            std::string model_path = path_in("model_" + name + ".json");
            model.save(model_path);
            auto report = evaluate(model, records, split.test);
            auto csv = evaluation_to_csv(model, report);
            eval_csv << csv.substr(csv.find('\n') + 1); // strip the per-model header
            models[name] = {{"path", model_path},
                            {"stopped_epoch", model.stopped_epoch},
                            {"train_seconds", model.train_seconds},
                            {"test_q50", report.overall.median}};
        }
        summary["models"] = models;
        summary["evaluation_csv"] = write_text(path_in("evaluation.csv"), eval_csv.str());
    });

    run_stage("report", [&] {
        summary["report_csv"] = write_text(path_in("report.csv"),
                                           stage_report(config, main_corpus, {}));
    });

    run_stage("compare", [&] {
        if (strategy_corpora.size() >= 2)
            summary["compare_csv"] =
                write_text(path_in("compare_strategies.csv"), stage_compare(config, strategy_corpora));
    });

    summary["corpus"] = main_corpus;
    return summary;
}

} // namespace pdsp
