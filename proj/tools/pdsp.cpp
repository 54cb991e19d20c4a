// pdsp command-line tool. Thin shell over the C API in pdsp/pdsp.h: flags are
// folded into a JSON options object, results are printed as returned.
//
// Exit codes: 0 success, 1 user/config error, 2 internal error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "pdsp/pdsp.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUser = 1;
constexpr int kExitInternal = 2;

int exit_code_for(pdsp_status status) {
    switch (status) {
        case PDSP_OK: return kExitOk;
        case PDSP_ERR_INTERNAL: return kExitInternal;
        default: return kExitUser;
    }
}

int report_failure(const char* what, pdsp_status status) {
    std::cerr << "pdsp: " << what << " failed (" << pdsp_status_name(status)
              << "): " << pdsp_last_error() << "\n";
    return exit_code_for(status);
}

struct OwnedString {
    char* value = nullptr;
    ~OwnedString() { pdsp_string_free(value); }
};

struct HarnessHandle {
    pdsp_harness* handle = nullptr;
    ~HarnessHandle() { pdsp_harness_destroy(handle); }
};

// Options shared by every subcommand; merged into the stage options JSON.
struct CommonOpts {
    std::string config_path;
    long long seed = -1;
    std::string cluster;
    std::string mode;

    json to_overrides() const {
        json j = json::object();
        if (seed >= 0) {
            j["generator"]["seed"] = seed;
            j["split"]["seed"] = seed;
            j["train"]["seed"] = seed;
        }
        if (!cluster.empty()) j["cluster"] = cluster;
        if (!mode.empty()) j["mode"] = mode;
        return j;
    }
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "Harness config file (JSON)");
    cmd->add_option("--seed", opts.seed, "Seed for generation, split and training");
    cmd->add_option("--cluster", opts.cluster, "Cluster spec, e.g. m510x10 or c6525_25gx5+c6320x5");
    cmd->add_option("--mode", opts.mode, "Execution mode: sim or threads");
}

int make_harness(const CommonOpts& opts, HarnessHandle& harness) {
    pdsp_status status =
        opts.config_path.empty()
            ? pdsp_harness_create("{}", &harness.handle)
            : pdsp_harness_create_from_file(opts.config_path.c_str(), &harness.handle);
    if (status != PDSP_OK) return report_failure("configuration", status);
    return kExitOk;
}

void print_or_save(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(out_path, std::ios::trunc);
    out << text;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Benchmarking harness for parallel and distributed stream processing"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(pdsp_version()));

    // generate
    auto* generate = app.add_subcommand("generate", "Generate workload plans");
    CommonOpts gen_opts;
    add_common(generate, gen_opts);
    std::vector<std::string> gen_structures;
    std::string gen_app;
    long long gen_count = -1;
    std::string gen_out = "plans.jsonl";
    generate->add_option("--structures", gen_structures,
                         "Synthetic structures (linear, 2-way-join, ...)");
    generate->add_option("--app", gen_app, "Application code (WC, MO, ..., AD)");
    generate->add_option("--count", gen_count, "Number of plans");
    generate->add_option("--out", gen_out, "Output plan file");

    // enumerate
    auto* enumerate_cmd = app.add_subcommand("enumerate", "Assign parallelism degrees to plans");
    CommonOpts enum_opts;
    add_common(enumerate_cmd, enum_opts);
    std::string enum_in, enum_out = "enumerated.jsonl", enum_strategy, enum_assign;
    int enum_min = -1, enum_max = -1;
    long long enum_random_count = -1;
    enumerate_cmd->add_option("--plans", enum_in, "Input plan file")->required();
    enumerate_cmd->add_option("--out", enum_out, "Output plan file");
    enumerate_cmd->add_option("--strategy", enum_strategy,
                              "random|rule|exhaustive|minavgmax|increasing|parameter");
    enumerate_cmd->add_option("--degree-min", enum_min, "Minimum parallelism degree");
    enumerate_cmd->add_option("--degree-max", enum_max, "Maximum parallelism degree");
    enumerate_cmd->add_option("--assign", enum_assign, "Parameter-based map op=k,op=k");
    enumerate_cmd->add_option("--enum-count", enum_random_count,
                              "Plans per base for the random strategy");

    // run
    auto* run = app.add_subcommand("run", "Execute plans and store run records");
    CommonOpts run_opts;
    add_common(run, run_opts);
    std::string run_plans, run_corpus = "corpus.jsonl", run_strategy, run_assign;
    int run_min = -1, run_max = -1, run_runs = -1;
    double run_duration = -1, run_time_scale = -1;
    run->add_option("--plans", run_plans, "Input plan file")->required();
    run->add_option("--corpus", run_corpus, "Corpus file to append to");
    run->add_option("--strategy", run_strategy, "Enumeration strategy applied to base plans");
    run->add_option("--degree-min", run_min, "Minimum parallelism degree");
    run->add_option("--degree-max", run_max, "Maximum parallelism degree");
    run->add_option("--assign", run_assign, "Parameter-based map op=k,op=k");
    run->add_option("--runs", run_runs, "Protocol repetitions per plan");
    run->add_option("--duration", run_duration, "Run duration in virtual seconds");
    run->add_option("--time-scale", run_time_scale, "Thread mode wall-clock scale");
    bool run_trace = false;
    run->add_flag("--trace", run_trace, "Dump sim event traces to the traces directory");

    // report
    auto* report = app.add_subcommand("report", "Grouped latency tables from a corpus");
    CommonOpts report_opts;
    add_common(report, report_opts);
    std::string report_corpus = "corpus.jsonl", report_group, report_out;
    report->add_option("--corpus", report_corpus, "Corpus file");
    report->add_option("--group-by", report_group, "Comma list of structure,category,cluster");
    report->add_option("--out", report_out, "Write CSV here instead of stdout");

    // corpus export
    auto* corpus = app.add_subcommand("corpus", "Corpus utilities");
    auto* corpus_export = corpus->add_subcommand("export", "Flatten features+labels to CSV");
    CommonOpts export_opts;
    add_common(corpus_export, export_opts);
    std::string export_corpus = "corpus.jsonl", export_out;
    bool export_csv_flag = false;
    corpus_export->add_option("--corpus", export_corpus, "Corpus file");
    corpus_export->add_flag("--csv", export_csv_flag, "Emit CSV (the only supported format)");
    corpus_export->add_option("--out", export_out, "Write CSV here instead of stdout");

    // train
    auto* train = app.add_subcommand("train", "Train a cost model on a corpus");
    CommonOpts train_opts;
    add_common(train, train_opts);
    std::string train_corpus = "corpus.jsonl", train_model_kind, train_out = "model.json";
    train->add_option("--corpus", train_corpus, "Corpus file");
    train->add_option("--model", train_model_kind, "lr|mlp|rf|gnn|mean_baseline");
    train->add_option("--out", train_out, "Model output path");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Q-error evaluation of a trained model");
    CommonOpts eval_opts;
    add_common(evaluate, eval_opts);
    std::string eval_model = "model.json", eval_corpus = "corpus.jsonl", eval_out;
    bool eval_test_only = false;
    evaluate->add_option("--model-file", eval_model, "Trained model file");
    evaluate->add_option("--corpus", eval_corpus, "Corpus file");
    evaluate->add_flag("--test-split", eval_test_only, "Evaluate only the configured test split");
    evaluate->add_option("--out", eval_out, "Write CSV here instead of stdout");

    // compare-strategies
    auto* compare = app.add_subcommand("compare-strategies",
                                       "Training efficiency across enumeration strategies");
    CommonOpts compare_opts;
    add_common(compare, compare_opts);
    std::vector<std::string> compare_corpora;
    std::string compare_out;
    compare->add_option("--corpus", compare_corpora, "strategy=path pairs (repeatable)")
        ->required()
        ->expected(-2);
    compare->add_option("--out", compare_out, "Write CSV here instead of stdout");

    // pipeline
    auto* pipeline = app.add_subcommand("pipeline", "End-to-end: generate, run, train, evaluate");
    CommonOpts pipe_opts;
    add_common(pipeline, pipe_opts);
    std::string pipe_out_dir = "pipeline_out";
    long long pipe_count = -1;
    pipeline->add_option("--out-dir", pipe_out_dir, "Artifact directory");
    pipeline->add_option("--count", pipe_count, "Number of generated plans");

    CLI11_PARSE(app, argc, argv);

    auto strategy_overrides = [](json& j, const std::string& strategy, int dmin, int dmax,
                                 const std::string& assign, long long random_count) {
        if (!strategy.empty()) j["strategy"]["strategy"] = strategy;
        if (dmin > 0) j["strategy"]["degree_min"] = dmin;
        if (dmax > 0) j["strategy"]["degree_max"] = dmax;
        if (random_count > 0) j["strategy"]["random_count"] = random_count;
        if (!assign.empty()) {
            json map = json::object();
            std::size_t pos = 0;
            while (pos < assign.size()) {
                auto comma = assign.find(',', pos);
                auto item = assign.substr(pos, comma == std::string::npos ? comma : comma - pos);
                auto eq = item.find('=');
                if (eq == std::string::npos) {
                    std::cerr << "pdsp: bad --assign entry '" << item << "' (want op=k)\n";
                    std::exit(kExitUser);
                }
                map[item.substr(0, eq)] = std::stoi(item.substr(eq + 1));
                pos = comma == std::string::npos ? assign.size() : comma + 1;
            }
            j["strategy"]["assignments"] = map;
            if (!j["strategy"].contains("strategy")) j["strategy"]["strategy"] = "parameter";
            if (dmax <= 0) {
                int top = 1;
                for (const auto& [op, degree] : map.items()) top = std::max(top, degree.get<int>());
                j["strategy"]["degree_max"] = top;
            }
        }
    };

    if (*generate) {
        HarnessHandle harness;
        if (int rc = make_harness(gen_opts, harness)) return rc;
        json overrides = gen_opts.to_overrides();
        std::vector<std::string> structures = gen_structures;
        if (!gen_app.empty()) structures.push_back(gen_app);
        if (!structures.empty()) overrides["generator"]["structures"] = structures;
        if (gen_count > 0)
            overrides["generator"]["count"] = gen_count;
        else if (!gen_app.empty() && gen_structures.empty() && gen_count < 0)
            overrides["generator"]["count"] = 1;
        OwnedString summary;
        auto status = pdsp_generate(harness.handle, overrides.dump().c_str(), gen_out.c_str(),
                                    &summary.value);
        if (status != PDSP_OK) return report_failure("generate", status);
        auto parsed = json::parse(summary.value);
        std::cout << "wrote " << parsed["plans"] << " plans to " << gen_out << "\n";
        for (auto it = parsed["per_structure"].begin(); it != parsed["per_structure"].end(); ++it)
            std::cout << "  " << it.key() << ": " << it.value() << "\n";
        return kExitOk;
    }

    if (*enumerate_cmd) {
        HarnessHandle harness;
        if (int rc = make_harness(enum_opts, harness)) return rc;
        json overrides = enum_opts.to_overrides();
        strategy_overrides(overrides, enum_strategy, enum_min, enum_max, enum_assign,
                           enum_random_count);
        OwnedString summary;
        auto status = pdsp_enumerate(harness.handle, enum_in.c_str(), overrides.dump().c_str(),
                                     enum_out.c_str(), &summary.value);
        if (status != PDSP_OK) return report_failure("enumerate", status);
        auto parsed = json::parse(summary.value);
        std::cout << "enumerated " << parsed["plans"] << " plans from " << parsed["bases"]
                  << " bases (" << parsed["strategy"].get<std::string>() << ") to " << enum_out
                  << "\n";
        return kExitOk;
    }

    if (*run) {
        HarnessHandle harness;
        if (int rc = make_harness(run_opts, harness)) return rc;
        json overrides = run_opts.to_overrides();
        strategy_overrides(overrides, run_strategy, run_min, run_max, run_assign, -1);
        if (run_runs > 0) overrides["protocol_runs"] = run_runs;
        if (run_duration > 0) overrides["duration_s"] = run_duration;
        if (run_time_scale > 0) overrides["time_scale"] = run_time_scale;
        if (run_trace) overrides["trace"] = true;
        OwnedString summary;
        auto status = pdsp_run(harness.handle, run_plans.c_str(), overrides.dump().c_str(),
                               run_corpus.c_str(), &summary.value);
        if (status != PDSP_OK) return report_failure("run", status);
        auto parsed = json::parse(summary.value);
        std::cout << "appended " << parsed["records"] << " records to " << run_corpus << "\n";
        if (!parsed["metrics_csv"].get<std::string>().empty())
            std::cout << "metrics: " << parsed["metrics_csv"].get<std::string>() << "\n";
        if (!parsed["failures"].empty()) {
            for (const auto& f : parsed["failures"])
                std::cerr << "pdsp: plan " << f["plan"].get<std::string>()
                          << " failed: " << f["error"].get<std::string>() << "\n";
            return kExitUser;
        }
        return kExitOk;
    }

    if (*report) {
        HarnessHandle harness;
        if (int rc = make_harness(report_opts, harness)) return rc;
        OwnedString csv;
        auto status = pdsp_report(harness.handle, report_corpus.c_str(),
                                  report_group.empty() ? nullptr : report_group.c_str(), &csv.value);
        if (status != PDSP_OK) return report_failure("report", status);
        print_or_save(csv.value, report_out);
        return kExitOk;
    }

    if (*corpus_export) {
        HarnessHandle harness;
        if (int rc = make_harness(export_opts, harness)) return rc;
        OwnedString csv;
        auto status = pdsp_corpus_export(harness.handle, export_corpus.c_str(), &csv.value);
        if (status != PDSP_OK) return report_failure("corpus export", status);
        print_or_save(csv.value, export_out);
        return kExitOk;
    }

    if (*train) {
        HarnessHandle harness;
        if (int rc = make_harness(train_opts, harness)) return rc;
        json overrides = train_opts.to_overrides();
        if (!train_model_kind.empty()) overrides["train"]["model"] = train_model_kind;
        OwnedString summary;
        auto status = pdsp_train(harness.handle, train_corpus.c_str(), overrides.dump().c_str(),
                                 train_out.c_str(), &summary.value);
        if (status != PDSP_OK) return report_failure("train", status);
        auto parsed = json::parse(summary.value);
        std::cout << "trained " << parsed["model"].get<std::string>() << " on "
                  << parsed["train_records"] << " records (stopped epoch " << parsed["stopped_epoch"]
                  << ", " << parsed["train_seconds"] << " s); test q50 " << parsed["test_q50"]
                  << "; saved to " << train_out << "\n";
        return kExitOk;
    }

    if (*evaluate) {
        HarnessHandle harness;
        if (int rc = make_harness(eval_opts, harness)) return rc;
        json overrides = eval_opts.to_overrides();
        OwnedString csv;
        auto status = pdsp_evaluate(harness.handle, eval_model.c_str(), eval_corpus.c_str(),
                                    overrides.dump().c_str(), eval_test_only ? 1 : 0, &csv.value);
        if (status != PDSP_OK) return report_failure("evaluate", status);
        print_or_save(csv.value, eval_out);
        return kExitOk;
    }

    if (*compare) {
        HarnessHandle harness;
        if (int rc = make_harness(compare_opts, harness)) return rc;
        std::vector<std::string> names, paths;
        for (const auto& pair : compare_corpora) {
            auto eq = pair.find('=');
            if (eq == std::string::npos) {
                std::cerr << "pdsp: --corpus entries must be strategy=path, got '" << pair << "'\n";
                return kExitUser;
            }
            names.push_back(pair.substr(0, eq));
            paths.push_back(pair.substr(eq + 1));
        }
        std::vector<const char*> name_ptrs, path_ptrs;
        for (auto& n : names) name_ptrs.push_back(n.c_str());
        for (auto& p : paths) path_ptrs.push_back(p.c_str());
        json overrides = compare_opts.to_overrides();
        OwnedString csv;
        auto status = pdsp_compare_strategies(harness.handle, name_ptrs.data(), path_ptrs.data(),
                                              name_ptrs.size(), overrides.dump().c_str(), &csv.value);
        if (status != PDSP_OK) return report_failure("compare-strategies", status);
        print_or_save(csv.value, compare_out);
        return kExitOk;
    }

    if (*pipeline) {
        HarnessHandle harness;
        if (int rc = make_harness(pipe_opts, harness)) return rc;
        json overrides = pipe_opts.to_overrides();
        if (pipe_count > 0) overrides["generator"]["count"] = pipe_count;
        OwnedString summary;
        auto status = pdsp_pipeline(harness.handle, overrides.dump().c_str(), pipe_out_dir.c_str(),
                                    &summary.value);
        if (status != PDSP_OK) return report_failure("pipeline", status);
        auto parsed = json::parse(summary.value);
        std::cout << "pipeline artifacts in " << pipe_out_dir << "\n";
        std::cout << "  corpus: " << parsed["corpus"].get<std::string>() << "\n";
        std::cout << "  evaluation: " << parsed["evaluation_csv"].get<std::string>() << "\n";
        if (parsed.contains("compare_csv"))
            std::cout << "  strategy comparison: " << parsed["compare_csv"].get<std::string>() << "\n";
        for (auto it = parsed["models"].begin(); it != parsed["models"].end(); ++it)
            std::cout << "  model " << it.key() << ": test q50 " << it.value()["test_q50"] << "\n";
        return kExitOk;
    }

    return kExitUser;
}
