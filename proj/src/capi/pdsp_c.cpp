#include "pdsp/pdsp.h"

#include <cstring>
#include <string>

#include "dataflow/plan_io.hpp"
#include "dataflow/validate.hpp"
#include "harness/stages.hpp"

using namespace pdsp;

struct pdsp_harness {
    HarnessConfig config;
};

namespace {

thread_local std::string t_last_error;

pdsp_status status_of(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return PDSP_ERR_INVALID_ARGUMENT;
        case ErrorCode::Io: return PDSP_ERR_IO;
        case ErrorCode::Generation: return PDSP_ERR_GENERATION;
        case ErrorCode::Execution: return PDSP_ERR_EXECUTION;
        case ErrorCode::Training: return PDSP_ERR_TRAINING;
        case ErrorCode::Internal: return PDSP_ERR_INTERNAL;
    }
    return PDSP_ERR_INTERNAL;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) return nullptr;
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

template <class Fn>
pdsp_status guarded(Fn&& fn) {
    try {
        t_last_error.clear();
        fn();
        return PDSP_OK;
    } catch (const Error& e) {
        t_last_error = e.what();
        return status_of(e.code());
    } catch (const nlohmann::json::exception& e) {
        t_last_error = e.what();
        return PDSP_ERR_INVALID_ARGUMENT;
    } catch (const std::exception& e) {
        t_last_error = e.what();
        return PDSP_ERR_INTERNAL;
    }
}

nlohmann::json parse_options(const char* options_json) {
    if (!options_json || !*options_json) return nlohmann::json::object();
    return nlohmann::json::parse(options_json);
}

void require(bool cond, const char* what) {
    if (!cond) throw_invalid(std::string("null argument: ") + what);
}

} // namespace

extern "C" {

const char* pdsp_version(void) { return kHarnessVersion; }

const char* pdsp_status_name(pdsp_status status) {
    switch (status) {
        case PDSP_OK: return "ok";
        case PDSP_ERR_INVALID_ARGUMENT: return "invalid_argument";
        case PDSP_ERR_IO: return "io";
        case PDSP_ERR_GENERATION: return "generation";
        case PDSP_ERR_EXECUTION: return "execution";
        case PDSP_ERR_TRAINING: return "training";
        case PDSP_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* pdsp_last_error(void) { return t_last_error.c_str(); }

void pdsp_string_free(char* s) { std::free(s); }

pdsp_status pdsp_harness_create(const char* config_json, pdsp_harness** out) {
    return guarded([&] {
        require(out != nullptr, "out");
        auto j = parse_options(config_json);
        auto harness = new pdsp_harness{HarnessConfig::from_json(j)};
        *out = harness;
    });
}

pdsp_status pdsp_harness_create_from_file(const char* config_path, pdsp_harness** out) {
    return guarded([&] {
        require(out != nullptr, "out");
        require(config_path != nullptr, "config_path");
        auto harness = new pdsp_harness{HarnessConfig::from_file(config_path)};
        *out = harness;
    });
}

void pdsp_harness_destroy(pdsp_harness* harness) { delete harness; }

pdsp_status pdsp_harness_config(pdsp_harness* harness, char** config_json) {
    return guarded([&] {
        require(harness != nullptr, "harness");
        require(config_json != nullptr, "config_json");
        *config_json = dup_string(harness->config.to_json().dump());
    });
}

pdsp_status pdsp_generate(pdsp_harness* harness, const char* options_json,
                          const char* out_plans_path, char** summary_json) {
    return guarded([&] {
        require(harness != nullptr, "harness");
        require(out_plans_path != nullptr, "out_plans_path");
        auto config = apply_overrides(harness->config, parse_options(options_json));
        auto summary = stage_generate(config, out_plans_path);
        if (summary_json) *summary_json = dup_string(summary.dump());
    });
}

pdsp_status pdsp_enumerate(pdsp_harness* harness, const char* plans_path, const char* options_json,
                           const char* out_plans_path, char** summary_json) {
    return guarded([&] {
        require(harness != nullptr, "harness");
        require(plans_path != nullptr, "plans_path");
        require(out_plans_path != nullptr, "out_plans_path");
        auto config = apply_overrides(harness->config, parse_options(options_json));
        auto summary = stage_enumerate(config, plans_path, out_plans_path);
        if (summary_json) *summary_json = dup_string(summary.dump());
    });
}

pdsp_status pdsp_run(pdsp_harness* harness, const char* plans_path, const char* options_json,
                     const char* corpus_path, char** summary_json) {
    return guarded([&] {
        require(harness != nullptr, "harness");
        require(plans_path != nullptr, "plans_path");
        require(corpus_path != nullptr, "corpus_path");
        auto config = apply_overrides(harness->config, parse_options(options_json));
        auto summary = stage_run(config, plans_path, corpus_path);
        if (summary_json) *summary_json = dup_string(summary.dump());
    });
}

pdsp_status pdsp_report(pdsp_harness* harness, const char* corpus_path, const char* group_by,
                        char** csv) {
    return guarded([&] {
        require(harness != nullptr, "harness");
        require(corpus_path != nullptr, "corpus_path");
        require(csv != nullptr, "csv");
        std::vector<std::string> keys;
        if (group_by && *group_by) {
            std::string spec(group_by);
            std::size_t pos = 0;
            while (pos != std::string::npos) {
                auto comma = spec.find(',', pos);
                keys.push_back(spec.substr(pos, comma == std::string::npos ? comma : comma - pos));
                pos = comma == std::string::npos ? comma : comma + 1;
            }
        }
        *csv = dup_string(stage_report(harness->config, corpus_path, keys));
    });
}

pdsp_status pdsp_corpus_export(pdsp_harness* harness, const char* corpus_path, char** csv) {
    return guarded([&] {
        require(harness != nullptr, "harness");
        require(corpus_path != nullptr, "corpus_path");
        require(csv != nullptr, "csv");
        *csv = dup_string(stage_corpus_export(corpus_path));
    });
}

pdsp_status pdsp_train(pdsp_harness* harness, const char* corpus_path, const char* options_json,
                       const char* model_out_path, char** summary_json) {
    return guarded([&] {
        require(harness != nullptr, "harness");
        require(corpus_path != nullptr, "corpus_path");
        require(model_out_path != nullptr, "model_out_path");
        auto config = apply_overrides(harness->config, parse_options(options_json));
        auto summary = stage_train(config, corpus_path, model_out_path);
        if (summary_json) *summary_json = dup_string(summary.dump());
    });
}

pdsp_status pdsp_evaluate(pdsp_harness* harness, const char* model_path, const char* corpus_path,
                          const char* options_json, int test_subset_only, char** csv) {
    return guarded([&] {
        require(harness != nullptr, "harness");
        require(model_path != nullptr, "model_path");
        require(corpus_path != nullptr, "corpus_path");
        require(csv != nullptr, "csv");
        auto config = apply_overrides(harness->config, parse_options(options_json));
        *csv = dup_string(stage_evaluate(config, model_path, corpus_path, test_subset_only != 0));
    });
}

pdsp_status pdsp_compare_strategies(pdsp_harness* harness, const char* const* strategies,
                                    const char* const* corpus_paths, size_t n,
                                    const char* options_json, char** csv) {
    return guarded([&] {
        require(harness != nullptr, "harness");
        require(strategies != nullptr, "strategies");
        require(corpus_paths != nullptr, "corpus_paths");
        require(csv != nullptr, "csv");
        auto config = apply_overrides(harness->config, parse_options(options_json));
        std::vector<std::pair<std::string, std::string>> pairs;
        for (size_t i = 0; i < n; ++i) {
            require(strategies[i] != nullptr, "strategies[i]");
            require(corpus_paths[i] != nullptr, "corpus_paths[i]");
            pairs.push_back({strategies[i], corpus_paths[i]});
        }
        *csv = dup_string(stage_compare(config, pairs));
    });
}

pdsp_status pdsp_pipeline(pdsp_harness* harness, const char* options_json, const char* out_dir,
                          char** summary_json) {
    return guarded([&] {
        require(harness != nullptr, "harness");
        require(out_dir != nullptr, "out_dir");
        auto config = apply_overrides(harness->config, parse_options(options_json));
        auto summary = stage_pipeline(config, out_dir);
        if (summary_json) *summary_json = dup_string(summary.dump());
    });
}

pdsp_status pdsp_validate_plans(pdsp_harness* harness, const char* plans_path, char** report_json) {
    return guarded([&] {
        require(harness != nullptr, "harness");
        require(plans_path != nullptr, "plans_path");
        require(report_json != nullptr, "report_json");
        auto plans = read_plan_file(plans_path);
        nlohmann::json report = nlohmann::json::array();
        for (const auto& plan : plans) {
            auto result = validate_plan(plan);
            report.push_back({{"plan", plan.id}, {"ok", result.ok()}, {"violations", result.violations}});
        }
        *report_json = dup_string(report.dump());
    });
}

pdsp_status pdsp_q_error(double truth, double prediction, double* out) {
    return guarded([&] {
        require(out != nullptr, "out");
        *out = q_error(truth, prediction).value;
    });
}

pdsp_status pdsp_parallelism_category(int max_degree, const char** out_name) {
    return guarded([&] {
        require(out_name != nullptr, "out_name");
        *out_name = parallelism_category_name(categorize_parallelism(max_degree));
    });
}

} // extern "C"
