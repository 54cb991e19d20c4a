#pragma once

#include <string>
#include <vector>

#include "harness/config.hpp"

namespace pdsp {

// Pipeline stages behind the CLI and the C API (the controller role).
// Each stage takes the harness config plus a JSON object of overrides
// (seed, count, structures, cluster, mode, strategy knobs) and returns a
// JSON summary; CSV-producing stages return the CSV text.

// Merge stage overrides into a copy of the config. Unknown keys are errors.
HarnessConfig apply_overrides(const HarnessConfig& base, const nlohmann::json& overrides);

nlohmann::json stage_generate(const HarnessConfig& config, const std::string& out_plans_path);

nlohmann::json stage_enumerate(const HarnessConfig& config, const std::string& plans_in,
                               const std::string& plans_out);

nlohmann::json stage_run(const HarnessConfig& config, const std::string& plans_path,
                         const std::string& corpus_path);

std::string stage_report(const HarnessConfig& config, const std::string& corpus_path,
                         const std::vector<std::string>& group_by);

std::string stage_corpus_export(const std::string& corpus_path);

nlohmann::json stage_train(const HarnessConfig& config, const std::string& corpus_path,
                           const std::string& model_out_path);

std::string stage_evaluate(const HarnessConfig& config, const std::string& model_path,
                           const std::string& corpus_path, bool test_subset_only);

std::string stage_compare(const HarnessConfig& config,
                          const std::vector<std::pair<std::string, std::string>>& strategy_corpora);

// generate -> enumerate -> run -> split -> train (all configured models) ->
// evaluate -> compare-strategies; writes every artifact under out_dir and
// stops at the first failing stage, naming it.
nlohmann::json stage_pipeline(const HarnessConfig& config, const std::string& out_dir);

extern const char* kReportCsvHeader;

} // namespace pdsp
