#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "dataflow/types.hpp"

namespace pdsp {

// Plans travel as line-delimited JSON records with stable field names:
// id, structure_tag, operators[], edges[], streams{}, notes[]. Field order is
// irrelevant on input; unknown fields are rejected.
nlohmann::json plan_to_json(const QueryPlan& plan);
QueryPlan plan_from_json(const nlohmann::json& j);

std::string plan_to_line(const QueryPlan& plan);
QueryPlan plan_from_line(const std::string& line);

void write_plan_file(const std::string& path, const std::vector<QueryPlan>& plans);
std::vector<QueryPlan> read_plan_file(const std::string& path);

nlohmann::json stream_spec_to_json(const StreamSpec& s);
StreamSpec stream_spec_from_json(const nlohmann::json& j);

nlohmann::json value_to_json(const Value& v);
Value value_from_json(const nlohmann::json& j);

} // namespace pdsp
