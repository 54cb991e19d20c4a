#pragma once

#include <string>
#include <vector>

#include "dataflow/types.hpp"

namespace pdsp {

struct ValidationReport {
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
    std::string joined() const;
};

// Structural and semantic plan checks. Violations are data, not failures:
// this never throws on a malformed plan, it reports every broken invariant
// with the offending operator or edge id.
ValidationReport validate_plan(const QueryPlan& plan);

// Throws Error(InvalidArgument) carrying the violation list when not ok.
void require_valid(const QueryPlan& plan);

} // namespace pdsp
