#pragma once

#include <string>
#include <vector>

#include "workload/generator.hpp"

namespace pdsp {

struct ApplicationInfo {
    std::string code;
    std::string name;
    int variants; // multi-query applications instantiate one plan per sub-query
};

const std::vector<ApplicationInfo>& application_registry();

} // namespace pdsp
