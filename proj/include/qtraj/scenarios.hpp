#pragma once

#include "json.hpp"

#include <string>
#include <vector>

namespace qtraj {

struct Scenario {
    std::string name;
    std::string description;
    // Configuration sections this scenario fills in; user sections are
    // merged over them key by key.
    nlohmann::json defaults;
};

const std::vector<Scenario>& scenario_registry();
const Scenario* find_scenario(const std::string& name);

}  // namespace qtraj
