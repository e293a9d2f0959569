#pragma once

#include <string>
#include <vector>

#include "dsl/cli/config.hpp"

namespace dsl::cli {

// One canned configuration per paper panel; every config round-trips
// through the parser and runs at desk scale.
struct Recipe {
    std::string name;
    std::string command;
    std::string description;
    std::string config_text;

    ConfigFile parsed() const { return parse_config_text(config_text, "recipe:" + name); }
};

const std::vector<Recipe>& figure_recipes();
const Recipe& find_recipe(const std::string& name);

} // namespace dsl::cli
