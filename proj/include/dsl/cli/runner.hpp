#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dsl/cli/config.hpp"

namespace dsl::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kSchemaVersion = "1";

struct RunOptions {
    std::string command;
    std::string config_path;            // ignored if config is preloaded
    std::optional<ConfigFile> config;   // used by recipes and tests
    std::optional<std::uint64_t> seed;  // CLI overrides of the [run] section
    std::optional<int> workers;
    std::optional<std::string> out_dir;
};

// Exit status: 0 clean, 1 when any grid point failed (recorded as NaN rows
// plus run.failures.json), 2 on usage or config errors (nothing written).
int run(const RunOptions& opts);

const std::vector<std::string>& command_names();

} // namespace dsl::cli
