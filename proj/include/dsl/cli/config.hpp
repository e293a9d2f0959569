#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dsl/errors.hpp"

namespace dsl::cli {

struct ConfigValue {
    std::string text;
    int line = 0;
};

using Section = std::map<std::string, ConfigValue>;

// INI-style run configuration: `[section]` headers, `key = value` entries,
// `#` comment lines. The layout per command is documented in docs/config.md.
struct ConfigFile {
    std::string path;
    std::map<std::string, Section> sections;

    bool has(const std::string& section, const std::string& key) const;
    const ConfigValue& at(const std::string& section, const std::string& key) const;
};

ConfigFile parse_config(const std::string& path);
ConfigFile parse_config_text(const std::string& text, const std::string& label);

// Value parsers; every error message carries file, line and field.
double parse_double(const ConfigFile& cfg, const std::string& section, const std::string& key);
std::uint64_t parse_u64(const ConfigFile& cfg, const std::string& section,
                        const std::string& key);
int parse_int(const ConfigFile& cfg, const std::string& section, const std::string& key);

// "1, 2, 3", a single number, or "linspace(a, b, n)".
std::vector<double> parse_range(const ConfigFile& cfg, const std::string& section,
                                const std::string& key);
std::vector<std::string> parse_list(const ConfigFile& cfg, const std::string& section,
                                    const std::string& key);

// FNV-1a over the canonicalized (sorted sections/keys, trimmed values)
// content; stamped into every output row for provenance.
std::uint64_t config_hash(const ConfigFile& cfg);

} // namespace dsl::cli
