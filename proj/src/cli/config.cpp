#include "dsl/cli/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dsl::cli {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

[[noreturn]] void fail(const std::string& path, int line, const std::string& what) {
    throw ConfigError(path + ":" + std::to_string(line) + ": " + what);
}

[[noreturn]] void fail_field(const ConfigFile& cfg, const std::string& section,
                             const std::string& key, int line, const std::string& what) {
    throw ConfigError(cfg.path + ":" + std::to_string(line) + ": [" + section + "] " + key +
                      ": " + what);
}

double to_double(const ConfigFile& cfg, const std::string& section, const std::string& key,
                 const std::string& text, int line) {
    try {
        size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing characters");
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite");
        return v;
    } catch (const std::exception&) {
        fail_field(cfg, section, key, line, "expected a number, got '" + text + "'");
    }
}

} // namespace

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    const auto s = sections.find(section);
    return s != sections.end() && s->second.count(key) > 0;
}

const ConfigValue& ConfigFile::at(const std::string& section, const std::string& key) const {
    const auto s = sections.find(section);
    if (s == sections.end()) throw ConfigError(path + ": missing section [" + section + "]");
    const auto k = s->second.find(key);
    if (k == s->second.end())
        throw ConfigError(path + ": missing key '" + key + "' in section [" + section + "]");
    return k->second;
}

ConfigFile parse_config_text(const std::string& text, const std::string& label) {
    ConfigFile cfg;
    cfg.path = label;
    std::istringstream in(text);
    std::string line;
    std::string current;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') fail(label, lineno, "unterminated section header");
            current = trim(t.substr(1, t.size() - 2));
            if (current.empty()) fail(label, lineno, "empty section name");
            cfg.sections[current]; // sections may legitimately be empty
            continue;
        }
        const size_t eq = t.find('=');
        if (eq == std::string::npos) fail(label, lineno, "expected 'key = value'");
        if (current.empty()) fail(label, lineno, "key outside any [section]");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) fail(label, lineno, "empty key");
        if (cfg.sections[current].count(key))
            fail(label, lineno, "duplicate key '" + key + "' in [" + current + "]");
        cfg.sections[current][key] = ConfigValue{value, lineno};
    }
    return cfg;
}

ConfigFile parse_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config_text(buf.str(), path);
}

double parse_double(const ConfigFile& cfg, const std::string& section, const std::string& key) {
    const ConfigValue& v = cfg.at(section, key);
    return to_double(cfg, section, key, v.text, v.line);
}

std::uint64_t parse_u64(const ConfigFile& cfg, const std::string& section,
                        const std::string& key) {
    const ConfigValue& v = cfg.at(section, key);
    try {
        size_t used = 0;
        const unsigned long long x = std::stoull(v.text, &used);
        if (used != v.text.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        fail_field(cfg, section, key, v.line, "expected an unsigned integer, got '" + v.text + "'");
    }
}

int parse_int(const ConfigFile& cfg, const std::string& section, const std::string& key) {
    const ConfigValue& v = cfg.at(section, key);
    try {
        size_t used = 0;
        const int x = std::stoi(v.text, &used);
        if (used != v.text.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        fail_field(cfg, section, key, v.line, "expected an integer, got '" + v.text + "'");
    }
}

std::vector<double> parse_range(const ConfigFile& cfg, const std::string& section,
                                const std::string& key) {
    const ConfigValue& v = cfg.at(section, key);
    const std::string t = trim(v.text);
    if (t.rfind("linspace", 0) == 0) {
        const size_t open = t.find('(');
        const size_t close = t.rfind(')');
        if (open == std::string::npos || close == std::string::npos || close < open)
            fail_field(cfg, section, key, v.line, "malformed linspace(a, b, n)");
        std::istringstream args(t.substr(open + 1, close - open - 1));
        std::string a, b, n;
        if (!std::getline(args, a, ',') || !std::getline(args, b, ',') || !std::getline(args, n))
            fail_field(cfg, section, key, v.line, "linspace needs three arguments");
        const double lo = to_double(cfg, section, key, trim(a), v.line);
        const double hi = to_double(cfg, section, key, trim(b), v.line);
        const double cnt = to_double(cfg, section, key, trim(n), v.line);
        const int m = static_cast<int>(cnt);
        if (m < 1 || m != cnt) fail_field(cfg, section, key, v.line, "linspace count must be >= 1");
        std::vector<double> out(m);
        for (int i = 0; i < m; ++i)
            out[i] = m == 1 ? lo : lo + (hi - lo) * i / double(m - 1);
        return out;
    }
    std::vector<double> out;
    std::istringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string it = trim(item);
        if (it.empty()) fail_field(cfg, section, key, v.line, "empty list element");
        out.push_back(to_double(cfg, section, key, it, v.line));
    }
    if (out.empty()) fail_field(cfg, section, key, v.line, "empty range");
    return out;
}

std::vector<std::string> parse_list(const ConfigFile& cfg, const std::string& section,
                                    const std::string& key) {
    const ConfigValue& v = cfg.at(section, key);
    std::vector<std::string> out;
    std::istringstream ss(v.text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string it = trim(item);
        if (!it.empty()) out.push_back(it);
    }
    if (out.empty()) fail_field(cfg, section, key, v.line, "empty list");
    return out;
}

std::uint64_t config_hash(const ConfigFile& cfg) {
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= 0x1f;
        h *= 1099511628211ull;
    };
    for (const auto& [name, section] : cfg.sections) {
        mix(name);
        for (const auto& [key, value] : section) {
            mix(key);
            mix(value.text);
        }
    }
    return h;
}

} // namespace dsl::cli
