#include "dsl/cli/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "dsl/errors.hpp"

namespace dsl::cli {

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const CsvTable& table, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("write_csv: cannot open " + path);
    auto line = [&f](const std::vector<std::string>& fields) {
        for (size_t i = 0; i < fields.size(); ++i) {
            if (i) f << ',';
            f << csv_escape(fields[i]);
        }
        f << "\r\n";
    };
    line(table.header);
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size())
            throw DimensionError("write_csv: row width differs from header");
        line(row);
    }
    if (!f) throw ConfigError("write_csv: write failed for " + path);
}

} // namespace dsl::cli
