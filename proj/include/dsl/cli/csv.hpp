#pragma once

#include <string>
#include <vector>

namespace dsl::cli {

// RFC-4180 field quoting; numbers rendered with %.17g so reruns are
// byte-identical.
std::string csv_escape(const std::string& field);
std::string format_double(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

void write_csv(const CsvTable& table, const std::string& path);

} // namespace dsl::cli
