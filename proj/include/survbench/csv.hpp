#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace survbench::csv {

// Whole-file reader with RFC 4180 quoting; empty trailing line ignored.
std::vector<std::vector<std::string>> read_file(const std::string& path);

// Round-trip formatting for report/data files ("" encodes a missing cell).
std::string format(double v);

std::string escape(const std::string& field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Strict double parse of a whole field; nullopt for an empty field.
std::optional<double> parse_double(const std::string& field, const std::string& context);

}  // namespace survbench::csv
