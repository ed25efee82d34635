#pragma once

#include <optional>
#include <string>
#include <vector>

namespace rtpsim {

// Minimal delimited-text support: comma-separated cells, '#' comment lines,
// first non-comment row is the header. Shortest-round-trip formatting keeps
// output bytes identical across runs and platforms.
struct csv_document {
  std::vector<std::string> comments;           // '#'-prefixed lines, verbatim
  std::vector<std::vector<std::string>> rows;  // includes the header row
};

csv_document read_csv_file(const std::string& path);
csv_document parse_csv(const std::string& text, const std::string& origin);

double cell_as_double(const std::string& cell, const std::string& context);
long cell_as_long(const std::string& cell, const std::string& context);

// Looks for "key=value" inside the document's comment lines (e.g. a line
// "#v0_volts=12500").
std::optional<std::string> comment_value(const csv_document& doc,
                                         const std::string& key);

// Shortest decimal string that round-trips to the same double.
std::string format_double(double x);

std::string join_csv(const std::vector<std::string>& cells);

}  // namespace rtpsim
