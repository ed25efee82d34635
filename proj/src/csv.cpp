#include "rtpsim/csv.hpp"

#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rtpsim/errors.hpp"

namespace rtpsim {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

csv_document parse_csv(const std::string& text, const std::string& origin) {
  csv_document doc;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      doc.comments.push_back(t);
      continue;
    }
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      std::size_t comma = t.find(',', start);
      if (comma == std::string::npos) {
        cells.push_back(trim(t.substr(start)));
        break;
      }
      cells.push_back(trim(t.substr(start, comma - start)));
      start = comma + 1;
    }
    doc.rows.push_back(std::move(cells));
  }
  if (doc.rows.empty()) {
    throw_error(errc::parse_error, origin + ": no data rows");
  }
  return doc;
}

csv_document read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_error(errc::parse_error, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), path);
}

double cell_as_double(const std::string& cell, const std::string& context) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0' || errno == ERANGE) {
    throw_error(errc::parse_error, context + ": bad number '" + cell + "'");
  }
  return v;
}

long cell_as_long(const std::string& cell, const std::string& context) {
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(cell.c_str(), &end, 10);
  if (end == cell.c_str() || *end != '\0' || errno == ERANGE) {
    throw_error(errc::parse_error, context + ": bad integer '" + cell + "'");
  }
  return v;
}

std::optional<std::string> comment_value(const csv_document& doc,
                                         const std::string& key) {
  const std::string needle = key + "=";
  for (const std::string& c : doc.comments) {
    // Comments are '#'-prefixed; search after the hash.
    std::size_t pos = c.find(needle);
    if (pos != std::string::npos) {
      return trim(c.substr(pos + needle.size()));
    }
  }
  return std::nullopt;
}

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  (void)ec;
  return std::string(buf, ptr);
}

std::string join_csv(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  return out;
}

}  // namespace rtpsim
