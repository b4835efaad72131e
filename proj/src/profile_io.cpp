#include "deconv/profile_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "deconv/error.hpp"

namespace deconv {

ShapeProfile::ShapeProfile(std::vector<double> values)
    : values_(std::move(values)) {
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw InvalidArgument("ShapeProfile: reactivities must be finite");
    }
  }
}

std::string format_significant(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  return buf;
}

void write_profile_csv(std::ostream& out, const ShapeProfile& profile) {
  out << "index,reactivity\n";
  for (std::size_t i = 0; i < profile.size(); ++i) {
    out << i << ',' << format_significant(profile[i], 9) << '\n';
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

ShapeProfile read_profile_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "index,reactivity") {
    throw ParseError("profile CSV: expected header 'index,reactivity'");
  }
  std::vector<double> values;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    if (comma == std::string_view::npos) {
      throw ParseError("profile CSV line " + std::to_string(line_no) + ": missing comma");
    }
    const std::string_view idx_text = trim(row.substr(0, comma));
    const std::string index_str(idx_text);
    const std::string value_str(trim(row.substr(comma + 1)));

    std::size_t index = 0;
    const auto [iptr, iec] =
        std::from_chars(index_str.data(), index_str.data() + index_str.size(), index);
    if (iec != std::errc{} || iptr != index_str.data() + index_str.size()) {
      throw ParseError("profile CSV line " + std::to_string(line_no) + ": bad index");
    }
    if (index != values.size()) {
      throw ParseError("profile CSV line " + std::to_string(line_no) +
                       ": expected index " + std::to_string(values.size()));
    }
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(value_str, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value_str.size() || !std::isfinite(value)) {
      throw ParseError("profile CSV line " + std::to_string(line_no) + ": bad reactivity");
    }
    values.push_back(value);
  }
  if (values.empty()) throw ParseError("profile CSV: no rows");
  return ShapeProfile(std::move(values));
}

ShapeProfile read_profile_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open profile CSV '" + path + "'");
  return read_profile_csv(in);
}

}  // namespace deconv
