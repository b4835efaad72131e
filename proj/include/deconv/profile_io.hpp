#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "deconv/profile.hpp"

namespace deconv {

/// printf-style %.<digits>g formatting.
std::string format_significant(double value, int digits);

/// Writes `index,reactivity` CSV with a 0-based index and 9 significant
/// digits per reactivity.
void write_profile_csv(std::ostream& out, const ShapeProfile& profile);

/// Reads the format written by write_profile_csv. Indices must run 0, 1, ...
/// in order. Throws ParseError on malformed input.
ShapeProfile read_profile_csv(std::istream& in);
ShapeProfile read_profile_csv_file(const std::string& path);

}  // namespace deconv
