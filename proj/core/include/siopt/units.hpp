#pragma once

#include <string>
#include <string_view>

namespace siopt::units {

// SPICE-style numeric literal: mantissa, optional scale suffix, optional
// trailing unit letters ("840ps", "101.6um", "57.6meg", "1f", "0.165").
// Scale suffixes, case-insensitive: meg=1e6 k=1e3 m=1e-3 u=1e-6 n=1e-9
// p=1e-12 f=1e-15.  Anything non-alphabetic after the suffix is rejected.
double parse_number(std::string_view text);
bool try_parse_number(std::string_view text, double& out);

// Scale factor for a suffix ("meg" -> 1e6); throws ParseError if unknown.
double suffix_scale(std::string_view suffix);

// Shortest decimal string that round-trips to exactly `value`.
std::string render(double value);

// Value rendered in units of `suffix`, e.g. render(840e-12, "p") == "840p".
// parse_number(render(x, s)) recovers x to within a 1-ulp-scaled tolerance.
std::string render(double value, std::string_view suffix);

} // namespace siopt::units
