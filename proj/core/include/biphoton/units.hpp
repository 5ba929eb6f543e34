#pragma once

#include <string>

namespace biphoton::units {

// Everything internal is SI: lengths in meters, angles in radians.
// Config files may write "0.13mm", "916nm", "4m", "5mrad" or plain numbers
// (already SI). Parsers accept an optional suffix after a decimal literal.

double parse_length(const std::string& text); // nm, um, mm, cm, m
double parse_angle(const std::string& text);  // rad, mrad, urad, deg

// Shortest round-trip decimal form, identical across runs (std::to_chars).
std::string format_double(double v);

} // namespace biphoton::units
