#pragma once

#include <string>

namespace cifeast {

/// Shortest-safe decimal form with 17 significant digits; parses back to the
/// identical double. Infinities and NaN come out as `inf`, `-inf`, `nan`.
std::string format_double(double value);

}  // namespace cifeast
