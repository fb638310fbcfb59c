#pragma once

#include <string>

namespace turnpike {

// Full double precision: 17 significant digits, locale independent
// (std::to_chars). 17 digits round-trip every IEEE double, and a fixed
// formatter keeps repeated runs byte-identical. All CSV writers use this.
std::string format_double(double x);

}  // namespace turnpike
