#include "turnpike/io.hpp"

#include <charconv>
#include <system_error>

namespace turnpike {

std::string format_double(double x) {
  char buf[64];
  // Shortest string that parses back to exactly x.
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace turnpike
