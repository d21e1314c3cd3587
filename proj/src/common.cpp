#include "tweetforge/common.hpp"

#include <charconv>
#include <cmath>

namespace tweetforge {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (v == 0.0) return "0";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace tweetforge
