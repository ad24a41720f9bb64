#include "util/format.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace vessel::util {

std::string shortest(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) value = 0.0;  // drop the sign of -0
  std::array<char, 512> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed);
  return std::string(buf.data(), res.ptr);
}

std::string shortest_min2(double value) {
  std::string s = shortest(value);
  if (!std::isfinite(value)) return s;
  auto dot = s.find('.');
  if (dot == std::string::npos) return s + ".00";
  auto decimals = s.size() - dot - 1;
  if (decimals < 2) s.append(2 - decimals, '0');
  return s;
}

}  // namespace vessel::util
