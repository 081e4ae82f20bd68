#include "dlp/numerics.hpp"

#include <array>
#include <charconv>

namespace dlp {

std::string format_double(double x) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

}  // namespace dlp
