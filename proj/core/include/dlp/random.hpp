#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace dlp {

/// Mixes a master seed with stream coordinates (path index, cell index, ...)
/// into a 64-bit engine seed. Pure function of its inputs.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> coords);

/// Standard normal variates from a 64-bit Mersenne Twister via the
/// Box-Muller transform. Both outputs of each transform are used.
/// The engine and transform are fully specified, so draws are
/// bit-reproducible across platforms with IEEE doubles and a conforming libm.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double operator()();

  /// Uniform on (0, 1], 53-bit resolution.
  double uniform_open0();

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace dlp
