#pragma once

#include <cstdint>
#include <random>

namespace evglm {

std::uint64_t splitmix64(std::uint64_t x);

/// Seeded stream. Substreams are derived from (seed, stream index) so that
/// chunked Monte Carlo is reproducible for a fixed chunk count.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream = 0);

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  double normal();
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace evglm
