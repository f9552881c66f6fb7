#pragma once

#include <cstdint>
#include <random>

#include "projmod/matrix_ring.hpp"

namespace projmod {

/// Deterministic random source. The uniform double is derived from raw
/// bits, so a given seed yields the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }
  double uniform() {  // [0, 1)
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }
  double symmetric(double magnitude) {
    return (2.0 * uniform() - 1.0) * magnitude;
  }
  Complex disk(double magnitude) {
    return Complex(symmetric(magnitude), symmetric(magnitude));
  }
  int below(int n) { return static_cast<int>(gen_() % n); }

 private:
  std::mt19937_64 gen_;
};

/// Random element supported on |k|_inf <= band, scaled so its norm equals
/// magnitude (matrix kind: dense entries, spectral norm = magnitude).
AlgebraElement random_element(const BackendPtr& backend, int band,
                              double magnitude, Rng& rng);

/// Random n x n matrix with band-limited entries, scaled so that
/// norm(result) = magnitude.
MatrixElement random_matrix(const BackendPtr& backend, int n, int band,
                            double magnitude, Rng& rng);

}  // namespace projmod
