#pragma once

#include "lop/matrix.hpp"

#include <cstdint>
#include <vector>

namespace lop {

// Deterministic pseudo-random generator with hand-rolled distributions, so
// that a given seed produces the identical stream on every platform and
// standard library. The core is the splitmix64 step, which is more than
// adequate for test-vector generation and Monte-Carlo sampling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 bits of mantissa.
  double uniform();
  // Uniform over {0, ..., bound-1}; bound must be positive.
  int uniform_int(int bound);
  // Standard normal via Box-Muller.
  double normal();
  // Complex Gaussian with independent N(0,1) real and imaginary parts.
  Complex complex_gaussian();

 private:
  std::uint64_t state_;
  bool have_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

// Independent stream for a (seed, index) pair. Used for per-trial Monte-Carlo
// streams: trial k always sees the same numbers no matter how trials are
// scheduled.
Rng substream(std::uint64_t seed, std::uint64_t index);

std::vector<int> random_permutation(int n, Rng& rng);

// Haar-distributed unitary (QR of a complex Ginibre matrix with the phase
// convention that makes the distribution exactly Haar).
ComplexMatrix haar_unitary(int dim, Rng& rng);

// First `cols` columns of a Haar unitary: an isometry V with V^dag V = 1.
ComplexMatrix haar_isometry(int rows, int cols, Rng& rng);

}  // namespace lop
