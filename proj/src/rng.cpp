#include "lop/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lop {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : state_(seed) {
  // Burn one step so that seeds 0 and 1 do not share a prefix.
  (void)splitmix64(state_);
}

std::uint64_t Rng::next_u64() { return splitmix64(state_); }

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

int Rng::uniform_int(int bound) {
  if (bound <= 0) throw std::invalid_argument("uniform_int: bound must be positive");
  // Rejection sampling to avoid modulo bias.
  const std::uint64_t b = static_cast<std::uint64_t>(bound);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % b;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return static_cast<int>(x % b);
}

double Rng::normal() {
  if (have_cached_normal_) {
    have_cached_normal_ = false;
    return cached_normal_;
  }
  // Box-Muller; 1-uniform() keeps the argument of log strictly positive.
  double u1 = 1.0 - uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(theta);
  have_cached_normal_ = true;
  return r * std::cos(theta);
}

Complex Rng::complex_gaussian() {
  double re = normal();
  double im = normal();
  return Complex(re, im);
}

Rng substream(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = seed;
  std::uint64_t mixed_seed = splitmix64(s);
  std::uint64_t t = index ^ 0xA5A5A5A5A5A5A5A5ULL;
  std::uint64_t mixed_index = splitmix64(t);
  return Rng(mixed_seed ^ (mixed_index * 0xFF51AFD7ED558CCDULL + 1));
}

std::vector<int> random_permutation(int n, Rng& rng) {
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int i = n - 1; i > 0; --i) {
    int j = rng.uniform_int(i + 1);
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

ComplexMatrix haar_unitary(int dim, Rng& rng) {
  if (dim <= 0) throw std::invalid_argument("haar_unitary: dim must be positive");
  ComplexMatrix g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      g(i, j) = rng.complex_gaussian();
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Normalize column phases so the distribution is exactly Haar.
  for (int j = 0; j < dim; ++j) {
    Complex d = r(j, j);
    Complex phase = std::abs(d) > 0.0 ? d / std::abs(d) : Complex(1.0, 0.0);
    q.col(j) *= phase;
  }
  return q;
}

ComplexMatrix haar_isometry(int rows, int cols, Rng& rng) {
  if (cols > rows) {
    throw std::invalid_argument("haar_isometry: needs rows >= cols");
  }
  ComplexMatrix u = haar_unitary(rows, rng);
  return u.leftCols(cols);
}

}  // namespace lop
