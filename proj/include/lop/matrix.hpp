#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace lop {

using Complex = std::complex<double>;

// Dense complex matrix. Row-major so the in-memory layout matches the
// serialized row-major element order.
using ComplexMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Central numerical tolerances. Keeping them in one place makes every check
// that relies on them consistent across the library and the test suites.
namespace tol {
// Structural checks: hermiticity, positivity, CPTP completeness, channel
// equality via Choi fingerprints.
inline constexpr double structural = 1e-9;
// Frozen-value oracles and exact analytic identities.
inline constexpr double oracle = 1e-12;
// Support-pattern detection on Kraus operators (an entry below this counts
// as an exact zero of the sparsity pattern).
inline constexpr double pattern = 1e-10;
// Spectral cutoff for pseudo-inverses of positive semidefinite matrices.
inline constexpr double pinv_cutoff = 1e-10;
// Branches with probability below this are dropped (and reported) when a
// protocol is executed exhaustively.
inline constexpr double branch_prune = 1e-14;
// Eigenvalues below this are treated as exact zeros inside entropies.
inline constexpr double eigenvalue_floor = 1e-12;
}  // namespace tol

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix dagger(const ComplexMatrix& a);
ComplexMatrix identity_matrix(int dim);
ComplexMatrix zero_matrix(int rows, int cols);
// Column vector |index> of the given dimension.
ComplexMatrix basis_ket(int dim, int index);
// Row vector <index| of the given dimension.
ComplexMatrix basis_bra(int dim, int index);

double max_abs(const ComplexMatrix& a);
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b,
                  double tolerance);

// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
struct HermitianEigen {
  Eigen::VectorXd values;
  ComplexMatrix vectors;  // column k is the eigenvector of values[k]
};
HermitianEigen eigen_hermitian(const ComplexMatrix& h);

// Positive-semidefinite square root of a Hermitian PSD matrix. Slightly
// negative eigenvalues within `tolerance` are clamped to zero.
ComplexMatrix sqrt_psd(const ComplexMatrix& h,
                       double tolerance = tol::structural);

// Moore-Penrose pseudo-inverse of a Hermitian PSD matrix; eigenvalues below
// `cutoff` are treated as exact zeros.
ComplexMatrix pinv_psd(const ComplexMatrix& h,
                       double cutoff = tol::pinv_cutoff);

// Projector onto the support (range) of a Hermitian PSD matrix, with the
// same spectral cutoff convention as pinv_psd.
ComplexMatrix support_projector(const ComplexMatrix& h,
                                double cutoff = tol::pinv_cutoff);

}  // namespace lop
