#include "lop/matrix.hpp"

#include <stdexcept>

namespace lop {

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix dagger(const ComplexMatrix& a) { return a.adjoint(); }

ComplexMatrix identity_matrix(int dim) {
  return ComplexMatrix::Identity(dim, dim);
}

ComplexMatrix zero_matrix(int rows, int cols) {
  return ComplexMatrix::Zero(rows, cols);
}

ComplexMatrix basis_ket(int dim, int index) {
  if (index < 0 || index >= dim) {
    throw std::invalid_argument("basis_ket: index out of range");
  }
  ComplexMatrix v = ComplexMatrix::Zero(dim, 1);
  v(index, 0) = 1.0;
  return v;
}

ComplexMatrix basis_bra(int dim, int index) {
  if (index < 0 || index >= dim) {
    throw std::invalid_argument("basis_bra: index out of range");
  }
  ComplexMatrix v = ComplexMatrix::Zero(1, dim);
  v(0, index) = 1.0;
  return v;
}

double max_abs(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().maxCoeff();
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  }
  return max_abs(a - b);
}

bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b,
                  double tolerance) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         max_abs_diff(a, b) <= tolerance;
}

HermitianEigen eigen_hermitian(const ComplexMatrix& h) {
  if (h.rows() != h.cols()) {
    throw std::invalid_argument("eigen_hermitian: matrix not square");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigen_hermitian: eigensolver failed");
  }
  HermitianEigen out;
  out.values = solver.eigenvalues();
  out.vectors = solver.eigenvectors();
  return out;
}

ComplexMatrix sqrt_psd(const ComplexMatrix& h, double tolerance) {
  HermitianEigen eig = eigen_hermitian(h);
  Eigen::VectorXd roots(eig.values.size());
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    double v = eig.values[k];
    if (v < -tolerance) {
      throw std::invalid_argument("sqrt_psd: matrix has a negative eigenvalue");
    }
    roots[k] = v > 0.0 ? std::sqrt(v) : 0.0;
  }
  return eig.vectors * roots.asDiagonal() * eig.vectors.adjoint();
}

ComplexMatrix pinv_psd(const ComplexMatrix& h, double cutoff) {
  HermitianEigen eig = eigen_hermitian(h);
  Eigen::VectorXd inv(eig.values.size());
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    double v = eig.values[k];
    inv[k] = v > cutoff ? 1.0 / v : 0.0;
  }
  return eig.vectors * inv.asDiagonal() * eig.vectors.adjoint();
}

ComplexMatrix support_projector(const ComplexMatrix& h, double cutoff) {
  HermitianEigen eig = eigen_hermitian(h);
  Eigen::VectorXd mask(eig.values.size());
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    mask[k] = eig.values[k] > cutoff ? 1.0 : 0.0;
  }
  return eig.vectors * mask.asDiagonal() * eig.vectors.adjoint();
}

}  // namespace lop
