#include "lop/states.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lop {

DensityMatrix::DensityMatrix(ComplexMatrix m, double tolerance)
    : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) {
    throw std::invalid_argument("DensityMatrix: matrix must be square and non-empty");
  }
  double herm = max_abs(m_ - m_.adjoint());
  if (herm > tolerance) {
    std::ostringstream os;
    os << "DensityMatrix: not Hermitian (deviation " << herm << ")";
    throw std::invalid_argument(os.str());
  }
  double tr_err = std::abs(m_.trace() - Complex(1.0, 0.0));
  if (tr_err > tolerance) {
    std::ostringstream os;
    os << "DensityMatrix: trace differs from 1 by " << tr_err;
    throw std::invalid_argument(os.str());
  }
  HermitianEigen eig = eigen_hermitian((m_ + m_.adjoint()) / 2.0);
  if (eig.values.minCoeff() < -tolerance) {
    std::ostringstream os;
    os << "DensityMatrix: negative eigenvalue " << eig.values.minCoeff();
    throw std::invalid_argument(os.str());
  }
}

PureState::PureState(ComplexMatrix ket, double tolerance)
    : ket_(std::move(ket)) {
  if (ket_.cols() != 1 || ket_.rows() == 0) {
    throw std::invalid_argument("PureState: needs a non-empty column vector");
  }
  double norm_err = std::abs(ket_.norm() - 1.0);
  if (norm_err > tolerance) {
    std::ostringstream os;
    os << "PureState: norm differs from 1 by " << norm_err;
    throw std::invalid_argument(os.str());
  }
}

DensityMatrix PureState::density() const {
  return DensityMatrix(ket_ * ket_.adjoint());
}

double state_fidelity(const PureState& psi, const DensityMatrix& rho) {
  if (psi.dim() != rho.dim()) {
    throw std::invalid_argument("state_fidelity: dimension mismatch");
  }
  Complex v = (psi.ket().adjoint() * rho.matrix() * psi.ket())(0, 0);
  return v.real();
}

PureState max_coherent_state(int dim) {
  ComplexMatrix ket = ComplexMatrix::Constant(dim, 1, 1.0 / std::sqrt(double(dim)));
  return PureState(ket);
}

}  // namespace lop
