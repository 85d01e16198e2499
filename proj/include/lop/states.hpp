#pragma once

#include "lop/matrix.hpp"

namespace lop {

// Validated density matrix: square, Hermitian, unit trace, positive
// semidefinite (all within the given tolerance). Construction throws
// std::invalid_argument naming the violated property.
class DensityMatrix {
 public:
  // The trivial state on a one-dimensional space.
  DensityMatrix() : m_(ComplexMatrix::Identity(1, 1)) {}
  explicit DensityMatrix(ComplexMatrix m, double tolerance = tol::structural);

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }

 private:
  ComplexMatrix m_;
};

// Validated pure state: a normalized column vector.
class PureState {
 public:
  explicit PureState(ComplexMatrix ket, double tolerance = tol::structural);

  int dim() const { return static_cast<int>(ket_.rows()); }
  const ComplexMatrix& ket() const { return ket_; }
  DensityMatrix density() const;

 private:
  ComplexMatrix ket_;
};

// <psi| rho |psi>.
double state_fidelity(const PureState& psi, const DensityMatrix& rho);

// Maximally coherent pure state (1/sqrt(d)) * sum_j |j>.
PureState max_coherent_state(int dim);

}  // namespace lop
