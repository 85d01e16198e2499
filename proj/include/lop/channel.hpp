#pragma once

#include "lop/states.hpp"

#include <vector>

namespace lop {

// Kraus representation of a completely positive map. Kraus operators may be
// rectangular (out_dim x in_dim). Trace preservation is *recorded* rather
// than enforced: sub-normalized branch maps are legal, and
// completeness_defect() reports how far sum K^dag K is from the identity.
class QuantumChannel {
 public:
  explicit QuantumChannel(std::vector<ComplexMatrix> kraus);

  int in_dim() const { return in_dim_; }
  int out_dim() const { return out_dim_; }
  int kraus_count() const { return static_cast<int>(kraus_.size()); }
  const std::vector<ComplexMatrix>& kraus() const { return kraus_; }

  double completeness_defect() const { return defect_; }
  bool is_trace_preserving(double tolerance = tol::structural) const {
    return defect_ <= tolerance;
  }

 private:
  std::vector<ComplexMatrix> kraus_;
  int in_dim_ = 0;
  int out_dim_ = 0;
  double defect_ = 0.0;
};

// sum_k K rho K^dag, validated as a density matrix. Requires a
// trace-preserving channel; use apply_channel_raw for sub-normalized maps.
DensityMatrix apply_channel(const QuantumChannel& ch, const DensityMatrix& rho);
// Same sum without any validation or normalization of the result.
ComplexMatrix apply_channel_raw(const QuantumChannel& ch,
                                const ComplexMatrix& rho);

// Channel fingerprint C = sum_{ij} E_ij (x) Lambda(E_ij), where E_ij runs
// over the matrix units of the input space. Two channels with equal
// fingerprints act identically.
ComplexMatrix choi_of(const QuantumChannel& ch);
// Largest entrywise deviation between two fingerprints.
double choi_distance(const ComplexMatrix& a, const ComplexMatrix& b);

// second AFTER first.
QuantumChannel compose(const QuantumChannel& second,
                       const QuantumChannel& first);

// Discards the factors not in `keep` from the channel output. `dims` factors
// the output space (row-major, first factor slowest); `keep` lists kept
// factor positions in ascending order. Implemented on the Kraus operators, so
// it is exact and cheap.
QuantumChannel trace_out_channel(const QuantumChannel& ch,
                                 const std::vector<int>& dims,
                                 const std::vector<int>& keep);

// von Neumann entropy, base 2; eigenvalues below tol::eigenvalue_floor are
// treated as exact zeros.
double entropy(const DensityMatrix& rho);

// Relative entropy S(a||b), base 2. Returns +infinity when the support of a
// is not contained in the support of b.
double relative_entropy(const DensityMatrix& a, const DensityMatrix& b);

// Partial trace over a tensor factorization. `dims` gives the factor
// dimensions (first factor slowest); `keep` lists the factor positions that
// survive, in ascending order.
DensityMatrix partial_trace(const DensityMatrix& rho,
                            const std::vector<int>& dims,
                            const std::vector<int>& keep);
ComplexMatrix partial_trace_raw(const ComplexMatrix& m,
                                const std::vector<int>& dims,
                                const std::vector<int>& keep);

// Zeroes every entry whose multi-index differs on at least one of the factors
// flagged in `is_wire`; the flagged factors form the incoherent basis.
ComplexMatrix dephase_raw(const ComplexMatrix& m, const std::vector<int>& dims,
                          const std::vector<bool>& is_wire);

}  // namespace lop
