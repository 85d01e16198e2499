#pragma once

#include "lop/layout.hpp"

#include <optional>
#include <vector>

namespace lop {

// Wire-block support pattern of an operator. Entry i is the single wire row
// block that input wire block i maps into, or nullopt when column block i is
// entirely zero.
using WirePattern = std::vector<std::optional<int>>;

// Computes the wire-block support pattern of `k`, which maps the joint space
// of in_layout to the joint space of out_layout. Returns nullopt when some
// input wire block has support on two or more output wire blocks (the
// operator then cannot be written as sum_i |f(i)><i|_W (x) E(i)).
std::optional<WirePattern> kraus_wire_pattern(const ComplexMatrix& k,
                                              const SystemLayout& in_layout,
                                              const SystemLayout& out_layout,
                                              double threshold = tol::pattern);

// Pattern plus the per-wire-label quantum blocks E(i) of the decomposition
// k = sum_i |pattern[i]><i|_W (x) blocks[i].
struct WireBlockDecomposition {
  WirePattern pattern;
  std::vector<ComplexMatrix> blocks;  // zero matrix where pattern is nullopt
};
std::optional<WireBlockDecomposition> wire_block_decompose(
    const ComplexMatrix& k, const SystemLayout& in_layout,
    const SystemLayout& out_layout, double threshold = tol::pattern);

// True iff every input wire block of `k` (square, on `layout`) has support
// on at most one output wire block.
bool is_iqo_kraus(const ComplexMatrix& k, const SystemLayout& layout,
                  double threshold = tol::pattern);

// Membership of a channel in the nested operation classes. The chain
// pio => sio => iqo holds for every input:
//   iqo  every Kraus operator passes is_iqo_kraus
//   sio  additionally, each Kraus operator's wire pattern is injective
//   pio  additionally, all Kraus operators share one wire pattern (their
//        partial patterns merge into a single injective map)
struct ChannelClass {
  bool pio = false;
  bool sio = false;
  bool iqo = false;
};
ChannelClass classify_channel(const QuantumChannel& ch,
                              const SystemLayout& layout,
                              double threshold = tol::pattern);

// Largest magnitude among entries whose wire digits differ between row and
// column — the part a wire dephasing would remove.
double wire_offdiagonal_weight(const ComplexMatrix& m,
                               const SystemLayout& layout);

// Transposes the flagged tensor factors of a square operator.
ComplexMatrix partial_transpose(const ComplexMatrix& m,
                                const std::vector<int>& dims,
                                const std::vector<bool>& transposed);

// True iff rho is wire-diagonal within `tolerance`. With check_separability
// set and at least two quantum registers, additionally requires every
// conditional quantum block to have positive partial transpose across every
// bipartition of the quantum registers — a necessary separability criterion
// (full separability testing is intractable), so a true verdict means
// "free up to the PPT relaxation".
bool is_cq_state(const DensityMatrix& rho, const SystemLayout& layout,
                 bool check_separability = false,
                 double tolerance = tol::structural);

}  // namespace lop
