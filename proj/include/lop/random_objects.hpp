#pragma once

#include "lop/channel.hpp"
#include "lop/protocol.hpp"
#include "lop/rng.hpp"
#include "lop/states.hpp"

#include <vector>

namespace lop {

// Random full-rank density matrix (normalized G G^dag for complex Gaussian
// G). Invariant under unitary conjugation.
DensityMatrix random_density(Rng& rng, int dim);

// Haar-random unit column vector.
ComplexMatrix random_pure_ket(Rng& rng, int dim);

// Random channel from a Haar-random Stinespring isometry sliced into
// `kraus_count` Kraus operators. Trace preservation is exact up to
// orthonormalization error (~1e-15).
QuantumChannel random_cptp(Rng& rng, int dim_in, int dim_out,
                           int kraus_count);

// Random instrument whose every Kraus operator is basis-aligned: each maps
// basis kets to (possibly coinciding) basis kets with one amplitude per
// input label, K_a = sum_i c_{a,i} |f_a(i)><i| for partial label maps f_a.
// The label maps mix permutation-like, many-to-one, and partial shapes, and
// the amplitudes are drawn so that sum_a K_a^dag K_a = 1 holds exactly.
// Requires kraus_count >= dim.
std::vector<ComplexMatrix> random_iqo_kraus(Rng& rng, int dim,
                                            int kraus_count);

struct RandomTreeConfig {
  int max_depth = 5;     // operations along any root-to-leaf path
  int max_wire_dim = 4;  // dimension cap for initial wire registers
  int max_outcomes = 3;  // fan-out cap for instruments
  int max_total_dim = 72;  // joint-dimension budget for the running layout
  bool uniform = false;  // every outcome continues with the same subtree
  bool bipartite = false;  // quantum registers carry q1_/q2_ party prefixes
};

struct RandomProtocol {
  ProtocolTree tree;
  SystemLayout layout;  // initial layout the tree acts on
};

// Random protocol tree over a random small initial layout. Draws each node's
// operation from all four kinds (plus wire preparation), subject to the
// layout actually supporting it and the dimension budget. With `bipartite`
// set, instruments touch one party only and forward targets carry a party
// prefix, so the result is a valid input for translate_to_locc.
RandomProtocol random_protocol(Rng& rng, const RandomTreeConfig& config);

// One random operation applicable to the given layout (used for monotone
// spot checks). Never grows the joint dimension beyond max_total_dim.
ElementalOp random_elemental(Rng& rng, const SystemLayout& layout,
                             int max_total_dim = 72);

}  // namespace lop
