#pragma once

#include "lop/channel.hpp"
#include "lop/states.hpp"

#include <vector>

namespace lop {

// A four-Kraus qutrit channel that is basis-aligned on the wire (every
// Kraus operator maps each basis column into a single row) yet cannot be
// written with the operator products any wire-side protocol factors into.
// The obstruction certificate checks the numerical premises of that
// argument; it does not decide membership for arbitrary channels.

QuantumChannel build_counterexample();

struct RigidityEntry {
  int s = 0;        // 1-based Kraus labels, matching K1..K4
  int s_prime = 0;
  bool rigid = false;
};

struct ObstructionCertificate {
  bool cptp_ok = false;       // completeness within tolerance
  bool iqo_ok = false;        // every Kraus operator is basis-aligned
  bool k4_rank_one = false;   // the last operator's Gram matrix has rank 1
  // For each pair s < s', some column carries nonzero entries of the two
  // operators in distinct rows, so no nontrivial combination of them is
  // basis-aligned.
  std::vector<RigidityEntry> pairwise_rigidity;
  bool verdict = false;       // conjunction of everything above
};

ObstructionCertificate certify_not_lop(const QuantumChannel& ch);

// Success probability of the heralded 1/d-rate run of `ch` as a wire
// channel (d = 3 here), measured by executing the stochastic protocol on
// the given input. The rate is input-independent; the single-argument form
// uses the maximally mixed input.
double stochastic_rate_check(const QuantumChannel& ch,
                             const DensityMatrix& rho);
double stochastic_rate_check(const QuantumChannel& ch);

}  // namespace lop
