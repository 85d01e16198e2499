#pragma once

#include "lop/layout.hpp"
#include "lop/states.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lop {

// Resource quantifiers for wire coherence and the entanglement it can buy.
// All entropic values are in bits and clamped at 0 against roundoff.

struct MonotoneReport {
  double rel_ent_coherence = 0.0;
  double l1_coherence = 0.0;
  // Entanglement entropy across the wires-vs-quantum cut; present only for
  // pure inputs on layouts with both kinds of register.
  std::optional<double> ent_entropy_pure;
  // Marginal-based lower bound; present when the layout has at least one
  // quantum register next to the wires.
  std::optional<double> eq2_lower_bound;
};

// S(dephase(rho)) - S(rho): the entropy produced by erasing all coherence
// between wire levels. Equals the minimum relative entropy to the
// wire-incoherent states. Requires at least one wire register.
double rel_ent_coherence(const DensityMatrix& rho, const SystemLayout& layout);

// Sum of the magnitudes of every entry that wire dephasing erases (both
// halves of each conjugate pair). Zero exactly on the wire-incoherent
// states. Requires at least one wire register.
double l1_coherence(const DensityMatrix& rho, const SystemLayout& layout);

// Entanglement entropy of a pure state across the bipartition (side |
// complement): the von Neumann entropy of the reduced state on `side`.
// Throws std::invalid_argument if rho is not pure within tolerance or if
// `side` is empty or covers the whole layout.
double ent_entropy_pure(const DensityMatrix& rho, const SystemLayout& layout,
                        const std::vector<std::string>& side,
                        double tolerance = tol::structural);
double ent_entropy_pure(const PureState& psi, const SystemLayout& layout,
                        const std::vector<std::string>& side);

// max(coherence of the wire marginal, entanglement of the quantum marginal).
// The entanglement term enters only when it is computable: the quantum
// marginal must be pure, and only the two-register cut has a closed form
// (one register contributes 0; three or more are skipped, leaving the
// coherence term as the bound). Requires at least one wire register.
double eq2_lower_bound(const DensityMatrix& rho, const SystemLayout& layout);

// Everything above bundled for one state.
MonotoneReport monotone_report(const DensityMatrix& rho,
                               const SystemLayout& layout);

// Cost comparison of the two n-qubit target families. ree values are the
// relative entropies of entanglement (the GHZ value measured as its cut
// entropy, the W value in closed form); input coherences are measured on
// the canonical wire inputs; cut entropies are single-qubit-vs-rest
// reductions. The conversion verdicts follow from comparing them: a state
// cannot reach a target that needs strictly more of either quantity.
struct GhzWCostTable {
  int n = 0;
  double ghz_ree = 0.0;
  double w_ree = 0.0;               // (n-1) log2(n / (n-1))
  double ghz_input_coherence = 0.0;
  double w_input_coherence = 0.0;   // log2(n)
  double ghz_cut_entropy = 0.0;
  double w_cut_entropy = 0.0;       // binary entropy of 1/n
  bool ghz_to_w = false;
  bool w_to_ghz = false;
};

GhzWCostTable ghz_w_cost_table(int n);  // requires n >= 3

}  // namespace lop
