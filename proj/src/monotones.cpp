#include "lop/monotones.hpp"

#include "lop/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lop {
namespace {

void require_wire(const SystemLayout& layout, const char* who) {
  if (layout.indices_of_kind(RegKind::wire).empty())
    throw std::invalid_argument(std::string(who) +
                                ": layout has no wire register");
}

std::vector<std::string> names_of_kind(const SystemLayout& layout,
                                       RegKind kind) {
  std::vector<std::string> names;
  for (int i : layout.indices_of_kind(kind))
    names.push_back(layout.reg(i).name);
  return names;
}

double purity(const DensityMatrix& rho) {
  return (rho.matrix() * rho.matrix()).trace().real();
}

double clamp0(double v) { return std::max(0.0, v); }

}  // namespace

double rel_ent_coherence(const DensityMatrix& rho,
                         const SystemLayout& layout) {
  require_wire(layout, "rel_ent_coherence");
  if (rho.dim() != layout.total_dim())
    throw std::invalid_argument(
        "rel_ent_coherence: state does not match the layout");
  return clamp0(entropy(dephase(rho, layout)) - entropy(rho));
}

double l1_coherence(const DensityMatrix& rho, const SystemLayout& layout) {
  require_wire(layout, "l1_coherence");
  if (rho.dim() != layout.total_dim())
    throw std::invalid_argument(
        "l1_coherence: state does not match the layout");
  const ComplexMatrix diff = rho.matrix() - dephase_raw(rho.matrix(), layout);
  double sum = 0.0;
  for (int r = 0; r < diff.rows(); ++r)
    for (int c = 0; c < diff.cols(); ++c) sum += std::abs(diff(r, c));
  return sum;
}

double ent_entropy_pure(const DensityMatrix& rho, const SystemLayout& layout,
                        const std::vector<std::string>& side,
                        double tolerance) {
  if (rho.dim() != layout.total_dim())
    throw std::invalid_argument(
        "ent_entropy_pure: state does not match the layout");
  if (std::abs(purity(rho) - 1.0) > tolerance)
    throw std::invalid_argument("ent_entropy_pure: state is not pure");
  if (side.empty() || static_cast<int>(side.size()) >= layout.size())
    throw std::invalid_argument(
        "ent_entropy_pure: side must be a proper nonempty subset");
  return clamp0(entropy(partial_trace(rho, layout, side)));
}

double ent_entropy_pure(const PureState& psi, const SystemLayout& layout,
                        const std::vector<std::string>& side) {
  return ent_entropy_pure(psi.density(), layout, side);
}

double eq2_lower_bound(const DensityMatrix& rho, const SystemLayout& layout) {
  require_wire(layout, "eq2_lower_bound");
  if (rho.dim() != layout.total_dim())
    throw std::invalid_argument(
        "eq2_lower_bound: state does not match the layout");

  const std::vector<std::string> wires = names_of_kind(layout, RegKind::wire);
  const std::vector<std::string> quanta =
      names_of_kind(layout, RegKind::quantum);

  double bound = 0.0;
  if (wires.size() == static_cast<size_t>(layout.size())) {
    bound = rel_ent_coherence(rho, layout);
  } else {
    const DensityMatrix wire_part = partial_trace(rho, layout, wires);
    bound = rel_ent_coherence(wire_part, layout.restricted_to(wires));
  }

  if (!quanta.empty()) {
    const DensityMatrix q_part = quanta.size() == static_cast<size_t>(
                                                      layout.size())
                                     ? rho
                                     : partial_trace(rho, layout, quanta);
    // Entanglement of the quantum marginal: only the pure two-register case
    // has a closed form. A single register is unentangled; deeper cuts have
    // no general algorithm, so the coherence term alone carries the bound.
    if (quanta.size() == 2 &&
        std::abs(purity(q_part) - 1.0) <= tol::structural) {
      const double ent = ent_entropy_pure(
          q_part, layout.restricted_to(quanta), {quanta.front()});
      bound = std::max(bound, ent);
    }
  }
  return clamp0(bound);
}

MonotoneReport monotone_report(const DensityMatrix& rho,
                               const SystemLayout& layout) {
  MonotoneReport report;
  report.rel_ent_coherence = rel_ent_coherence(rho, layout);
  report.l1_coherence = l1_coherence(rho, layout);

  const std::vector<std::string> wires = names_of_kind(layout, RegKind::wire);
  const bool has_quantum =
      !layout.indices_of_kind(RegKind::quantum).empty();
  if (has_quantum && std::abs(purity(rho) - 1.0) <= tol::structural)
    report.ent_entropy_pure = ent_entropy_pure(rho, layout, wires);
  if (has_quantum) report.eq2_lower_bound = eq2_lower_bound(rho, layout);
  return report;
}

GhzWCostTable ghz_w_cost_table(int n) {
  if (n < 3)
    throw std::invalid_argument("ghz_w_cost_table: requires n >= 3");

  GhzWCostTable t;
  t.n = n;

  {
    SystemLayout wire({{"w", 2, RegKind::wire}});
    t.ghz_input_coherence =
        rel_ent_coherence(max_coherent_state(2).density(), wire);
  }
  {
    SystemLayout wire({{"w", n, RegKind::wire}});
    t.w_input_coherence =
        rel_ent_coherence(max_coherent_state(n).density(), wire);
  }

  std::vector<Register> qubits;
  for (int j = 1; j <= n; ++j)
    qubits.push_back({"g" + std::to_string(j), 2, RegKind::quantum});
  const SystemLayout qlayout{qubits};
  const int dim = 1 << n;

  ComplexMatrix ghz = zero_matrix(dim, 1);
  ghz(0, 0) = ghz(dim - 1, 0) = 1.0 / std::sqrt(2.0);
  t.ghz_cut_entropy =
      ent_entropy_pure(PureState(ghz), qlayout, {qubits.front().name});

  ComplexMatrix w = zero_matrix(dim, 1);
  for (int k = 0; k < n; ++k)
    w(1 << (n - 1 - k), 0) = 1.0 / std::sqrt(static_cast<double>(n));
  t.w_cut_entropy =
      ent_entropy_pure(PureState(w), qlayout, {qubits.front().name});

  t.ghz_ree = t.ghz_cut_entropy;  // for this family, every cut gives the value
  t.w_ree = (n - 1) * std::log2(static_cast<double>(n) / (n - 1));

  t.ghz_to_w = !(t.w_ree > t.ghz_ree + 1e-12);
  t.w_to_ghz = !(t.ghz_cut_entropy > t.w_cut_entropy + 1e-12);
  return t;
}

}  // namespace lop
