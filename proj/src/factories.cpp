#include "lop/factories.hpp"

#include "lop/classify.hpp"

#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

namespace lop {
namespace {

constexpr double kTau = 6.283185307179586476925286766559;

std::string num(int v) { return std::to_string(v); }

// (i, j) -> (i, (i + j) % d) on a pair of d-level wires: copies the first
// wire into a freshly prepared (|0>) second one.
std::vector<int> copy_table(int d) {
  std::vector<int> table(d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) table[i * d + j] = i * d + (i + j) % d;
  return table;
}

// Removing Fourier measurement: d Kraus rows F_k with entries
// exp(-i 2 pi k j / d) / sqrt(d).
std::vector<ComplexMatrix> fourier_bras(int d) {
  std::vector<ComplexMatrix> out;
  out.reserve(d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int k = 0; k < d; ++k) {
    ComplexMatrix f = zero_matrix(1, d);
    for (int j = 0; j < d; ++j)
      f(0, j) = std::polar(norm, -kTau * k * j / d);
    out.push_back(std::move(f));
  }
  return out;
}

// Phase undoing Fourier outcome k: angle +2 pi k j / d on wire level j.
std::vector<double> fourier_correction(int d, int k) {
  std::vector<double> angles(d);
  for (int j = 0; j < d; ++j) angles[j] = kTau * k * j / d;
  return angles;
}

// Generalized Bell measurement on two d-level registers (first slowest):
// outcome k*d+l has the single row
//   (1/sqrt(d)) sum_j exp(-i 2 pi k j / d) <j| (x) <(l+j) % d|.
std::vector<ComplexMatrix> bell_bras(int d) {
  std::vector<ComplexMatrix> out;
  out.reserve(d * d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      ComplexMatrix b = zero_matrix(1, d * d);
      for (int j = 0; j < d; ++j)
        b(0, j * d + (l + j) % d) = std::polar(norm, -kTau * k * j / d);
      out.push_back(std::move(b));
    }
  }
  return out;
}

// Z^k X^l on a qubit (X applied first, so the sign rides on the row).
ComplexMatrix qubit_zx(int k, int l) {
  ComplexMatrix u = zero_matrix(2, 2);
  for (int x = 0; x < 2; ++x) {
    const int row = (x + l) % 2;
    u(row, x) = (k * row) % 2 ? -1.0 : 1.0;
  }
  return u;
}

// Extends a partial injection on {0..n-1} to a bijection, filling unused
// sources with unused targets in ascending order.
std::vector<int> complete_table(int n, const std::map<int, int>& partial) {
  std::vector<int> table(n, -1);
  std::vector<bool> used(n, false);
  for (const auto& [src, dst] : partial) {
    table.at(src) = dst;
    if (used.at(dst))
      throw std::logic_error("complete_table: duplicate target");
    used[dst] = true;
  }
  int next = 0;
  for (int src = 0; src < n; ++src) {
    if (table[src] >= 0) continue;
    while (used[next]) ++next;
    table[src] = next;
    used[next] = true;
  }
  return table;
}

bool is_identity_table(const std::vector<int>& table) {
  for (int i = 0; i < static_cast<int>(table.size()); ++i)
    if (table[i] != i) return false;
  return true;
}

// Wire-label decomposition K_a = sum_i |f_a(i)><i|_W (x) E_a(i) of every
// Kraus operator of a basis-aligned channel. Exactly-zero Kraus operators
// are dropped; a Kraus operator that couples distinct wire labels throws.
struct AlignedParts {
  int d = 0;
  int dq = 0;
  std::vector<WirePattern> patterns;
  std::vector<std::vector<ComplexMatrix>> blocks;  // [a][i], dq x dq
};

AlignedParts aligned_parts(const QuantumChannel& ch, int d, const char* who) {
  if (d < 1) throw std::invalid_argument(std::string(who) +
                                         ": wire dimension must be >= 1");
  if (ch.in_dim() != ch.out_dim())
    throw std::invalid_argument(std::string(who) + ": channel must be square");
  if (ch.in_dim() % d != 0)
    throw std::invalid_argument(std::string(who) +
                                ": wire dimension must divide the channel "
                                "dimension");
  if (!ch.is_trace_preserving())
    throw std::invalid_argument(std::string(who) +
                                ": channel must be trace preserving");
  AlignedParts parts;
  parts.d = d;
  parts.dq = ch.in_dim() / d;
  const SystemLayout layout = iqo_layout(ch, d);
  for (const ComplexMatrix& k : ch.kraus()) {
    auto dec = wire_block_decompose(k, layout, layout);
    if (!dec)
      throw std::invalid_argument(std::string(who) +
                                  ": a Kraus operator couples distinct wire "
                                  "labels");
    bool all_zero = true;
    for (const auto& target : dec->pattern) all_zero &= !target.has_value();
    if (all_zero) continue;  // zero Kraus operator contributes nothing
    parts.patterns.push_back(std::move(dec->pattern));
    parts.blocks.push_back(std::move(dec->blocks));
  }
  if (parts.patterns.empty())
    throw std::invalid_argument(std::string(who) +
                                ": channel has no nonzero Kraus operator");
  return parts;
}

// sum_i block(i) (x) |f(i)><i| on registers {quantum, helper}, quantum
// slowest. Labels i with no target get a zero block.
ComplexMatrix tagged_kraus(const std::vector<ComplexMatrix>& blocks,
                           const std::vector<int>& f, int d, int dq) {
  ComplexMatrix g = zero_matrix(dq * d, dq * d);
  for (int i = 0; i < d; ++i) {
    if (f[i] < 0) continue;
    g += kron(blocks[i], basis_ket(d, f[i]) * basis_bra(d, i));
  }
  return g;
}

}  // namespace

// ---------------------------------------------------------------------------

SystemLayout bijection_input_layout(int d) {
  if (d < 2)
    throw std::invalid_argument("bijection_B: dimension must be >= 2");
  return SystemLayout({{"w", d, RegKind::wire}});
}

SystemLayout bijection_image_layout(int d) {
  if (d < 2)
    throw std::invalid_argument("bijection_B: dimension must be >= 2");
  return SystemLayout(
      {{"w", d, RegKind::wire}, {"q", d, RegKind::quantum}});
}

ProtocolTree bijection_B(int d) {
  bijection_input_layout(d);  // validate
  return ProtocolTree::chain({
      ElementalOp::prepare_wire("c", d),
      ElementalOp::wire_permutation({"w", "c"}, copy_table(d)),
      ElementalOp::forward_wire("c", "q"),
  });
}

ProtocolTree bijection_B_inv(int d) {
  bijection_image_layout(d);  // validate
  std::vector<ProtocolTree> children;
  children.reserve(d);
  for (int k = 0; k < d; ++k) {
    children.push_back(ProtocolTree::step_uniform(
        ElementalOp::wire_phase({"w"}, fourier_correction(d, k)),
        ProtocolTree::leaf()));
  }
  return ProtocolTree::step(
      ElementalOp::observed_instrument({"q"}, fourier_bras(d), "k", 0, {1}),
      std::move(children));
}

// ---------------------------------------------------------------------------

SystemLayout phase_loop_layout(int d) {
  if (d < 2)
    throw std::invalid_argument("phase_via_loop: dimension must be >= 2");
  return SystemLayout({{"w", d, RegKind::wire}});
}

namespace {

ProtocolTree phase_loop_round(const std::vector<double>& residual, int d,
                              int rounds_left, int round) {
  if (rounds_left == 0) return ProtocolTree::leaf();

  ComplexMatrix u = zero_matrix(d, d);
  for (int j = 0; j < d; ++j) u(j, j) = std::polar(1.0, residual[j]);

  const std::string c = "c" + num(round);
  const std::string q = "q" + num(round);

  std::vector<ProtocolTree> children;
  children.reserve(d);
  children.push_back(ProtocolTree::leaf());  // outcome 0: phase applied
  for (int k = 1; k < d; ++k) {
    // Failure k leaves exp(-i 2 pi k j / d) behind; the next round owes
    // exactly the opposite phase, independent of the current residual.
    children.push_back(
        phase_loop_round(fourier_correction(d, k), d, rounds_left - 1,
                         round + 1));
  }

  ProtocolTree tree = ProtocolTree::step(
      ElementalOp::observed_instrument({q}, fourier_bras(d),
                                       "k" + num(round), 0, {1}),
      std::move(children));
  tree = ProtocolTree::step_uniform(
      ElementalOp::observed_instrument({q}, {u}, "u" + num(round)),
      std::move(tree));
  tree = ProtocolTree::step_uniform(ElementalOp::forward_wire(c, q),
                                    std::move(tree));
  tree = ProtocolTree::step_uniform(
      ElementalOp::wire_permutation({"w", c}, copy_table(d)),
      std::move(tree));
  tree = ProtocolTree::step_uniform(ElementalOp::prepare_wire(c, d),
                                    std::move(tree));
  return tree;
}

}  // namespace

ProtocolTree phase_via_loop(const std::vector<double>& phases, int d,
                            int max_rounds) {
  phase_loop_layout(d);  // validate
  if (static_cast<int>(phases.size()) != d)
    throw std::invalid_argument(
        "phase_via_loop: need one angle per wire level");
  if (max_rounds < 1)
    throw std::invalid_argument("phase_via_loop: need at least one round");
  return phase_loop_round(phases, d, max_rounds, 1);
}

// ---------------------------------------------------------------------------

SystemLayout teleport_layout(const ChannelSpec& spec) {
  if (spec.wire_dim < 2)
    throw std::invalid_argument(
        "teleport_channel: wire dimension must be >= 2");
  if (spec.quantum_dim < 1)
    throw std::invalid_argument(
        "teleport_channel: quantum dimension must be >= 1");
  if (spec.target.in_dim() != spec.target.out_dim() ||
      spec.target.in_dim() != spec.wire_dim * spec.quantum_dim)
    throw std::invalid_argument(
        "teleport_channel: target must be square on wire_dim x quantum_dim");
  return SystemLayout({{"wa", spec.wire_dim, RegKind::wire},
                       {"w", spec.wire_dim, RegKind::wire},
                       {"p", spec.quantum_dim, RegKind::quantum}});
}

ProtocolTree teleport_channel(const ChannelSpec& spec) {
  teleport_layout(spec);  // validate
  if (!spec.target.is_trace_preserving())
    throw std::invalid_argument(
        "teleport_channel: target must be trace preserving");
  const int d = spec.wire_dim;

  std::vector<ProtocolTree> children;
  children.reserve(d * d);
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      std::map<int, int> shift;
      for (int m = 0; m < d; ++m) shift[m] = (m + l) % d;
      ProtocolTree fix = ProtocolTree::step_uniform(
          ElementalOp::wire_permutation({"wa"}, complete_table(d, shift)),
          ProtocolTree::leaf());
      fix = ProtocolTree::step_uniform(
          ElementalOp::wire_phase({"wa"}, fourier_correction(d, k)),
          std::move(fix));
      children.push_back(std::move(fix));
    }
  }

  ProtocolTree tree = ProtocolTree::step(
      ElementalOp::observed_instrument({"qh", "qt"}, bell_bras(d), "m", 0,
                                       {1, 1}),
      std::move(children));
  tree = ProtocolTree::step_uniform(ElementalOp::forward_wire("wc", "qh"),
                                    std::move(tree));
  tree = ProtocolTree::step_uniform(
      ElementalOp::wire_permutation({"wa", "wc"}, copy_table(d)),
      std::move(tree));
  tree = ProtocolTree::step_uniform(ElementalOp::prepare_wire("wc", d),
                                    std::move(tree));
  tree = ProtocolTree::step_uniform(
      ElementalOp::observed_instrument({"qt", "p"}, spec.target.kraus(), "a"),
      std::move(tree));
  tree = ProtocolTree::step_uniform(ElementalOp::forward_wire("w", "qt"),
                                    std::move(tree));
  return tree;
}

// ---------------------------------------------------------------------------

SystemLayout iqo_layout(const QuantumChannel& ch, int d) {
  if (d < 1)
    throw std::invalid_argument("iqo_layout: wire dimension must be >= 1");
  if (ch.in_dim() % d != 0)
    throw std::invalid_argument(
        "iqo_layout: wire dimension must divide the channel dimension");
  return SystemLayout({{"w", d, RegKind::wire},
                       {"p", ch.in_dim() / d, RegKind::quantum}});
}

ProtocolTree iqo_stochastic(const QuantumChannel& ch, int d) {
  const AlignedParts parts = aligned_parts(ch, d, "iqo_stochastic");
  const int dq = parts.dq;
  const auto fouriers = fourier_bras(d);

  std::vector<ProtocolTree> per_alpha;
  per_alpha.reserve(parts.patterns.size());
  for (size_t a = 0; a < parts.patterns.size(); ++a) {
    // Total extension of the label map; unmapped labels carry a zero block,
    // so their images never matter.
    std::vector<int> f(d);
    for (int i = 0; i < d; ++i)
      f[i] = parts.patterns[a][i].value_or(i);

    ProtocolTree tail = ProtocolTree::step(
        ElementalOp::observed_instrument({"qz"}, fouriers, "k2", 0, {1}),
        std::vector<ProtocolTree>(d, ProtocolTree::leaf()));
    tail = ProtocolTree::step_uniform(ElementalOp::forward_wire("w2", "qz"),
                                      std::move(tail));

    std::vector<ProtocolTree> per_k;
    per_k.reserve(d);
    for (int k = 0; k < d; ++k) {
      per_k.push_back(ProtocolTree::step_uniform(
          ElementalOp::wire_phase({"w"}, fourier_correction(d, k)), tail));
    }
    ProtocolTree branch = ProtocolTree::step(
        ElementalOp::observed_instrument({"qx"}, fouriers, "k1", 0, {1}),
        std::move(per_k));

    // (i, 0) -> (f(i), i): relabels w while depositing the old label in w2.
    std::map<int, int> relabel;
    for (int i = 0; i < d; ++i) relabel[i * d] = f[i] * d + i;
    branch = ProtocolTree::step_uniform(
        ElementalOp::wire_permutation({"w", "w2"},
                                      complete_table(d * d, relabel)),
        std::move(branch));
    branch = ProtocolTree::step_uniform(ElementalOp::prepare_wire("w2", d),
                                        std::move(branch));
    per_alpha.push_back(std::move(branch));
  }

  std::vector<ComplexMatrix> instrument;
  instrument.reserve(parts.patterns.size());
  for (size_t a = 0; a < parts.patterns.size(); ++a) {
    std::vector<int> f(d);
    for (int i = 0; i < d; ++i) f[i] = parts.patterns[a][i].value_or(-1);
    instrument.push_back(tagged_kraus(parts.blocks[a], f, d, dq));
  }

  ProtocolTree tree =
      ProtocolTree::step(ElementalOp::observed_instrument(
                             {"p", "qx"}, std::move(instrument), "a"),
                         std::move(per_alpha));
  tree = ProtocolTree::step_uniform(ElementalOp::forward_wire("c", "qx"),
                                    std::move(tree));
  tree = ProtocolTree::step_uniform(
      ElementalOp::wire_permutation({"w", "c"}, copy_table(d)),
      std::move(tree));
  tree = ProtocolTree::step_uniform(ElementalOp::prepare_wire("c", d),
                                    std::move(tree));
  return tree;
}

ProtocolTree iqo_qubit_exact(const QuantumChannel& ch) {
  const int d = 2;
  const AlignedParts parts = aligned_parts(ch, d, "iqo_qubit_exact");
  const int dq = parts.dq;
  const int m = static_cast<int>(parts.patterns.size());
  const auto fouriers = fourier_bras(d);

  // Split the Kraus operators into the label-collapsing ones (both wire
  // levels mapped to one common target) and the rest, whose patterns extend
  // to permutations.
  std::vector<int> collapsing, injective;
  for (int a = 0; a < m; ++a) {
    const WirePattern& p = parts.patterns[a];
    if (p[0] && p[1] && *p[0] == *p[1])
      collapsing.push_back(a);
    else
      injective.push_back(a);
  }

  // Positive square-root factor common to all collapsing operators.
  std::vector<ComplexMatrix> e0(d);
  for (int i = 0; i < d; ++i) {
    ComplexMatrix gram = zero_matrix(dq, dq);
    for (int a : collapsing) {
      const ComplexMatrix& e = parts.blocks[a][i];
      gram += dagger(e) * e;
    }
    e0[i] = sqrt_psd(gram);
  }

  // Stage 2: recover each collapsing operator from the square-root factor
  // through its pseudo-inverse; one extra outcome absorbs the orthogonal
  // complement and never fires.
  ProtocolTree stage2 = ProtocolTree::leaf();
  if (!collapsing.empty()) {
    std::vector<ComplexMatrix> recover;
    std::vector<ProtocolTree> kids;
    for (int a : collapsing) {
      ComplexMatrix g = zero_matrix(dq * d, dq * d);
      for (int i = 0; i < d; ++i)
        g += kron(parts.blocks[a][i] * pinv_psd(e0[i]),
                  basis_ket(d, 0) * basis_bra(d, i));
      recover.push_back(std::move(g));
      const int target = *parts.patterns[a][0];
      ProtocolTree kid = ProtocolTree::leaf();
      if (target != 0) {
        kid = ProtocolTree::step_uniform(
            ElementalOp::wire_permutation({"w"}, {target, 1 - target}),
            std::move(kid));
      }
      kids.push_back(std::move(kid));
    }
    ComplexMatrix defect = zero_matrix(dq * d, dq * d);
    for (int i = 0; i < d; ++i)
      defect += kron(identity_matrix(dq) - support_projector(e0[i]),
                     basis_ket(d, i) * basis_bra(d, i));
    recover.push_back(std::move(defect));
    kids.push_back(ProtocolTree::leaf());

    stage2 = ProtocolTree::step(
        ElementalOp::observed_instrument({"p", "qy"}, std::move(recover),
                                         "b"),
        std::move(kids));
    stage2 = ProtocolTree::step_uniform(ElementalOp::forward_wire("c2", "qy"),
                                        std::move(stage2));
    // (i, 0) -> (0, i): moves the wire content into the helper, pinning the
    // wire at level 0 for the recovery stage.
    stage2 = ProtocolTree::step_uniform(
        ElementalOp::wire_permutation({"w", "c2"},
                                      complete_table(d * d, {{0, 0}, {2, 1}})),
        std::move(stage2));
    stage2 = ProtocolTree::step_uniform(ElementalOp::prepare_wire("c2", d),
                                        std::move(stage2));
  }

  // Stage 1: one outcome per non-collapsing Kraus operator, plus (first, if
  // present) the square-root factor that the collapsing ones share.
  std::vector<ComplexMatrix> instrument;
  std::vector<std::vector<int>> tables;
  std::vector<bool> continue_to_stage2;
  if (!collapsing.empty()) {
    std::vector<int> id_f = {0, 1};
    instrument.push_back(tagged_kraus(e0, id_f, d, dq));
    tables.push_back(id_f);
    continue_to_stage2.push_back(true);
  }
  for (int a : injective) {
    const WirePattern& p = parts.patterns[a];
    std::map<int, int> partial;
    for (int i = 0; i < d; ++i)
      if (p[i]) partial[i] = *p[i];
    std::vector<int> f = complete_table(d, partial);
    std::vector<int> raw(d);
    for (int i = 0; i < d; ++i) raw[i] = p[i] ? *p[i] : -1;
    instrument.push_back(tagged_kraus(parts.blocks[a], raw, d, dq));
    tables.push_back(std::move(f));
    continue_to_stage2.push_back(false);
  }

  std::vector<ProtocolTree> branches;
  for (size_t b = 0; b < instrument.size(); ++b) {
    const ProtocolTree& next =
        continue_to_stage2[b] ? stage2 : ProtocolTree::leaf();
    std::vector<ProtocolTree> per_k;
    for (int k = 0; k < d; ++k) {
      per_k.push_back(ProtocolTree::step_uniform(
          ElementalOp::wire_phase({"w"}, fourier_correction(d, k)), next));
    }
    ProtocolTree branch = ProtocolTree::step(
        ElementalOp::observed_instrument({"qx"}, fouriers, "k1", 0, {1}),
        std::move(per_k));
    if (!is_identity_table(tables[b])) {
      branch = ProtocolTree::step_uniform(
          ElementalOp::wire_permutation({"w"}, tables[b]),
          std::move(branch));
    }
    branches.push_back(std::move(branch));
  }

  ProtocolTree tree =
      ProtocolTree::step(ElementalOp::observed_instrument(
                             {"p", "qx"}, std::move(instrument), "a"),
                         std::move(branches));
  tree = ProtocolTree::step_uniform(ElementalOp::forward_wire("c", "qx"),
                                    std::move(tree));
  tree = ProtocolTree::step_uniform(
      ElementalOp::wire_permutation({"w", "c"}, copy_table(d)),
      std::move(tree));
  tree = ProtocolTree::step_uniform(ElementalOp::prepare_wire("c", d),
                                    std::move(tree));
  return tree;
}

// ---------------------------------------------------------------------------

SystemLayout ghz_input_layout(int n, GhzTopology topology) {
  if (n < 2)
    throw std::invalid_argument("prepare_ghz: need at least two parts");
  if (topology == GhzTopology::single_wire)
    return SystemLayout({{"w", 2, RegKind::wire}});
  std::vector<Register> regs;
  for (int j = 1; j < n; ++j)
    regs.push_back({"w" + num(j), 2, RegKind::wire});
  return SystemLayout(std::move(regs));
}

ComplexMatrix ghz_input_ket(int n, GhzTopology topology) {
  const SystemLayout layout = ghz_input_layout(n, topology);
  const int dim = layout.total_dim();
  ComplexMatrix ket = zero_matrix(dim, 1);
  const double amp = 1.0 / std::sqrt(static_cast<double>(dim));
  for (int i = 0; i < dim; ++i) ket(i, 0) = amp;
  return ket;
}

std::vector<std::string> ghz_output_registers(int n, GhzTopology topology) {
  ghz_input_layout(n, topology);  // validate
  std::vector<std::string> out;
  if (topology == GhzTopology::single_wire) {
    for (int j = 1; j <= n; ++j) out.push_back("g" + num(j));
  } else {
    out.push_back("a1");
    for (int j = 2; j <= n; ++j) out.push_back("b" + num(j));
  }
  return out;
}

ComplexMatrix ghz_target_ket(int n) {
  if (n < 2)
    throw std::invalid_argument("prepare_ghz: need at least two parts");
  const int dim = 1 << n;
  ComplexMatrix ket = zero_matrix(dim, 1);
  ket(0, 0) = ket(dim - 1, 0) = 1.0 / std::sqrt(2.0);
  return ket;
}

ProtocolTree prepare_ghz(int n, GhzTopology topology) {
  ghz_input_layout(n, topology);  // validate

  if (topology == GhzTopology::single_wire) {
    std::vector<ElementalOp> ops;
    for (int j = 2; j <= n; ++j) {
      ops.push_back(ElementalOp::prepare_wire("c" + num(j), 2));
      ops.push_back(
          ElementalOp::wire_permutation({"w", "c" + num(j)}, copy_table(2)));
    }
    ops.push_back(ElementalOp::forward_wire("w", "g1"));
    for (int j = 2; j <= n; ++j)
      ops.push_back(ElementalOp::forward_wire("c" + num(j), "g" + num(j)));
    return ProtocolTree::chain(ops);
  }

  // chain: first turn every wire into a correlated qubit pair (a_j, b_j+1),
  // then graft each pair onto the grown state by a Bell measurement.
  const auto bells = bell_bras(2);
  ComplexMatrix copy_iso = zero_matrix(4, 2);  // |m>|m><m| on (b_j, t_j)
  copy_iso(0, 0) = 1.0;
  copy_iso(3, 1) = 1.0;

  ProtocolTree tree = ProtocolTree::leaf();
  for (int j = n - 1; j >= 2; --j) {
    std::vector<ProtocolTree> kids;
    kids.reserve(4);
    for (int k = 0; k < 2; ++k) {
      for (int l = 0; l < 2; ++l) {
        kids.push_back(ProtocolTree::step_uniform(
            ElementalOp::observed_instrument({"b" + num(j + 1)},
                                             {qubit_zx(k, l)}, "v" + num(j)),
            tree));
      }
    }
    ProtocolTree ext = ProtocolTree::step(
        ElementalOp::observed_instrument({"t" + num(j), "a" + num(j)}, bells,
                                         "m" + num(j), 0, {1, 1}),
        std::move(kids));
    ext = ProtocolTree::step_uniform(
        ElementalOp::observed_instrument(
            {"b" + num(j)}, {copy_iso}, "u" + num(j), 0, {},
            {{"t" + num(j), 2, RegKind::quantum}}),
        std::move(ext));
    tree = std::move(ext);
  }
  for (int j = n - 1; j >= 1; --j) {
    ProtocolTree head = ProtocolTree::chain({
        ElementalOp::prepare_wire("d" + num(j), 2),
        ElementalOp::wire_permutation({"w" + num(j), "d" + num(j)},
                                      copy_table(2)),
        ElementalOp::forward_wire("w" + num(j), "a" + num(j)),
        ElementalOp::forward_wire("d" + num(j), "b" + num(j + 1)),
    });
    tree = head.then(tree);
  }
  return tree;
}

SystemLayout w_input_layout(int n, WTopology topology) {
  if (n < 2) throw std::invalid_argument("prepare_w: need at least two parts");
  if (topology == WTopology::single_wire)
    return SystemLayout({{"w", n, RegKind::wire}});
  if (n != 3)
    throw std::invalid_argument("prepare_w: two_wire supports exactly n = 3");
  return SystemLayout({{"w1", 2, RegKind::wire}, {"w2", 2, RegKind::wire}});
}

ComplexMatrix w_input_ket(int n, WTopology topology) {
  w_input_layout(n, topology);  // validate
  if (topology == WTopology::single_wire) {
    ComplexMatrix ket = zero_matrix(n, 1);
    const double amp = 1.0 / std::sqrt(static_cast<double>(n));
    for (int i = 0; i < n; ++i) ket(i, 0) = amp;
    return ket;
  }
  ComplexMatrix ket = zero_matrix(4, 1);
  const double r2 = std::sqrt(2.0), r6 = std::sqrt(6.0);
  ket(0, 0) = 1.0 / r6;        // |00>
  ket(1, 0) = r2 / r6;         // |01>
  ket(2, 0) = 1.0 / r6;        // |10>
  ket(3, 0) = r2 / r6;         // |11>
  return ket;
}

std::vector<std::string> w_output_registers(int n, WTopology topology) {
  w_input_layout(n, topology);  // validate
  std::vector<std::string> out;
  if (topology == WTopology::single_wire) {
    for (int j = 1; j <= n; ++j) out.push_back("v" + num(j));
  } else {
    out = {"qa", "q3", "qh1"};
  }
  return out;
}

ComplexMatrix w_target_ket(int n, WTopology topology) {
  w_input_layout(n, topology);  // validate
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  if (topology == WTopology::single_wire) {
    // Registers (v1: dim n, v2..vn: dim 2); the excited slot is v1 at level
    // 1 or exactly one helper at level 1.
    const int helpers = 1 << (n - 1);
    ComplexMatrix ket = zero_matrix(n * helpers, 1);
    ket(helpers, 0) = amp;  // |1, 0...0>
    for (int k = 1; k < n; ++k) ket(1 << (n - 1 - k), 0) = amp;
    return ket;
  }
  ComplexMatrix ket = zero_matrix(8, 1);
  ket(4, 0) = ket(2, 0) = ket(1, 0) = amp;
  return ket;
}

ProtocolTree prepare_w(int n, WTopology topology) {
  w_input_layout(n, topology);  // validate

  if (topology == WTopology::single_wire) {
    const int helpers = 1 << (n - 1);
    std::map<int, int> partial;
    partial[0] = helpers;  // (0, 0...0) -> (1, 0...0)
    for (int k = 1; k < n; ++k)
      partial[k * helpers] = 1 << (n - 1 - k);  // (k, 0) -> (0, e_k)
    std::vector<std::string> regs = {"w"};
    std::vector<ElementalOp> ops;
    for (int j = 2; j <= n; ++j) {
      ops.push_back(ElementalOp::prepare_wire("c" + num(j), 2));
      regs.push_back("c" + num(j));
    }
    ops.push_back(ElementalOp::wire_permutation(
        regs, complete_table(n * helpers, partial)));
    ops.push_back(ElementalOp::forward_wire("w", "v1"));
    for (int j = 2; j <= n; ++j)
      ops.push_back(ElementalOp::forward_wire("c" + num(j), "v" + num(j)));
    return ProtocolTree::chain(ops);
  }

  // two_wire, n = 3: shape (w2, qa, qb) into the target, then spend the
  // (qh1, qh2) pair from w1 to teleport qb across.
  ComplexMatrix split = zero_matrix(4, 2);  // on (qa, qb)
  split(0, 0) = 1.0;                        // |00><0|
  split(1, 1) = split(2, 1) = 1.0 / std::sqrt(2.0);

  std::vector<ProtocolTree> kids;
  for (int k = 0; k < 2; ++k) {
    for (int l = 0; l < 2; ++l) {
      kids.push_back(ProtocolTree::step_uniform(
          ElementalOp::observed_instrument({"qh1"}, {qubit_zx(k, l)}, "v"),
          ProtocolTree::leaf()));
    }
  }
  ProtocolTree tree = ProtocolTree::step(
      ElementalOp::observed_instrument({"qb", "qh2"}, bell_bras(2), "m", 0,
                                       {1, 1}),
      std::move(kids));

  ProtocolTree head = ProtocolTree::chain({
      ElementalOp::prepare_wire("d1", 2),
      ElementalOp::wire_permutation({"w1", "d1"}, copy_table(2)),
      ElementalOp::prepare_wire("d2", 2),
      ElementalOp::wire_permutation({"w2", "d2"}, copy_table(2)),
      ElementalOp::wire_permutation({"w2"}, {1, 0}),
      ElementalOp::forward_wire("d2", "qa"),
      ElementalOp::observed_instrument({"qa"}, {split}, "u1", 0, {},
                                       {{"qb", 2, RegKind::quantum}}),
      ElementalOp::forward_wire("w2", "q3"),
      ElementalOp::forward_wire("w1", "qh1"),
      ElementalOp::forward_wire("d1", "qh2"),
  });
  return head.then(tree);
}

}  // namespace lop
