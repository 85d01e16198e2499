#include "lop/locc.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lop {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

int party_of(const std::string& name) {
  if (name.rfind("q1_", 0) == 0) return 1;
  if (name.rfind("q2_", 0) == 0) return 2;
  return 0;
}

std::string mirror_name(int party, const std::string& wire) {
  return (party == 1 ? "q1_" : "q2_") + wire;
}

void claim(std::set<std::string>& used, const std::string& name) {
  if (!used.insert(name).second) {
    throw std::invalid_argument("translate_to_locc: register name '" + name +
                                "' collides in the two-party image");
  }
}

void reject_internal_name(const std::string& name) {
  if (!name.empty() && name[0] == '_') {
    throw std::invalid_argument(
        "translate_to_locc: register name '" + name +
        "' uses the leading underscore reserved for translation helpers");
  }
}

ComplexMatrix permutation_matrix(const std::vector<int>& table) {
  const int n = static_cast<int>(table.size());
  ComplexMatrix p = zero_matrix(n, n);
  for (int i = 0; i < n; ++i) p(table[i], i) = 1.0;
  return p;
}

class Translator {
 public:
  ProtocolTree walk(const ProtocolTree& node, const SystemLayout& layout,
                    std::set<std::string> used) {
    if (node.is_leaf()) return ProtocolTree::leaf();
    const ElementalOp& op = node.op();
    const detail::LocalAction act = detail::local_action(op, layout);
    switch (op.kind) {
      case ElementalOp::Kind::permutation: {
        const ComplexMatrix p = permutation_matrix(op.table);
        ElementalOp u1 = ElementalOp::observed_instrument(
            mirrors_of(1, op.regs), {p}, fresh("u"));
        ElementalOp u2 = ElementalOp::observed_instrument(
            mirrors_of(2, op.regs), {p}, fresh("u"));
        claim(used, u1.ancilla);
        claim(used, u2.ancilla);
        return ProtocolTree::step(
            std::move(u1),
            {ProtocolTree::step(
                std::move(u2),
                {walk(node.children().at(0), act.layout_after, used)})});
      }
      case ElementalOp::Kind::phase: {
        const int n = static_cast<int>(op.angles.size());
        ComplexMatrix d = zero_matrix(n, n);
        for (int i = 0; i < n; ++i) d(i, i) = std::polar(1.0, op.angles[i]);
        ElementalOp u = ElementalOp::observed_instrument(
            mirrors_of(1, op.regs), {d}, fresh("u"));
        claim(used, u.ancilla);
        return ProtocolTree::step(
            std::move(u),
            {walk(node.children().at(0), act.layout_after, used)});
      }
      case ElementalOp::Kind::observed:
        return observed_node(node, act, std::move(used));
      case ElementalOp::Kind::forward:
        return forward_node(node, layout, act, std::move(used));
    }
    throw std::logic_error("translate_to_locc: unknown op kind");
  }

 private:
  std::string fresh(const std::string& stem) {
    return "_" + stem + std::to_string(counter_++);
  }

  static std::vector<std::string> mirrors_of(
      int party, const std::vector<std::string>& wires) {
    std::vector<std::string> out;
    out.reserve(wires.size());
    for (const std::string& w : wires) out.push_back(mirror_name(party, w));
    return out;
  }

  // The instrument runs unchanged at its home party; its outcome wire is
  // then duplicated and loaded into a quantum copy at each party.
  ProtocolTree observed_node(const ProtocolTree& node,
                             const detail::LocalAction& act,
                             std::set<std::string> used) {
    const ElementalOp& op = node.op();
    reject_internal_name(op.ancilla);
    int party = 0;
    std::vector<std::string> quantum_names = op.regs;
    for (const Register& r : op.created) quantum_names.push_back(r.name);
    for (const std::string& name : quantum_names) {
      reject_internal_name(name);
      const int p = party_of(name);
      if (p == 0) {
        throw std::invalid_argument(
            "translate_to_locc: quantum register '" + name +
            "' lacks a party prefix (q1_/q2_)");
      }
      if (party == 0) party = p;
      if (p != party) {
        throw std::invalid_argument(
            "translate_to_locc: instrument spans both parties");
      }
    }
    claim(used, op.ancilla);
    for (const Register& r : op.created) claim(used, r.name);

    // Even dimension-one records go through the copy gadget: later steps may
    // still permute or forward the record wire, and they expect both parties
    // to hold a copy of it.
    const int rd = act.record_dim;
    const std::string rb = fresh("copy");
    claim(used, rb);
    claim(used, mirror_name(1, op.ancilla));
    claim(used, mirror_name(2, op.ancilla));
    std::vector<int> cnot(rd * rd);
    for (int i = 0; i < rd; ++i) {
      for (int j = 0; j < rd; ++j) cnot[i * rd + j] = i * rd + (i + j) % rd;
    }
    std::vector<ProtocolTree> children;
    for (const ProtocolTree& child : node.children()) {
      ProtocolTree tail = walk(child, act.layout_after, used);
      tail = ProtocolTree::step(
          ElementalOp::forward_wire(rb, mirror_name(2, op.ancilla)),
          {std::move(tail)});
      tail = ProtocolTree::step(
          ElementalOp::forward_wire(op.ancilla, mirror_name(1, op.ancilla)),
          {std::move(tail)});
      tail = ProtocolTree::step(
          ElementalOp::wire_permutation({op.ancilla, rb}, cnot),
          {std::move(tail)});
      tail = ProtocolTree::step(ElementalOp::prepare_wire(rb, rd),
                                {std::move(tail)});
      children.push_back(std::move(tail));
    }
    return ProtocolTree::step(op, std::move(children));
  }

  // The far party removes its copy with a destructive Fourier measurement;
  // the announced outcome fixes a phase correction on the surviving copy,
  // which is then moved into the forward's declared target register.
  ProtocolTree forward_node(const ProtocolTree& node,
                            const SystemLayout& layout,
                            const detail::LocalAction& act,
                            std::set<std::string> used) {
    const ElementalOp& op = node.op();
    reject_internal_name(op.target);
    const int party = party_of(op.target);
    if (party == 0) {
      throw std::invalid_argument("translate_to_locc: forward target '" +
                                  op.target +
                                  "' lacks a party prefix (q1_/q2_)");
    }
    const int d = layout.reg(layout.index_of(op.source)).dim;
    const std::string near = mirror_name(party, op.source);
    const std::string far = mirror_name(3 - party, op.source);

    ElementalOp move = ElementalOp::observed_instrument(
        {near}, {identity_matrix(d)}, fresh("u"), 0, {1},
        {Register{op.target, d, RegKind::quantum}});
    const std::string corr_anc = fresh("u");
    const std::string del_anc = fresh("del");
    claim(used, op.target);
    claim(used, move.ancilla);
    claim(used, corr_anc);
    claim(used, del_anc);

    ProtocolTree tail = ProtocolTree::step(
        std::move(move), {walk(node.children().at(0), act.layout_after, used)});

    std::vector<ComplexMatrix> fourier;
    std::vector<ProtocolTree> children;
    for (int k = 0; k < d; ++k) {
      ComplexMatrix m = zero_matrix(1, d);
      ComplexMatrix corr = zero_matrix(d, d);
      for (int j = 0; j < d; ++j) {
        m(0, j) = std::polar(1.0 / std::sqrt(static_cast<double>(d)),
                             -kTau * k * j / d);
        corr(j, j) = std::polar(1.0, kTau * k * j / d);
      }
      fourier.push_back(std::move(m));
      children.push_back(ProtocolTree::step(
          ElementalOp::observed_instrument({near}, {corr}, corr_anc), {tail}));
    }
    return ProtocolTree::step(
        ElementalOp::observed_instrument({far}, std::move(fourier), del_anc, 0,
                                         {1}),
        std::move(children));
  }

  int counter_ = 0;
};

// Translated-register resolution against an original layout: dimension-1
// registers carry no content, quantum registers pass through by name, a
// party-prefixed name whose stem is an original wire reads that wire, and
// anything else must be pinned to a definite value.
ComplexMatrix embedding(const SystemLayout& from, const SystemLayout& to,
                        const std::map<std::string, int>& pinned) {
  enum class Kind { zero, copy, pin };
  struct Src {
    Kind kind;
    int pos = 0;
    int val = 0;
  };
  std::vector<Src> srcs;
  std::vector<int> matches(from.size(), 0);
  for (int t = 0; t < to.size(); ++t) {
    const Register& r = to.reg(t);
    if (r.dim == 1) {
      srcs.push_back({Kind::zero});
      continue;
    }
    if (from.has(r.name) &&
        from.reg(from.index_of(r.name)).kind == RegKind::quantum) {
      const int p = from.index_of(r.name);
      srcs.push_back({Kind::copy, p});
      ++matches[p];
      continue;
    }
    if (party_of(r.name) != 0) {
      const std::string stem = r.name.substr(3);
      if (from.has(stem) &&
          from.reg(from.index_of(stem)).kind == RegKind::wire) {
        const int p = from.index_of(stem);
        srcs.push_back({Kind::copy, p});
        ++matches[p];
        continue;
      }
    }
    const auto it = pinned.find(r.name);
    if (it == pinned.end()) {
      throw std::invalid_argument("check_locc_translation: register '" +
                                  r.name + "' has no counterpart");
    }
    srcs.push_back({Kind::pin, 0, it->second});
  }
  for (int p = 0; p < from.size(); ++p) {
    const Register& r = from.reg(p);
    if (r.dim == 1) continue;
    const int need = r.kind == RegKind::wire ? 2 : 1;
    if (matches[p] != need) {
      throw std::invalid_argument("check_locc_translation: register '" +
                                  r.name + "' is not fully mirrored");
    }
  }
  ComplexMatrix m = zero_matrix(to.total_dim(), from.total_dim());
  for (int f = 0; f < from.total_dim(); ++f) {
    const std::vector<int> dg = from.digits_of(f);
    std::vector<int> tg(to.size());
    for (std::size_t t = 0; t < srcs.size(); ++t) {
      switch (srcs[t].kind) {
        case Kind::zero: tg[t] = 0; break;
        case Kind::copy: tg[t] = dg[srcs[t].pos]; break;
        case Kind::pin: tg[t] = srcs[t].val; break;
      }
    }
    m(to.flat_index(tg), f) = 1.0;
  }
  return m;
}

// Outcomes of the original instruments along a branch; instruments are the
// only branching nodes, so this identifies the branch.
std::vector<int> instrument_path(const ProtocolTree& tree,
                                 const std::vector<int>& outcomes) {
  std::vector<int> path;
  const ProtocolTree* cur = &tree;
  for (int o : outcomes) {
    if (cur->op().kind == ElementalOp::Kind::observed) path.push_back(o);
    cur = &cur->children().at(o);
  }
  return path;
}

struct DecodedBranch {
  std::vector<int> instrument;
  double scale = 1.0;
};

DecodedBranch decode_translated(const ProtocolTree& tree,
                                const std::vector<int>& outcomes) {
  DecodedBranch d;
  const ProtocolTree* cur = &tree;
  for (int o : outcomes) {
    const ElementalOp& op = cur->op();
    if (op.kind == ElementalOp::Kind::observed) {
      if (op.ancilla.rfind("_del", 0) == 0) {
        d.scale /= std::sqrt(static_cast<double>(op.kraus.size()));
      } else if (!op.ancilla.empty() && op.ancilla[0] != '_') {
        d.instrument.push_back(o);
      }
    }
    cur = &cur->children().at(o);
  }
  return d;
}

}  // namespace

LoccTranslation translate_to_locc(const ProtocolTree& tree,
                                  const SystemLayout& layout) {
  std::vector<Register> regs;
  std::set<std::string> used;
  for (const Register& r : layout.registers()) {
    reject_internal_name(r.name);
    if (r.kind == RegKind::wire) {
      regs.push_back({mirror_name(1, r.name), r.dim, RegKind::quantum});
      regs.push_back({mirror_name(2, r.name), r.dim, RegKind::quantum});
      claim(used, regs[regs.size() - 2].name);
      claim(used, regs.back().name);
    } else {
      if (party_of(r.name) == 0) {
        throw std::invalid_argument("translate_to_locc: quantum register '" +
                                    r.name +
                                    "' lacks a party prefix (q1_/q2_)");
      }
      regs.push_back(r);
      claim(used, r.name);
    }
  }
  LoccTranslation out;
  out.layout = SystemLayout(std::move(regs));
  Translator tr;
  out.tree = tr.walk(tree, layout, std::move(used));
  return out;
}

LoccCheckReport check_locc_translation(const ProtocolTree& original,
                                       const SystemLayout& layout,
                                       const LoccTranslation& translation,
                                       double tolerance) {
  const std::vector<BranchOperator> orig =
      branch_operators(original, layout);
  const std::vector<BranchOperator> trans =
      branch_operators(translation.tree, translation.layout);

  std::map<std::vector<int>, int> by_path;
  for (std::size_t i = 0; i < orig.size(); ++i) {
    by_path[instrument_path(original, orig[i].outcomes)] =
        static_cast<int>(i);
  }

  const ComplexMatrix v_in = embedding(layout, translation.layout, {});

  LoccCheckReport report;
  std::vector<int> matched(orig.size(), 0);
  for (const BranchOperator& bt : trans) {
    const DecodedBranch dec = decode_translated(translation.tree, bt.outcomes);
    LoccBranchCheck entry;
    entry.translated_outcomes = bt.outcomes;
    entry.instrument_outcomes = dec.instrument;
    const auto it = by_path.find(dec.instrument);
    if (it == by_path.end()) {
      entry.deviation = std::numeric_limits<double>::infinity();
      report.ok = false;
      report.branches.push_back(std::move(entry));
      continue;
    }
    const BranchOperator& bo = orig[it->second];
    ++matched[it->second];
    const ComplexMatrix w_out =
        embedding(bo.layout, bt.layout, bt.definite);
    const ComplexMatrix lhs = bt.full_operator() * v_in;
    const ComplexMatrix rhs =
        Complex(dec.scale) * (w_out * bo.full_operator());
    entry.deviation = max_abs_diff(lhs, rhs);
    report.max_deviation = std::max(report.max_deviation, entry.deviation);
    if (entry.deviation > tolerance) report.ok = false;
    report.branches.push_back(std::move(entry));
  }
  for (int m : matched) {
    if (m == 0) report.ok = false;
  }
  return report;
}

}  // namespace lop
