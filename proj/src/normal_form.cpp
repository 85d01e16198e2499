#include "lop/normal_form.hpp"

#include "lop/elemental.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lop {

ComplexMatrix NormalFormStep::kraus(int outcome) const {
  const NormalFormOutcome& o = outcomes.at(outcome);
  ComplexMatrix k = zero_matrix(o.out_wire_dim * o.out_quantum_dim,
                                in_wire_dim * in_quantum_dim);
  for (int i = 0; i < in_wire_dim; ++i) {
    const int w = o.injection.at(std::min(cut_rank - 1, i));
    k.block(w * o.out_quantum_dim, i * in_quantum_dim, o.out_quantum_dim,
            in_quantum_dim) = o.controlled_ops.at(i);
  }
  return k;
}

NormalFormTree NormalFormTree::node(NormalFormStep step,
                                    std::vector<NormalFormTree> children) {
  if (children.size() != step.outcomes.size()) {
    throw std::invalid_argument(
        "NormalFormTree: child count does not match outcome count");
  }
  NormalFormTree t;
  t.has_step_ = true;
  t.step_ = std::move(step);
  t.children_ = std::move(children);
  return t;
}

const NormalFormStep& NormalFormTree::step() const {
  if (!has_step_) throw std::logic_error("NormalFormTree: leaf has no step");
  return step_;
}

namespace {

NormalFormCheck check_fail(std::string reason) {
  return NormalFormCheck{false, std::move(reason)};
}

std::string at_step(int t) { return " at step " + std::to_string(t); }

}  // namespace

NormalFormCheck verify_normal_form(const std::vector<NormalFormStep>& steps,
                                   const std::vector<int>& outcomes,
                                   int wire_dim_bound) {
  if (outcomes.size() != steps.size()) {
    return check_fail("outcome path length does not match step count");
  }
  const int n = static_cast<int>(steps.size());
  if (n > wire_dim_bound) {
    return check_fail("step count " + std::to_string(n) +
                      " exceeds the wire dimension bound " +
                      std::to_string(wire_dim_bound));
  }
  for (int t = 0; t < n; ++t) {
    const NormalFormStep& s = steps[t];
    if (s.in_wire_dim < 1 || s.in_quantum_dim < 1) {
      return check_fail("empty input space" + at_step(t));
    }
    if (s.cut_rank < 1 || s.cut_rank > s.in_wire_dim) {
      return check_fail("cut rank out of range" + at_step(t));
    }
    if (s.outcomes.empty()) return check_fail("no outcomes" + at_step(t));
    if (outcomes[t] < 0 ||
        outcomes[t] >= static_cast<int>(s.outcomes.size())) {
      return check_fail("chosen outcome out of range" + at_step(t));
    }
    for (std::size_t a = 0; a < s.outcomes.size(); ++a) {
      const NormalFormOutcome& o = s.outcomes[a];
      const std::string where =
          at_step(t) + " outcome " + std::to_string(static_cast<int>(a));
      if (o.out_wire_dim < 1 || o.out_quantum_dim < 1) {
        return check_fail("empty output space" + where);
      }
      if (static_cast<int>(o.injection.size()) != s.cut_rank) {
        return check_fail("injection size differs from cut rank" + where);
      }
      std::vector<bool> seen(o.out_wire_dim, false);
      for (int v : o.injection) {
        if (v < 0 || v >= o.out_wire_dim) {
          return check_fail("injection label out of range" + where);
        }
        if (seen[v]) return check_fail("injection is not injective" + where);
        seen[v] = true;
      }
      if (static_cast<int>(o.controlled_ops.size()) != s.in_wire_dim) {
        return check_fail("controlled operator count differs from input wire dimension" +
                          where);
      }
      for (const ComplexMatrix& e : o.controlled_ops) {
        if (e.rows() != o.out_quantum_dim || e.cols() != s.in_quantum_dim) {
          return check_fail("controlled operator shape mismatch" + where);
        }
      }
    }
    const int in_dim = s.in_wire_dim * s.in_quantum_dim;
    ComplexMatrix sum = zero_matrix(in_dim, in_dim);
    for (std::size_t a = 0; a < s.outcomes.size(); ++a) {
      const ComplexMatrix k = s.kraus(static_cast<int>(a));
      sum += dagger(k) * k;
    }
    const double defect = max_abs_diff(sum, identity_matrix(in_dim));
    if (defect > tol::structural) {
      return check_fail("incomplete outcome set (defect " +
                        std::to_string(defect) + ")" + at_step(t));
    }
    if (t + 1 < n) {
      const NormalFormOutcome& o = s.outcomes[outcomes[t]];
      if (steps[t + 1].in_wire_dim != o.out_wire_dim ||
          steps[t + 1].in_quantum_dim != o.out_quantum_dim) {
        return check_fail("dimension chain breaks between steps " +
                          std::to_string(t) + " and " + std::to_string(t + 1));
      }
    }
    if (t >= 1) {
      const bool final_step = (t == n - 1);
      const int prev = steps[t - 1].cut_rank;
      const bool ok = final_step ? (s.cut_rank <= prev) : (s.cut_rank < prev);
      if (!ok) {
        return check_fail("cut ranks do not strictly decrease" + at_step(t));
      }
    }
  }
  return NormalFormCheck{};
}

namespace {

std::vector<std::string> names_of_kind(const SystemLayout& l, RegKind kind) {
  std::vector<std::string> names;
  for (const Register& r : l.registers()) {
    if (r.kind == kind) names.push_back(r.name);
  }
  return names;
}

SystemLayout kind_part(const SystemLayout& l, RegKind kind) {
  return l.restricted_to(names_of_kind(l, kind));
}

std::vector<int> iota_vec(int n) {
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

// Joint index of the op's registers inside a wire flat index, in op order.
int op_joint_index(const SystemLayout& wires, const std::vector<int>& pos,
                   const std::vector<int>& dims, int wire_flat) {
  const std::vector<int> digits = wires.digits_of(wire_flat);
  int joint = 0;
  for (std::size_t k = 0; k < pos.size(); ++k) {
    joint = joint * dims[k] + digits[pos[k]];
  }
  return joint;
}

struct CanonState {
  SystemLayout layout;
  // canonical wire label -> wire flat index of `layout`; distinct values
  std::vector<int> support;
};

class Compiler {
 public:
  explicit Compiler(int max_wire_dim) : max_wire_dim_(max_wire_dim) {}

  NormalFormTree compile(const ProtocolTree& node, const CanonState& st) {
    if (node.is_leaf()) return finalize(st);
    const ElementalOp& op = node.op();
    switch (op.kind) {
      case ElementalOp::Kind::permutation:
        return compile(node.children().at(0), permuted(st, op));
      case ElementalOp::Kind::phase:
        return phase_step(node, st);
      case ElementalOp::Kind::observed:
        return observed_step(node, st);
      case ElementalOp::Kind::forward:
        return forward_steps(node, st);
    }
    throw std::logic_error("compile_normal_form: unknown op kind");
  }

 private:
  // A leaf re-injects the canonical labels onto the branch's actual final
  // wire labels; the merge pass absorbs this into the preceding step.
  NormalFormTree finalize(const CanonState& st) {
    const int w_final = st.layout.wire_dim();
    if (w_final > max_wire_dim_) {
      throw std::runtime_error(
          "compile_normal_form: relabeled wire dimension " +
          std::to_string(w_final) + " exceeds max_wire_dim " +
          std::to_string(max_wire_dim_));
    }
    const int s = static_cast<int>(st.support.size());
    const int q = st.layout.quantum_dim();
    NormalFormStep step;
    step.in_wire_dim = s;
    step.in_quantum_dim = q;
    step.cut_rank = s;
    NormalFormOutcome o;
    o.injection = st.support;
    o.controlled_ops.assign(s, identity_matrix(q));
    o.out_wire_dim = w_final;
    o.out_quantum_dim = q;
    step.outcomes = {std::move(o)};
    return NormalFormTree::node(std::move(step), {NormalFormTree::leaf()});
  }

  // Wire permutations and trivial preparations never materialize as steps:
  // they only renumber the tracked support labels.
  static CanonState permuted(CanonState st, const ElementalOp& op) {
    detail::local_action(op, st.layout);  // validation only
    const SystemLayout wires = kind_part(st.layout, RegKind::wire);
    std::vector<int> pos, dims;
    for (const std::string& name : op.regs) {
      pos.push_back(wires.index_of(name));
      dims.push_back(wires.reg(pos.back()).dim);
    }
    for (int& w : st.support) {
      std::vector<int> digits = wires.digits_of(w);
      int joint = 0;
      for (std::size_t k = 0; k < pos.size(); ++k) {
        joint = joint * dims[k] + digits[pos[k]];
      }
      int mapped = op.table.at(joint);
      for (int k = static_cast<int>(pos.size()) - 1; k >= 0; --k) {
        digits[pos[k]] = mapped % dims[k];
        mapped /= dims[k];
      }
      w = wires.flat_index(digits);
    }
    return st;
  }

  NormalFormTree phase_step(const ProtocolTree& node, const CanonState& st) {
    const ElementalOp& op = node.op();
    detail::local_action(op, st.layout);  // validation only
    const SystemLayout wires = kind_part(st.layout, RegKind::wire);
    std::vector<int> pos, dims;
    for (const std::string& name : op.regs) {
      pos.push_back(wires.index_of(name));
      dims.push_back(wires.reg(pos.back()).dim);
    }
    const int s = static_cast<int>(st.support.size());
    const int q = st.layout.quantum_dim();
    NormalFormStep step;
    step.in_wire_dim = s;
    step.in_quantum_dim = q;
    step.cut_rank = s;
    NormalFormOutcome o;
    o.injection = iota_vec(s);
    o.out_wire_dim = s;
    o.out_quantum_dim = q;
    o.source_outcomes = {0};
    for (int k = 0; k < s; ++k) {
      const int joint = op_joint_index(wires, pos, dims, st.support[k]);
      const Complex phase = std::polar(1.0, op.angles.at(joint));
      o.controlled_ops.push_back(phase * identity_matrix(q));
    }
    step.outcomes = {std::move(o)};
    return NormalFormTree::node(std::move(step),
                                {compile(node.children().at(0), st)});
  }

  NormalFormTree observed_step(const ProtocolTree& node, const CanonState& st) {
    const ElementalOp& op = node.op();
    const detail::LocalAction act = detail::local_action(op, st.layout);
    const SystemLayout in_q = kind_part(st.layout, RegKind::quantum);
    const SystemLayout out_q = kind_part(act.layout_after, RegKind::quantum);
    std::vector<int> in_sel, out_sel;
    for (const std::string& name : act.in_regs) {
      in_sel.push_back(in_q.index_of(name));
    }
    for (const std::string& name : act.out_regs) {
      out_sel.push_back(out_q.index_of(name));
    }
    const int n_outcomes = static_cast<int>(act.outcome_kraus.size());
    std::vector<ComplexMatrix> lifted;
    lifted.reserve(n_outcomes);
    for (const ComplexMatrix& k : act.outcome_kraus) {
      lifted.push_back(lift_operator(k, in_q, in_sel, out_q, out_sel));
    }

    auto advanced = [&](int a) {
      CanonState next{act.layout_after, st.support};
      for (int& w : next.support) w = w * act.record_dim + a;
      return next;
    };

    // A single outcome that acts as the identity on the quantum side (a bare
    // wire preparation) is pure label bookkeeping.
    if (n_outcomes == 1 && lifted[0].rows() == lifted[0].cols() &&
        max_abs_diff(lifted[0],
                     identity_matrix(static_cast<int>(lifted[0].rows()))) ==
            0.0) {
      return compile(node.children().at(0), advanced(0));
    }

    const int s = static_cast<int>(st.support.size());
    NormalFormStep step;
    step.in_wire_dim = s;
    step.in_quantum_dim = in_q.total_dim();
    step.cut_rank = s;
    std::vector<NormalFormTree> children;
    for (int a = 0; a < n_outcomes; ++a) {
      NormalFormOutcome o;
      o.injection = iota_vec(s);
      o.controlled_ops.assign(s, lifted[a]);
      o.out_wire_dim = s;
      o.out_quantum_dim = out_q.total_dim();
      o.source_outcomes = {a};
      step.outcomes.push_back(std::move(o));
      children.push_back(compile(node.children().at(a), advanced(a)));
    }
    return NormalFormTree::node(std::move(step), std::move(children));
  }

  // Forwarding first tags the quantum side with the source digit of every
  // support label (a collapse-free step), then collapses each group of
  // labels sharing a residual wire value, last group first so each collapse
  // acts on a label suffix. The cyclic relabeling after each collapse parks
  // finished representatives at the bottom, so the final support lists the
  // residual wire values in ascending order.
  NormalFormTree forward_steps(const ProtocolTree& node, const CanonState& st) {
    const ElementalOp& op = node.op();
    const detail::LocalAction act = detail::local_action(op, st.layout);
    const SystemLayout wires = kind_part(st.layout, RegKind::wire);
    const SystemLayout wires_after = kind_part(act.layout_after, RegKind::wire);
    const int src_pos = wires.index_of(op.source);
    const int d = wires.reg(src_pos).dim;
    const int s = static_cast<int>(st.support.size());
    const int q = st.layout.quantum_dim();

    struct Entry {
      int cls;
      int member;
      int label;
    };
    std::vector<Entry> entries;
    entries.reserve(s);
    for (int k = 0; k < s; ++k) {
      std::vector<int> digits = wires.digits_of(st.support[k]);
      const int member = digits[src_pos];
      digits.erase(digits.begin() + src_pos);
      entries.push_back({wires_after.flat_index(digits), member, k});
    }
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) {
                return a.cls != b.cls ? a.cls < b.cls : a.member < b.member;
              });
    std::vector<int> rank(s), member_of_label(s);
    for (int r = 0; r < s; ++r) {
      rank[entries[r].label] = r;
      member_of_label[entries[r].label] = entries[r].member;
    }
    std::vector<int> class_val;
    std::vector<std::vector<int>> class_members;
    for (const Entry& e : entries) {
      if (class_val.empty() || class_val.back() != e.cls) {
        class_val.push_back(e.cls);
        class_members.emplace_back();
      }
      class_members.back().push_back(e.member);
    }
    const int n_classes = static_cast<int>(class_val.size());

    std::vector<NormalFormStep> chain;
    bool first_emitted = true;

    bool tagging_is_identity = (d == 1);
    if (tagging_is_identity) {
      for (int k = 0; k < s; ++k) {
        if (rank[k] != k) {
          tagging_is_identity = false;
          break;
        }
      }
    }
    if (!tagging_is_identity) {
      NormalFormStep tag;
      tag.in_wire_dim = s;
      tag.in_quantum_dim = q;
      tag.cut_rank = s;
      NormalFormOutcome o;
      o.injection = rank;
      o.out_wire_dim = s;
      o.out_quantum_dim = q * d;
      o.source_outcomes = {0};
      first_emitted = false;
      for (int i = 0; i < s; ++i) {
        o.controlled_ops.push_back(
            kron(identity_matrix(q), basis_ket(d, member_of_label[i])));
      }
      tag.outcomes = {std::move(o)};
      chain.push_back(std::move(tag));
    }

    const int qd = q * d;
    for (int c = n_classes - 1; c >= 0; --c) {
      const int reps = n_classes - 1 - c;
      int prefix = 0;
      for (int cc = 0; cc < c; ++cc) {
        prefix += static_cast<int>(class_members[cc].size());
      }
      const int size_c = static_cast<int>(class_members[c].size());
      const int in_dim = reps + prefix + size_c;
      const int cut = reps + prefix + 1;

      NormalFormStep cs;
      cs.in_wire_dim = in_dim;
      cs.in_quantum_dim = qd;
      cs.cut_rank = cut;
      std::vector<int> cyclic(cut);
      cyclic[cut - 1] = 0;
      for (int y = 0; y + 1 < cut; ++y) cyclic[y] = y + 1;

      NormalFormOutcome live;
      live.injection = cyclic;
      live.out_wire_dim = cut;
      live.out_quantum_dim = qd;
      if (first_emitted) {
        live.source_outcomes = {0};
        first_emitted = false;
      }
      for (int i = 0; i < in_dim; ++i) {
        if (i < cut - 1 || size_c == 1) {
          live.controlled_ops.push_back(identity_matrix(qd));
        } else {
          const int j = class_members[c][i - (cut - 1)];
          ComplexMatrix proj = zero_matrix(d, d);
          proj(j, j) = 1.0;
          live.controlled_ops.push_back(kron(identity_matrix(q), proj));
        }
      }
      cs.outcomes.push_back(std::move(live));

      if (size_c >= 2) {
        for (int t = 0; t < size_c; ++t) {
          const int j = class_members[c][t];
          NormalFormOutcome deado;
          deado.injection = cyclic;
          deado.out_wire_dim = cut;
          deado.out_quantum_dim = qd;
          deado.dead = true;
          deado.controlled_ops.assign(in_dim, zero_matrix(qd, qd));
          ComplexMatrix comp = identity_matrix(d);
          comp(j, j) = 0.0;
          deado.controlled_ops[cut - 1 + t] = kron(identity_matrix(q), comp);
          cs.outcomes.push_back(std::move(deado));
        }
      }
      chain.push_back(std::move(cs));
    }

    CanonState next{act.layout_after, class_val};
    NormalFormTree cur = compile(node.children().at(0), next);
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      std::vector<NormalFormTree> children;
      children.push_back(std::move(cur));
      for (std::size_t a = 1; a < it->outcomes.size(); ++a) {
        children.push_back(NormalFormTree::leaf());
      }
      cur = NormalFormTree::node(std::move(*it), std::move(children));
    }
    return cur;
  }

  int max_wire_dim_;
};

NormalFormOutcome combine_outcomes(const NormalFormStep& parent,
                                   const NormalFormOutcome& po,
                                   const NormalFormOutcome& fo) {
  NormalFormOutcome o;
  o.out_wire_dim = fo.out_wire_dim;
  o.out_quantum_dim = fo.out_quantum_dim;
  o.dead = po.dead || fo.dead;
  o.source_outcomes = po.source_outcomes;
  o.source_outcomes.insert(o.source_outcomes.end(), fo.source_outcomes.begin(),
                           fo.source_outcomes.end());
  o.injection.resize(parent.cut_rank);
  for (int y = 0; y < parent.cut_rank; ++y) {
    o.injection[y] = fo.injection.at(po.injection[y]);
  }
  o.controlled_ops.reserve(parent.in_wire_dim);
  for (int i = 0; i < parent.in_wire_dim; ++i) {
    const int mid = po.injection[std::min(parent.cut_rank - 1, i)];
    o.controlled_ops.push_back(fo.controlled_ops.at(mid) *
                               po.controlled_ops[i]);
  }
  return o;
}

// Merges every collapse-free step into its predecessor's outcome. Afterwards
// each non-root step collapses strictly below its input dimension, so cut
// ranks strictly decrease along every branch and the branch length is
// bounded by the initial wire dimension.
NormalFormTree fold_tree(const NormalFormTree& t) {
  if (t.is_leaf()) return t;
  NormalFormStep step = t.step();
  std::vector<NormalFormTree> children;
  children.reserve(t.children().size());
  for (const NormalFormTree& c : t.children()) children.push_back(fold_tree(c));

  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<NormalFormOutcome> outs;
    std::vector<NormalFormTree> ch;
    for (std::size_t o = 0; o < step.outcomes.size(); ++o) {
      const NormalFormTree& child = children[o];
      if (child.is_leaf() || !child.step().cutless()) {
        outs.push_back(step.outcomes[o]);
        ch.push_back(child);
        continue;
      }
      const NormalFormStep& front = child.step();
      if (front.in_wire_dim != step.outcomes[o].out_wire_dim ||
          front.in_quantum_dim != step.outcomes[o].out_quantum_dim) {
        throw std::logic_error(
            "compile_normal_form: dimension chain broke during merging");
      }
      changed = true;
      for (std::size_t b = 0; b < front.outcomes.size(); ++b) {
        outs.push_back(
            combine_outcomes(step, step.outcomes[o], front.outcomes[b]));
        ch.push_back(child.children()[b]);
      }
    }
    step.outcomes = std::move(outs);
    children = std::move(ch);
  }
  return NormalFormTree::node(std::move(step), std::move(children));
}

}  // namespace

CompiledNormalForm compile_normal_form(const ProtocolTree& tree,
                                       const SystemLayout& layout,
                                       int max_wire_dim) {
  CanonState st{layout, iota_vec(layout.wire_dim())};
  Compiler compiler(max_wire_dim);
  CompiledNormalForm out;
  out.tree = fold_tree(compiler.compile(tree, st));
  out.in_wire_dim = layout.wire_dim();
  out.in_quantum_dim = layout.quantum_dim();
  return out;
}

namespace {

void collect_branches(const NormalFormTree& t, const NormalFormBranch& prefix,
                      std::vector<NormalFormBranch>& out) {
  if (t.is_leaf()) {
    out.push_back(prefix);
    return;
  }
  for (std::size_t a = 0; a < t.step().outcomes.size(); ++a) {
    NormalFormBranch next = prefix;
    next.steps.push_back(t.step());
    next.outcomes.push_back(static_cast<int>(a));
    const NormalFormOutcome& o = t.step().outcomes[a];
    next.dead = next.dead || o.dead;
    next.source_outcomes.insert(next.source_outcomes.end(),
                                o.source_outcomes.begin(),
                                o.source_outcomes.end());
    const NormalFormTree& child = t.children()[a];
    if (child.is_leaf()) {
      out.push_back(std::move(next));
    } else {
      collect_branches(child, next, out);
    }
  }
}

}  // namespace

std::vector<NormalFormBranch> normal_form_branches(const NormalFormTree& tree) {
  std::vector<NormalFormBranch> out;
  collect_branches(tree, NormalFormBranch{}, out);
  return out;
}

std::vector<RecomposedBranch> recompose_normal_form(
    const CompiledNormalForm& nf) {
  std::vector<RecomposedBranch> out;
  for (const NormalFormBranch& b : normal_form_branches(nf.tree)) {
    RecomposedBranch r;
    r.source_outcomes = b.source_outcomes;
    r.outcomes = b.outcomes;
    r.dead = b.dead;
    r.op = identity_matrix(nf.in_wire_dim * nf.in_quantum_dim);
    for (std::size_t t = 0; t < b.steps.size(); ++t) {
      r.op = b.steps[t].kraus(b.outcomes[t]) * r.op;
    }
    out.push_back(std::move(r));
  }
  return out;
}

double choi_distance_upper_bound(const std::vector<ComplexMatrix>& a,
                                 const std::vector<ComplexMatrix>& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(
        "choi_distance_upper_bound: Kraus lists are not branch-aligned");
  }
  double bound = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].rows() != b[k].rows() || a[k].cols() != b[k].cols()) {
      throw std::invalid_argument(
          "choi_distance_upper_bound: Kraus shapes differ at index " +
          std::to_string(k));
    }
    bound += max_abs_diff(a[k], b[k]) * (max_abs(a[k]) + max_abs(b[k]));
  }
  return bound;
}

}  // namespace lop
