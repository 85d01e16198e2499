#include "lop/protocol.hpp"

#include <stdexcept>
#include <utility>

#include "lop/rng.hpp"

namespace lop {

ProtocolTree ProtocolTree::step(ElementalOp op,
                                std::vector<ProtocolTree> children) {
  if (static_cast<int>(children.size()) != op.outcome_count()) {
    throw std::invalid_argument(
        "ProtocolTree: outcome map missing a branch (" +
        std::to_string(children.size()) + " children for " +
        std::to_string(op.outcome_count()) + " outcomes)");
  }
  ProtocolTree t;
  t.has_op_ = true;
  t.op_ = std::move(op);
  t.children_ = std::move(children);
  return t;
}

ProtocolTree ProtocolTree::step_uniform(ElementalOp op,
                                        ProtocolTree continuation) {
  std::vector<ProtocolTree> children(op.outcome_count(), continuation);
  return step(std::move(op), std::move(children));
}

ProtocolTree ProtocolTree::step_select(
    const ElementalOp& op,
    const std::function<ProtocolTree(int)>& make_child) {
  std::vector<ProtocolTree> children;
  children.reserve(op.outcome_count());
  for (int a = 0; a < op.outcome_count(); ++a) children.push_back(make_child(a));
  return step(op, std::move(children));
}

ProtocolTree ProtocolTree::chain(const std::vector<ElementalOp>& ops) {
  ProtocolTree t = leaf();
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
    t = step_uniform(*it, std::move(t));
  }
  return t;
}

const ElementalOp& ProtocolTree::op() const {
  if (!has_op_) throw std::logic_error("ProtocolTree: leaf has no op");
  return op_;
}

ProtocolTree ProtocolTree::then(const ProtocolTree& next) const {
  if (is_leaf()) return next;
  ProtocolTree t;
  t.has_op_ = true;
  t.op_ = op_;
  t.children_.reserve(children_.size());
  for (const auto& c : children_) t.children_.push_back(c.then(next));
  return t;
}

int ProtocolTree::depth() const {
  if (is_leaf()) return 0;
  int d = 0;
  for (const auto& c : children_) d = std::max(d, c.depth());
  return 1 + d;
}

int ProtocolTree::leaf_count() const {
  if (is_leaf()) return 1;
  int n = 0;
  for (const auto& c : children_) n += c.leaf_count();
  return n;
}

namespace {

// State threaded through the branch walk: the running operator restricted to
// the live registers, plus the symbolic values of the definite ones.
struct WalkState {
  SystemLayout layout;
  SystemLayout live;
  std::map<std::string, int> definite;
  ComplexMatrix op;  // live dim x initial dim
  std::vector<int> outcomes;
};

std::vector<std::string> names_of(const SystemLayout& layout) {
  std::vector<std::string> names;
  names.reserve(layout.size());
  for (const auto& r : layout.registers()) names.push_back(r.name);
  return names;
}

// Embedding matrix that re-inserts fixed basis digits: rows run over
// `full`, columns over `live`; definite registers carry their pinned value.
ComplexMatrix embed_definite(const SystemLayout& full,
                             const SystemLayout& live,
                             const std::map<std::string, int>& definite) {
  ComplexMatrix f = zero_matrix(full.total_dim(), live.total_dim());
  for (int r = 0; r < live.total_dim(); ++r) {
    std::vector<int> live_digits = live.digits_of(r);
    std::vector<int> full_digits(full.size());
    int li = 0;
    for (int i = 0; i < full.size(); ++i) {
      auto it = definite.find(full.reg(i).name);
      if (it != definite.end()) {
        full_digits[i] = it->second;
      } else {
        full_digits[i] = live_digits[li++];
      }
    }
    f(full.flat_index(full_digits), r) = 1.0;
  }
  return f;
}

// Moves one pinned register back into the live operator.
void reinflate(WalkState& s, const std::string& name) {
  auto it = s.definite.find(name);
  if (it == s.definite.end()) return;
  std::vector<std::string> live_names = names_of(s.live);
  live_names.push_back(name);
  SystemLayout new_live = s.layout.restricted_to(live_names);
  std::map<std::string, int> only{{name, it->second}};
  s.op = embed_definite(new_live, s.live, only) * s.op;
  s.live = std::move(new_live);
  s.definite.erase(it);
}

template <typename Sink>
void walk(const ProtocolTree& node, WalkState s, const Sink& sink) {
  if (node.is_leaf()) {
    sink(std::move(s));
    return;
  }
  const ElementalOp& op = node.op();
  if (static_cast<int>(node.children().size()) != op.outcome_count()) {
    throw std::invalid_argument("execute: outcome map missing a branch");
  }
  detail::LocalAction act = detail::local_action(op, s.layout);
  for (const auto& name : act.in_regs) reinflate(s, name);

  std::vector<std::string> live_names = names_of(s.live);
  if (op.kind == ElementalOp::Kind::forward) {
    live_names.erase(
        std::find(live_names.begin(), live_names.end(), op.source));
    live_names.push_back(op.target);
  } else if (op.kind == ElementalOp::Kind::observed) {
    for (const auto& c : op.created) live_names.push_back(c.name);
  }
  SystemLayout live_after = act.layout_after.restricted_to(live_names);

  std::vector<int> in_sel, out_sel;
  for (const auto& name : act.in_regs) in_sel.push_back(s.live.index_of(name));
  for (const auto& name : act.out_regs) {
    out_sel.push_back(live_after.index_of(name));
  }

  for (int a = 0; a < op.outcome_count(); ++a) {
    ComplexMatrix lifted =
        lift_operator(act.outcome_kraus[a], s.live, in_sel, live_after, out_sel);
    WalkState next;
    next.layout = act.layout_after;
    next.live = live_after;
    next.definite = s.definite;
    if (!act.record_reg.empty()) next.definite[act.record_reg] = a;
    next.op = lifted * s.op;
    next.outcomes = s.outcomes;
    next.outcomes.push_back(a);
    walk(node.children()[a], std::move(next), sink);
  }
}

WalkState initial_state(const SystemLayout& layout) {
  WalkState s;
  s.layout = layout;
  s.live = layout;
  s.op = identity_matrix(layout.total_dim());
  return s;
}

}  // namespace

ComplexMatrix BranchOperator::full_operator() const {
  return embed_definite(layout, live_layout, definite) * op;
}

DensityMatrix OutcomePath::full_state() const {
  ComplexMatrix f = embed_definite(layout, live_layout, definite);
  return DensityMatrix(f * state.matrix() * dagger(f));
}

std::vector<BranchOperator> branch_operators(const ProtocolTree& tree,
                                             const SystemLayout& layout) {
  std::vector<BranchOperator> out;
  walk(tree, initial_state(layout), [&](WalkState&& s) {
    BranchOperator b;
    b.outcomes = std::move(s.outcomes);
    b.layout = std::move(s.layout);
    b.live_layout = std::move(s.live);
    b.definite = std::move(s.definite);
    b.op = std::move(s.op);
    out.push_back(std::move(b));
  });
  return out;
}

BranchReport execute_all_branches(const ProtocolTree& tree,
                                  const DensityMatrix& rho,
                                  const SystemLayout& layout) {
  if (rho.dim() != layout.total_dim()) {
    throw std::invalid_argument("execute: state/layout mismatch");
  }
  BranchReport report;
  walk(tree, initial_state(layout), [&](WalkState&& s) {
    ComplexMatrix unnorm = s.op * rho.matrix() * dagger(s.op);
    double p = unnorm.trace().real();
    if (p < tol::branch_prune) {
      report.pruned_count += 1;
      report.pruned_probability += std::max(p, 0.0);
      return;
    }
    OutcomePath path;
    path.outcomes = std::move(s.outcomes);
    path.probability = p;
    path.layout = std::move(s.layout);
    path.live_layout = std::move(s.live);
    path.definite = std::move(s.definite);
    path.state = DensityMatrix(unnorm / p);
    report.branches.push_back(std::move(path));
  });
  return report;
}

std::pair<DensityMatrix, SystemLayout> execute_average(
    const ProtocolTree& tree, const DensityMatrix& rho,
    const SystemLayout& layout) {
  auto [channel, final_layout] = to_channel(tree, layout);
  return {DensityMatrix(apply_channel_raw(channel, rho.matrix())),
          final_layout};
}

OutcomePath execute_sampled(const ProtocolTree& tree, const DensityMatrix& rho,
                            const SystemLayout& layout, uint64_t seed) {
  if (rho.dim() != layout.total_dim()) {
    throw std::invalid_argument("execute: state/layout mismatch");
  }
  Rng rng(seed);

  SystemLayout cur_layout = layout;
  SystemLayout live = layout;
  std::map<std::string, int> definite;
  ComplexMatrix state = rho.matrix();
  double probability = 1.0;
  std::vector<int> outcomes;

  const ProtocolTree* node = &tree;
  while (!node->is_leaf()) {
    const ElementalOp& op = node->op();
    if (static_cast<int>(node->children().size()) != op.outcome_count()) {
      throw std::invalid_argument("execute: outcome map missing a branch");
    }
    detail::LocalAction act = detail::local_action(op, cur_layout);
    for (const auto& name : act.in_regs) {
      auto it = definite.find(name);
      if (it == definite.end()) continue;
      std::vector<std::string> live_names = names_of(live);
      live_names.push_back(name);
      SystemLayout new_live = cur_layout.restricted_to(live_names);
      std::map<std::string, int> only{{name, it->second}};
      ComplexMatrix f = embed_definite(new_live, live, only);
      state = f * state * dagger(f);
      live = std::move(new_live);
      definite.erase(it);
    }

    std::vector<std::string> live_names = names_of(live);
    if (op.kind == ElementalOp::Kind::forward) {
      live_names.erase(
          std::find(live_names.begin(), live_names.end(), op.source));
      live_names.push_back(op.target);
    } else if (op.kind == ElementalOp::Kind::observed) {
      for (const auto& c : op.created) live_names.push_back(c.name);
    }
    SystemLayout live_after = act.layout_after.restricted_to(live_names);
    std::vector<int> in_sel, out_sel;
    for (const auto& name : act.in_regs) in_sel.push_back(live.index_of(name));
    for (const auto& name : act.out_regs) {
      out_sel.push_back(live_after.index_of(name));
    }

    std::vector<ComplexMatrix> posts;
    std::vector<double> probs;
    posts.reserve(op.outcome_count());
    for (int a = 0; a < op.outcome_count(); ++a) {
      ComplexMatrix lifted = lift_operator(act.outcome_kraus[a], live, in_sel,
                                           live_after, out_sel);
      ComplexMatrix post = lifted * state * dagger(lifted);
      probs.push_back(std::max(post.trace().real(), 0.0));
      posts.push_back(std::move(post));
    }

    int chosen = 0;
    if (op.outcome_count() > 1) {
      double total = 0.0;
      for (double p : probs) total += p;
      double u = rng.uniform() * total;
      double acc = 0.0;
      chosen = op.outcome_count() - 1;
      for (int a = 0; a < op.outcome_count(); ++a) {
        acc += probs[a];
        if (u < acc) {
          chosen = a;
          break;
        }
      }
    }
    if (probs[chosen] <= 0.0) {
      throw std::runtime_error("execute: sampled a zero-probability outcome");
    }

    state = posts[chosen] / probs[chosen];
    probability *= probs[chosen];
    outcomes.push_back(chosen);
    cur_layout = act.layout_after;
    live = live_after;
    if (!act.record_reg.empty()) definite[act.record_reg] = chosen;
    node = &node->children()[chosen];
  }

  OutcomePath path;
  path.outcomes = std::move(outcomes);
  path.probability = probability;
  path.layout = std::move(cur_layout);
  path.live_layout = std::move(live);
  path.definite = std::move(definite);
  path.state = DensityMatrix(state);
  return path;
}

std::pair<QuantumChannel, SystemLayout> to_channel(const ProtocolTree& tree,
                                                   const SystemLayout& layout) {
  std::vector<BranchOperator> branches = branch_operators(tree, layout);
  const SystemLayout& final_layout = branches.front().layout;
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(branches.size());
  for (const auto& b : branches) {
    if (!b.layout.same_registers(final_layout)) {
      throw std::invalid_argument(
          "to_channel: branches end in different layouts");
    }
    kraus.push_back(b.full_operator());
  }
  return {QuantumChannel(std::move(kraus)), final_layout};
}

std::pair<QuantumChannel, SystemLayout> to_channel_on(
    const ProtocolTree& tree, const SystemLayout& layout,
    const std::vector<std::string>& keep) {
  std::vector<BranchOperator> branches = branch_operators(tree, layout);
  SystemLayout kept = branches.front().layout.restricted_to(keep);

  std::vector<ComplexMatrix> kraus;
  for (auto& b : branches) {
    if (!b.layout.restricted_to(keep).same_registers(kept)) {
      throw std::invalid_argument(
          "to_channel_on: branches disagree on the kept registers");
    }
    // Rematerialize kept registers that happen to be definite.
    WalkState s;
    s.layout = b.layout;
    s.live = b.live_layout;
    s.definite = b.definite;
    s.op = std::move(b.op);
    for (const auto& name : keep) reinflate(s, name);

    // Split the branch per joint basis value of the traced live registers;
    // dropping the definite (and in particular dimension-1) remainder is
    // exact and adds nothing.
    std::vector<int> kept_pos, traced_pos;
    for (int i = 0; i < s.live.size(); ++i) {
      bool is_kept = false;
      for (const auto& name : keep) {
        if (s.live.reg(i).name == name) is_kept = true;
      }
      (is_kept ? kept_pos : traced_pos).push_back(i);
    }
    int traced_dim = 1;
    for (int i : traced_pos) traced_dim *= s.live.reg(i).dim;

    for (int v = 0; v < traced_dim; ++v) {
      ComplexMatrix part = zero_matrix(kept.total_dim(), s.op.cols());
      // Row selector: live rows whose traced digits spell v, reordered to
      // the kept layout.
      std::vector<int> digits(s.live.size(), 0);
      int rem = v;
      for (auto it = traced_pos.rbegin(); it != traced_pos.rend(); ++it) {
        digits[*it] = rem % s.live.reg(*it).dim;
        rem /= s.live.reg(*it).dim;
      }
      for (int kr = 0; kr < kept.total_dim(); ++kr) {
        std::vector<int> kd = kept.digits_of(kr);
        for (std::size_t j = 0; j < kept_pos.size(); ++j) {
          digits[kept_pos[j]] = kd[j];
        }
        part.row(kr) = s.op.row(s.live.flat_index(digits));
      }
      if (max_abs(part) > 0.0) kraus.push_back(std::move(part));
    }
  }
  return {QuantumChannel(std::move(kraus)), kept};
}

}  // namespace lop
