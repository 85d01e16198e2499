#pragma once

#include "lop/protocol.hpp"

#include <string>
#include <vector>

namespace lop {

// One outcome of a normal-form step. The assembled operator is
//   K = sum_{i < in_wire_dim} |injection[min(cut_rank-1, i)]><i|_W (x) controlled_ops[i]
// i.e. wire labels at or above the cut collapse onto the cut's last label,
// the surviving labels are relabeled by the injection, and each original
// label i drives its own operator on the quantum side.
struct NormalFormOutcome {
  std::vector<int> injection;       // size cut_rank; distinct, < out_wire_dim
  std::vector<ComplexMatrix> controlled_ops;  // size in_wire_dim
  int out_wire_dim = 0;
  int out_quantum_dim = 1;
  // Completeness filler with no support on reachable states; its branch
  // product is exactly zero.
  bool dead = false;
  // Which outcomes of the source protocol were merged into this one.
  std::vector<int> source_outcomes;
};

struct NormalFormStep {
  int in_wire_dim = 0;
  int in_quantum_dim = 1;
  int cut_rank = 0;  // in [1, in_wire_dim]; == in_wire_dim means no collapse
  std::vector<NormalFormOutcome> outcomes;

  bool cutless() const { return cut_rank == in_wire_dim; }
  ComplexMatrix kraus(int outcome) const;
};

// Branching sequence of normal-form steps, mirroring the protocol's
// outcome structure.
class NormalFormTree {
 public:
  NormalFormTree() = default;  // leaf
  static NormalFormTree leaf() { return NormalFormTree(); }
  static NormalFormTree node(NormalFormStep step,
                             std::vector<NormalFormTree> children);

  bool is_leaf() const { return !has_step_; }
  const NormalFormStep& step() const;
  const std::vector<NormalFormTree>& children() const { return children_; }

 private:
  bool has_step_ = false;
  NormalFormStep step_;
  std::vector<NormalFormTree> children_;
};

struct NormalFormCheck {
  bool ok = true;
  std::string reason;
  explicit operator bool() const { return ok; }
};

// Structural verification of one root-to-leaf step sequence, following the
// chosen outcome at each step: field shapes, injective injections, chained
// dimensions, per-step completeness, cut ranks strictly decreasing after the
// first step, and step count <= wire_dim_bound.
NormalFormCheck verify_normal_form(const std::vector<NormalFormStep>& steps,
                                   const std::vector<int>& outcomes,
                                   int wire_dim_bound);

struct NormalFormBranch {
  std::vector<NormalFormStep> steps;
  std::vector<int> outcomes;  // chosen outcome index per step
  bool dead = false;
  std::vector<int> source_outcomes;
};

std::vector<NormalFormBranch> normal_form_branches(const NormalFormTree& tree);

struct CompiledNormalForm {
  NormalFormTree tree;
  int in_wire_dim = 1;
  int in_quantum_dim = 1;
};

// Compiles a protocol into normal form over the sorted wire (x) quantum
// spaces. Wire permutations and trivial preparations become pure label
// bookkeeping; phases and instruments become collapse-free steps; forwarding
// becomes a member-tagging step plus one suffix collapse per surviving wire
// label class; consecutive collapse-free steps are merged into their
// predecessor, after which cut ranks strictly decrease and the per-branch
// step count is bounded by the initial wire dimension. Throws when a
// branch's final wire dimension exceeds max_wire_dim.
CompiledNormalForm compile_normal_form(const ProtocolTree& tree,
                                       const SystemLayout& layout,
                                       int max_wire_dim = 64);

// Per-branch products of the compiled steps; `op` maps the sorted initial
// space to the sorted final space of that branch.
struct RecomposedBranch {
  std::vector<int> source_outcomes;
  std::vector<int> outcomes;  // outcome index per step in the compiled tree
  bool dead = false;
  ComplexMatrix op;
};
std::vector<RecomposedBranch> recompose_normal_form(
    const CompiledNormalForm& nf);

// Rigorous upper bound on the entrywise distance between the Choi
// fingerprints of two channels given as branch-aligned Kraus lists (same
// count, same shapes).
double choi_distance_upper_bound(const std::vector<ComplexMatrix>& a,
                                 const std::vector<ComplexMatrix>& b);

}  // namespace lop
