#pragma once

#include "lop/elemental.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace lop {

// Finite branching protocol: a leaf, or an elemental operation with one
// subtree per outcome. Deterministic operations have exactly one child;
// observed operations have one child per Kraus operator.
class ProtocolTree {
 public:
  ProtocolTree() = default;  // leaf

  static ProtocolTree leaf() { return ProtocolTree(); }
  // Throws unless children.size() == op.outcome_count().
  static ProtocolTree step(ElementalOp op, std::vector<ProtocolTree> children);
  // Every outcome continues identically.
  static ProtocolTree step_uniform(ElementalOp op, ProtocolTree continuation);
  // Outcome alpha continues with make_child(alpha).
  static ProtocolTree step_select(
      const ElementalOp& op,
      const std::function<ProtocolTree(int)>& make_child);
  // Linear chain of deterministic-or-uniform steps ending in a leaf.
  static ProtocolTree chain(const std::vector<ElementalOp>& ops);

  bool is_leaf() const { return !has_op_; }
  const ElementalOp& op() const;
  const std::vector<ProtocolTree>& children() const { return children_; }

  // A copy of this tree with `next` grafted onto every leaf.
  ProtocolTree then(const ProtocolTree& next) const;

  int depth() const;
  int leaf_count() const;

 private:
  bool has_op_ = false;
  ElementalOp op_;
  std::vector<ProtocolTree> children_;
};

// One leaf branch of a protocol as a linear operator on states. To keep
// matrices small, registers whose content is a known basis state (outcome
// wires, never-touched preparations) are held symbolically in `definite`
// rather than materialized: `op` maps the full initial space to the joint
// space of `live_layout` only, and the branch's full operator is op tensored
// with the definite basis kets.
struct BranchOperator {
  std::vector<int> outcomes;          // one entry per step along the path
  SystemLayout layout;                // every register at the end
  SystemLayout live_layout;           // the registers `op` acts into
  std::map<std::string, int> definite;  // pinned register -> basis value
  ComplexMatrix op;  // live_layout.total_dim() x initial total_dim

  // Expands the definite factors; rows run over `layout`.
  ComplexMatrix full_operator() const;
};

std::vector<BranchOperator> branch_operators(const ProtocolTree& tree,
                                             const SystemLayout& layout);

// One executed branch: outcome record, its probability, and the normalized
// post-selected state in the same factored form as BranchOperator.
struct OutcomePath {
  std::vector<int> outcomes;
  double probability = 0.0;
  SystemLayout layout;
  SystemLayout live_layout;
  std::map<std::string, int> definite;
  DensityMatrix state;  // on live_layout; meaningful when probability > 0

  DensityMatrix full_state() const;  // expands to `layout`
};

struct BranchReport {
  std::vector<OutcomePath> branches;
  int pruned_count = 0;          // branches below the pruning threshold
  double pruned_probability = 0.0;
};

// All post-selected branches; probabilities sum to 1 up to the pruned mass.
BranchReport execute_all_branches(const ProtocolTree& tree,
                                  const DensityMatrix& rho,
                                  const SystemLayout& layout);

// The unconditional output sum_branches B rho B^dag, with its layout.
// Identical arithmetic to apply_channel(to_channel(tree), rho).
std::pair<DensityMatrix, SystemLayout> execute_average(
    const ProtocolTree& tree, const DensityMatrix& rho,
    const SystemLayout& layout);

// Follows a single branch, sampling each outcome from its Born probability
// with the given seed; deterministic for fixed (tree, rho, seed).
OutcomePath execute_sampled(const ProtocolTree& tree, const DensityMatrix& rho,
                            const SystemLayout& layout, uint64_t seed);

// The protocol as one channel: Kraus operators are the full per-branch
// operators, ordered depth-first with ascending outcomes. All branches must
// end in the same layout.
std::pair<QuantumChannel, SystemLayout> to_channel(const ProtocolTree& tree,
                                                   const SystemLayout& layout);

// The channel seen on the `keep` registers only: every other final register
// is discarded. Discarding a definite or dimension-1 register is exact;
// discarding a live register splits each branch operator per basis value.
// All branches must agree on the kept registers' names and dims.
std::pair<QuantumChannel, SystemLayout> to_channel_on(
    const ProtocolTree& tree, const SystemLayout& layout,
    const std::vector<std::string>& keep);

}  // namespace lop
