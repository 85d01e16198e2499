#include <doctest.h>

#include "lop/normal_form.hpp"
#include "lop/random_objects.hpp"

#include "test_helpers.hpp"

#include <cmath>

using namespace lop;
using namespace lop::testing;

namespace {

// Cutless step performing a bare wire relabeling.
NormalFormStep permutation_step(const std::vector<int>& table) {
  NormalFormStep step;
  step.in_wire_dim = static_cast<int>(table.size());
  step.in_quantum_dim = 1;
  step.cut_rank = step.in_wire_dim;
  NormalFormOutcome o;
  o.injection = table;
  o.controlled_ops.assign(table.size(), identity_matrix(1));
  o.out_wire_dim = step.in_wire_dim;
  o.out_quantum_dim = 1;
  step.outcomes.push_back(o);
  return step;
}

// Original branch operators between sorted spaces, depth-first.
std::vector<ComplexMatrix> sorted_branch_ops(const RandomProtocol& rp) {
  std::vector<ComplexMatrix> out;
  const ComplexMatrix sort_in = sort_permutation(rp.layout);
  for (const BranchOperator& b : branch_operators(rp.tree, rp.layout)) {
    out.push_back(sort_permutation(b.layout) * b.full_operator() *
                  sort_in.transpose());
  }
  return out;
}

std::vector<ComplexMatrix> live_recomposed_ops(const CompiledNormalForm& nf) {
  std::vector<ComplexMatrix> out;
  for (const RecomposedBranch& rb : recompose_normal_form(nf)) {
    if (!rb.dead) out.push_back(rb.op);
  }
  return out;
}

}  // namespace

TEST_CASE("a hand-built relabeling step verifies and assembles correctly") {
  NormalFormStep step = permutation_step({2, 0, 1});
  CHECK(verify_normal_form({step}, {0}, 3));
  ComplexMatrix expect = zero_matrix(3, 3);
  expect(2, 0) = 1.0;
  expect(0, 1) = 1.0;
  expect(1, 2) = 1.0;
  CHECK(max_abs_diff(step.kraus(0), expect) == 0.0);
}

TEST_CASE("kraus assembly collapses labels at the cut onto its last slot") {
  NormalFormStep step;
  step.in_wire_dim = 3;
  step.in_quantum_dim = 1;
  step.cut_rank = 2;
  NormalFormOutcome o;
  o.injection = {1, 0};
  o.controlled_ops = {identity_matrix(1), identity_matrix(1),
                      identity_matrix(1)};
  o.out_wire_dim = 2;
  o.out_quantum_dim = 1;
  step.outcomes.push_back(o);
  // Labels 1 and 2 both land on injection[1] = 0; label 0 on injection[0].
  ComplexMatrix expect = zero_matrix(2, 3);
  expect(1, 0) = 1.0;
  expect(0, 1) = 1.0;
  expect(0, 2) = 1.0;
  CHECK(max_abs_diff(step.kraus(0), expect) == 0.0);
}

TEST_CASE("verification rejects a growing cut rank") {
  // First step: rank-1 collapse of a dim-2 wire onto label 1, with two
  // outcomes whose quantum rows are orthonormal so the step is complete.
  const double s = 1.0 / std::sqrt(2.0);
  NormalFormStep collapse;
  collapse.in_wire_dim = 2;
  collapse.in_quantum_dim = 1;
  collapse.cut_rank = 1;
  for (int sign : {+1, -1}) {
    NormalFormOutcome o;
    o.injection = {1};
    ComplexMatrix e0(1, 1), e1(1, 1);
    e0(0, 0) = s;
    e1(0, 0) = sign * s;
    o.controlled_ops = {e0, e1};
    o.out_wire_dim = 2;
    o.out_quantum_dim = 1;
    collapse.outcomes.push_back(o);
  }
  CHECK(verify_normal_form({collapse}, {0}, 2));
  // A cutless relabeling after it raises the rank back to 2.
  NormalFormCheck check =
      verify_normal_form({collapse, permutation_step({0, 1})}, {0, 0}, 5);
  CHECK(!check);
  CHECK(!check.reason.empty());
}

TEST_CASE("verification rejects incomplete steps and broken injections") {
  NormalFormStep lossy = permutation_step({0, 1});
  lossy.outcomes[0].controlled_ops[0] = 0.5 * identity_matrix(1);
  CHECK(!verify_normal_form({lossy}, {0}, 2));

  NormalFormStep collide = permutation_step({0, 0});
  CHECK(!verify_normal_form({collide}, {0}, 2));
}

TEST_CASE("verification enforces the step-count bound") {
  // Relabeling, then a three-outcome readout collapse: a legitimate
  // two-step sequence that a bound of one must reject.
  NormalFormStep readout;
  readout.in_wire_dim = 3;
  readout.in_quantum_dim = 1;
  readout.cut_rank = 1;
  for (int a = 0; a < 3; ++a) {
    NormalFormOutcome o;
    o.injection = {0};
    o.controlled_ops.assign(3, zero_matrix(1, 1));
    o.controlled_ops[a] = identity_matrix(1);
    o.out_wire_dim = 1;
    o.out_quantum_dim = 1;
    readout.outcomes.push_back(o);
  }
  std::vector<NormalFormStep> steps = {permutation_step({2, 0, 1}), readout};
  CHECK(verify_normal_form(steps, {0, 1}, 3));
  NormalFormCheck bounded = verify_normal_form(steps, {0, 1}, 1);
  CHECK(!bounded);
}

TEST_CASE("deterministic chains compile to one merged step") {
  SystemLayout l({{"w", 2, RegKind::wire}, {"q", 2, RegKind::quantum}});
  ComplexMatrix p0 = zero_matrix(2, 2), p1 = zero_matrix(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  ProtocolTree tree = ProtocolTree::chain(
      {ElementalOp::wire_permutation({"w"}, {1, 0}),
       ElementalOp::wire_phase({"w"}, {0.4, 2.2}),
       ElementalOp::observed_instrument({"q"}, {p0, p1}, "a")});
  CompiledNormalForm nf = compile_normal_form(tree, l);
  for (const NormalFormBranch& nb : normal_form_branches(nf.tree)) {
    CHECK(nb.steps.size() == 1);
    CHECK(verify_normal_form(nb.steps, nb.outcomes, l.wire_dim()));
  }
}

TEST_CASE("forwarding compiles to verified strictly-collapsing steps") {
  SystemLayout l({{"w", 2, RegKind::wire}});
  ProtocolTree tree =
      ProtocolTree::chain({ElementalOp::forward_wire("w", "q")});
  CompiledNormalForm nf = compile_normal_form(tree, l);
  for (const NormalFormBranch& nb : normal_form_branches(nf.tree)) {
    CHECK(verify_normal_form(nb.steps, nb.outcomes, l.wire_dim()));
    CHECK(static_cast<int>(nb.steps.size()) <= l.wire_dim());
  }
  RandomProtocol rp{tree, l};
  std::vector<ComplexMatrix> original = sorted_branch_ops(rp);
  std::vector<ComplexMatrix> compiled = live_recomposed_ops(nf);
  REQUIRE(compiled.size() == original.size());
  CHECK(choi_distance_upper_bound(compiled, original) < 1e-9);
}

TEST_CASE("phase-permutation-phase chains merge to a single step") {
  SystemLayout l({{"w", 3, RegKind::wire}});
  ProtocolTree tree = ProtocolTree::chain(
      {ElementalOp::wire_phase({"w"}, {0.1, 0.2, 0.3}),
       ElementalOp::wire_permutation({"w"}, {1, 2, 0}),
       ElementalOp::wire_phase({"w"}, {2.0, 1.0, 0.0})});
  CompiledNormalForm nf = compile_normal_form(tree, l);
  std::vector<NormalFormBranch> branches = normal_form_branches(nf.tree);
  REQUIRE(branches.size() == 1);
  CHECK(branches[0].steps.size() == 1);
  RandomProtocol rp{tree, l};
  std::vector<ComplexMatrix> original = sorted_branch_ops(rp);
  std::vector<ComplexMatrix> compiled = live_recomposed_ops(nf);
  REQUIRE(compiled.size() == 1);
  CHECK(choi_distance_upper_bound(compiled, original) < 1e-12);
}

TEST_CASE("random protocols compile to verified equivalent normal forms") {
  Rng rng(71);
  RandomTreeConfig cfg;
  cfg.max_depth = 5;
  cfg.max_wire_dim = 4;
  cfg.max_outcomes = 3;
  cfg.max_total_dim = 48;
  for (int t = 0; t < 40; ++t) {
    RandomProtocol rp = random_protocol(rng, cfg);
    CompiledNormalForm nf = compile_normal_form(rp.tree, rp.layout, 4096);
    for (const NormalFormBranch& nb : normal_form_branches(nf.tree)) {
      NormalFormCheck check =
          verify_normal_form(nb.steps, nb.outcomes, rp.layout.wire_dim());
      CHECK_MESSAGE(check.ok, check.reason);
    }
    std::vector<ComplexMatrix> original = sorted_branch_ops(rp);
    std::vector<ComplexMatrix> compiled = live_recomposed_ops(nf);
    REQUIRE(compiled.size() == original.size());
    CHECK(choi_distance_upper_bound(compiled, original) < 1e-9);
  }
}

TEST_CASE("dead completeness fillers multiply to exactly zero") {
  Rng rng(72);
  RandomTreeConfig cfg;
  cfg.max_depth = 4;
  int seen_dead = 0;
  for (int t = 0; t < 20; ++t) {
    RandomProtocol rp = random_protocol(rng, cfg);
    CompiledNormalForm nf = compile_normal_form(rp.tree, rp.layout, 4096);
    for (const RecomposedBranch& rb : recompose_normal_form(nf)) {
      if (rb.dead) {
        ++seen_dead;
        CHECK(max_abs(rb.op) == 0.0);
      }
    }
  }
  // Forwarding occurs somewhere in 20 random trees, so fillers must appear.
  CHECK(seen_dead > 0);
}

TEST_CASE("the compiler rejects wire growth past the declared cap") {
  SystemLayout l({{"w", 2, RegKind::wire}});
  ProtocolTree tree =
      ProtocolTree::chain({ElementalOp::prepare_wire("h", 8)});
  CHECK_THROWS_AS(compile_normal_form(tree, l, 8), std::runtime_error);
  CHECK_NOTHROW(compile_normal_form(tree, l, 16));
}

TEST_CASE("choi_distance_upper_bound is zero only for identical lists") {
  Rng rng(73);
  ComplexMatrix k = haar_unitary(3, rng);
  CHECK(choi_distance_upper_bound({k}, {k}) == 0.0);
  ComplexMatrix shifted = k;
  shifted(0, 0) += 0.01;
  CHECK(choi_distance_upper_bound({k}, {shifted}) > 0.0);
}
