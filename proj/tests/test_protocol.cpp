#include <doctest.h>

#include "lop/factories.hpp"
#include "lop/protocol.hpp"
#include "lop/random_objects.hpp"

#include "test_helpers.hpp"

#include <cmath>
#include <map>

using namespace lop;
using namespace lop::testing;

TEST_CASE("executing a leaf returns the input unchanged") {
  Rng rng(61);
  SystemLayout l({{"w", 2, RegKind::wire}, {"q", 2, RegKind::quantum}});
  DensityMatrix rho = random_density(rng, 4);
  auto [out, after] = execute_average(ProtocolTree::leaf(), rho, l);
  CHECK(max_abs_diff(out.matrix(), rho.matrix()) == 0.0);
  CHECK(after.same_registers(l));
}

TEST_CASE("measuring |+> in the basis splits into two half-probability "
          "branches") {
  SystemLayout l({{"q", 2, RegKind::quantum}});
  ComplexMatrix p0 = zero_matrix(2, 2), p1 = zero_matrix(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  ProtocolTree tree = ProtocolTree::step_uniform(
      ElementalOp::observed_instrument({"q"}, {p0, p1}, "a"),
      ProtocolTree::leaf());
  BranchReport report =
      execute_all_branches(tree, max_coherent_state(2).density(), l);
  REQUIRE(report.branches.size() == 2);
  for (const OutcomePath& b : report.branches) {
    CHECK(std::abs(b.probability - 0.5) < 1e-12);
    REQUIRE(b.outcomes.size() == 1);
  }
  CHECK(report.branches[0].outcomes[0] == 0);
  CHECK(report.branches[1].outcomes[0] == 1);
}

TEST_CASE("branch probabilities sum to one on random protocols") {
  Rng rng(62);
  RandomTreeConfig cfg;
  cfg.max_depth = 4;
  for (int t = 0; t < 20; ++t) {
    RandomProtocol rp = random_protocol(rng, cfg);
    DensityMatrix rho = random_density(rng, rp.layout.total_dim());
    BranchReport report = execute_all_branches(rp.tree, rho, rp.layout);
    double mass = report.pruned_probability;
    for (const OutcomePath& b : report.branches) mass += b.probability;
    CHECK(std::abs(mass - 1.0) < 1e-9);
  }
}

TEST_CASE("to_channel of a single permutation is that unitary") {
  SystemLayout l({{"w", 3, RegKind::wire}});
  ProtocolTree tree =
      ProtocolTree::chain({ElementalOp::wire_permutation({"w"}, {2, 0, 1})});
  auto [ch, after] = to_channel(tree, l);
  REQUIRE(ch.kraus_count() == 1);
  ComplexMatrix expect = zero_matrix(3, 3);
  expect(2, 0) = 1.0;
  expect(0, 1) = 1.0;
  expect(1, 2) = 1.0;
  CHECK(max_abs_diff(ch.kraus()[0], expect) == 0.0);
}

TEST_CASE("the wire-doubling protocol flattens to its single correlation "
          "operator") {
  for (int d : {2, 3}) {
    auto [ch, after] = to_channel(bijection_B(d), bijection_input_layout(d));
    REQUIRE(ch.kraus_count() == 1);
    CHECK(after.same_registers(bijection_image_layout(d)));
    ComplexMatrix expect = zero_matrix(d * d, d);
    for (int i = 0; i < d; ++i) expect(i * d + i, i) = 1.0;
    CHECK(max_abs_diff(ch.kraus()[0], expect) < 1e-15);
  }
}

TEST_CASE("teleporting the identity channel reproduces the identity") {
  ChannelSpec spec{QuantumChannel({identity_matrix(2)}), 2, 1};
  SystemLayout l = teleport_layout(spec);
  auto [ch, kept] = to_channel_on(teleport_channel(spec), l, {"wa", "p"});
  // Feed the helper wire |+> and compare with the identity on (w, p).
  ComplexMatrix embed = kron(max_coherent_state(2).ket(), identity_matrix(2));
  std::vector<ComplexMatrix> effective;
  for (const ComplexMatrix& k : ch.kraus()) effective.push_back(k * embed);
  CHECK(choi_distance(choi_of(QuantumChannel(effective)),
                      choi_of(QuantumChannel({identity_matrix(2)}))) < 1e-9);
}

TEST_CASE("teleportation outcome statistics are flat on the flat input") {
  ChannelSpec spec{QuantumChannel({identity_matrix(2)}), 2, 1};
  SystemLayout l = teleport_layout(spec);
  DensityMatrix input(
      kron(max_coherent_state(2).density().matrix(),
           0.5 * identity_matrix(2)));
  BranchReport report =
      execute_all_branches(teleport_channel(spec), input, l);
  std::map<int, double> by_bell;
  for (const OutcomePath& b : report.branches) {
    by_bell[b.outcomes.at(5)] += b.probability;
  }
  REQUIRE(by_bell.size() == 4);
  for (const auto& [m, prob] : by_bell) {
    CHECK(std::abs(prob - 0.25) < 1e-12);
  }
}

TEST_CASE("average execution equals the flattened channel") {
  Rng rng(63);
  RandomTreeConfig cfg;
  cfg.max_depth = 4;
  cfg.uniform = true;  // to_channel needs every branch to share one layout
  for (int t = 0; t < 10; ++t) {
    RandomProtocol rp = random_protocol(rng, cfg);
    DensityMatrix rho = random_density(rng, rp.layout.total_dim());
    auto [avg, after] = execute_average(rp.tree, rho, rp.layout);
    auto [ch, after2] = to_channel(rp.tree, rp.layout);
    CHECK(max_abs_diff(avg.matrix(), apply_channel_raw(ch, rho.matrix())) <
          1e-12);
    CHECK(after.same_registers(after2));
  }
}

TEST_CASE("per-branch operators reproduce the post-selected states") {
  Rng rng(64);
  RandomTreeConfig cfg;
  cfg.max_depth = 3;
  RandomProtocol rp = random_protocol(rng, cfg);
  DensityMatrix rho = random_density(rng, rp.layout.total_dim());
  BranchReport report = execute_all_branches(rp.tree, rho, rp.layout);
  std::vector<BranchOperator> ops = branch_operators(rp.tree, rp.layout);
  REQUIRE(!report.branches.empty());
  std::map<std::vector<int>, ComplexMatrix> by_outcomes;
  for (const BranchOperator& b : ops) by_outcomes[b.outcomes] = b.full_operator();
  for (const OutcomePath& b : report.branches) {
    REQUIRE(by_outcomes.count(b.outcomes) == 1);
    const ComplexMatrix& k = by_outcomes[b.outcomes];
    ComplexMatrix unnorm = k * rho.matrix() * dagger(k);
    CHECK(std::abs(unnorm.trace().real() - b.probability) < 1e-12);
    CHECK(max_abs_diff(unnorm / b.probability, b.full_state().matrix()) <
          1e-9);
  }
}

TEST_CASE("sampling is seed-deterministic and Born-consistent") {
  SystemLayout l({{"q", 2, RegKind::quantum}});
  ComplexMatrix p0 = zero_matrix(2, 2), p1 = zero_matrix(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  ProtocolTree tree = ProtocolTree::step_uniform(
      ElementalOp::observed_instrument({"q"}, {p0, p1}, "a"),
      ProtocolTree::leaf());
  DensityMatrix plus = max_coherent_state(2).density();

  OutcomePath first = execute_sampled(tree, plus, l, 99);
  OutcomePath again = execute_sampled(tree, plus, l, 99);
  CHECK(first.outcomes == again.outcomes);

  int ones = 0;
  const int samples = 2000;
  for (int s = 0; s < samples; ++s) {
    ones += execute_sampled(tree, plus, l, 1000 + s).outcomes.at(0);
  }
  // Binomial(2000, 1/2): a 10-sigma band around the mean.
  CHECK(ones > 1000 - 112);
  CHECK(ones < 1000 + 112);
}

TEST_CASE("zero-probability branches are pruned and reported") {
  SystemLayout l({{"q", 2, RegKind::quantum}});
  ComplexMatrix p0 = zero_matrix(2, 2), p1 = zero_matrix(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  ProtocolTree tree = ProtocolTree::step_uniform(
      ElementalOp::observed_instrument({"q"}, {p0, p1}, "a"),
      ProtocolTree::leaf());
  BranchReport report =
      execute_all_branches(tree, pure_density(ket({1, 0})), l);
  CHECK(report.branches.size() == 1);
  CHECK(report.pruned_count == 1);
  CHECK(report.pruned_probability < 1e-14);
}

TEST_CASE("tree construction enforces one child per outcome") {
  ComplexMatrix p0 = zero_matrix(2, 2), p1 = zero_matrix(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  ElementalOp op = ElementalOp::observed_instrument({"q"}, {p0, p1}, "a");
  CHECK_THROWS_AS(ProtocolTree::step(op, {ProtocolTree::leaf()}),
                  std::invalid_argument);
  CHECK_NOTHROW(
      ProtocolTree::step(op, {ProtocolTree::leaf(), ProtocolTree::leaf()}));
}

TEST_CASE("then() grafts a continuation onto every leaf") {
  SystemLayout l({{"w", 2, RegKind::wire}});
  ProtocolTree first =
      ProtocolTree::chain({ElementalOp::wire_permutation({"w"}, {1, 0})});
  ProtocolTree second =
      ProtocolTree::chain({ElementalOp::wire_phase({"w"}, {0.0, 1.5})});
  auto [ch, after] = to_channel(first.then(second), l);
  REQUIRE(ch.kraus_count() == 1);
  ComplexMatrix swap = zero_matrix(2, 2);
  swap(0, 1) = 1.0;
  swap(1, 0) = 1.0;
  ComplexMatrix phase = identity_matrix(2);
  phase(1, 1) = std::exp(Complex(0, 1.5));
  CHECK(max_abs_diff(ch.kraus()[0], phase * swap) < 1e-15);
}
