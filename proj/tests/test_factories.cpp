#include <doctest.h>

#include "lop/counterexample.hpp"
#include "lop/factories.hpp"
#include "lop/random_objects.hpp"

#include "test_helpers.hpp"

#include <cmath>

using namespace lop;
using namespace lop::testing;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

// Runs a preparation protocol on its canonical input and returns the
// fidelity of the reduced output with the target ket.
double preparation_fidelity(const ProtocolTree& tree,
                            const SystemLayout& layout,
                            const ComplexMatrix& input_ket,
                            const std::vector<std::string>& outputs,
                            const ComplexMatrix& target_ket) {
  auto [avg, after] = execute_average(tree, pure_density(input_ket), layout);
  DensityMatrix reduced = partial_trace(avg, after, outputs);
  return state_fidelity(PureState(target_ket), reduced);
}

}  // namespace

TEST_CASE("doubling the maximally coherent wire yields the correlated pair") {
  DensityMatrix plus = max_coherent_state(2).density();
  auto [out, after] =
      execute_average(bijection_B(2), plus, bijection_input_layout(2));
  DensityMatrix pair = partial_trace(out, after, {"w", "q"});
  PureState bell(ket({kInvSqrt2, 0, 0, kInvSqrt2}));
  CHECK(state_fidelity(bell, pair) > 1.0 - 1e-12);
}

TEST_CASE("doubling keeps basis states and mixtures aligned") {
  auto [zero_out, after0] = execute_average(
      bijection_B(2), pure_density(ket({1, 0})), bijection_input_layout(2));
  DensityMatrix zz = partial_trace(zero_out, after0, {"w", "q"});
  CHECK(state_fidelity(PureState(ket({1, 0, 0, 0})), zz) > 1.0 - 1e-12);

  const double p = 0.3;
  auto [mixed_out, after1] = execute_average(
      bijection_B(2), diag_density({p, 1 - p}), bijection_input_layout(2));
  DensityMatrix mm = partial_trace(mixed_out, after1, {"w", "q"});
  ComplexMatrix expect = zero_matrix(4, 4);
  expect(0, 0) = p;
  expect(3, 3) = 1 - p;
  CHECK(max_abs_diff(mm.matrix(), expect) < 1e-12);
}

TEST_CASE("undoubling inverts doubling on every Fourier branch") {
  Rng rng(91);
  const int d = 3;
  DensityMatrix rho = random_density(rng, d);
  ProtocolTree round_trip = bijection_B(d).then(bijection_B_inv(d));
  BranchReport report =
      execute_all_branches(round_trip, rho, bijection_input_layout(d));
  REQUIRE(report.branches.size() == d);
  for (const OutcomePath& b : report.branches) {
    CHECK(std::abs(b.probability - 1.0 / d) < 1e-12);
    DensityMatrix w = partial_trace(b.state, b.live_layout, {"w"});
    CHECK(max_abs_diff(w.matrix(), rho.matrix()) < 1e-9);
  }
}

TEST_CASE("undoubling dephases inputs outside the correlated subspace") {
  // |0>_w |1>_q has no correlated component; every branch returns |0><0|.
  DensityMatrix off(kron(pure_density(ket({1, 0})).matrix(),
                         pure_density(ket({0, 1})).matrix()));
  BranchReport report = execute_all_branches(bijection_B_inv(2), off,
                                             bijection_image_layout(2));
  for (const OutcomePath& b : report.branches) {
    DensityMatrix w = partial_trace(b.state, b.live_layout, {"w"});
    CHECK(max_abs_diff(w.matrix(), pure_density(ket({1, 0})).matrix()) <
          1e-12);
  }
}

TEST_CASE("phase loop: trivial phases succeed with probability 1/d per "
          "round") {
  Rng rng(92);
  DensityMatrix rho = random_density(rng, 2);
  ProtocolTree tree = phase_via_loop({0.0, 0.0}, 2, 1);
  BranchReport report = execute_all_branches(tree, rho, phase_loop_layout(2));
  double success = 0.0;
  for (const OutcomePath& b : report.branches) {
    if (b.outcomes.back() == 0) {
      success += b.probability;
      DensityMatrix w = partial_trace(b.state, b.live_layout, {"w"});
      CHECK(max_abs_diff(w.matrix(), rho.matrix()) < 1e-12);
    }
  }
  CHECK(std::abs(success - 0.5) < 1e-12);
}

TEST_CASE("phase loop: cumulative success mass matches the analytic value") {
  Rng rng(93);
  const int d = 3, rounds = 4;
  DensityMatrix rho = random_density(rng, d);
  std::vector<double> phases = {0.4, 1.1, 5.2};
  ProtocolTree tree = phase_via_loop(phases, d, rounds);
  BranchReport report = execute_all_branches(tree, rho, phase_loop_layout(d));

  ComplexMatrix u = identity_matrix(d);
  for (int j = 0; j < d; ++j) u(j, j) = std::exp(Complex(0, phases[j]));
  ComplexMatrix target = u * rho.matrix() * dagger(u);

  double success = 0.0;
  for (const OutcomePath& b : report.branches) {
    if (b.outcomes.back() != 0) continue;
    success += b.probability;
    DensityMatrix w = partial_trace(b.state, b.live_layout, {"w"});
    CHECK(max_abs_diff(w.matrix(), target) < 1e-9);
  }
  CHECK(std::abs(success - 65.0 / 81.0) < 1e-12);
}

TEST_CASE("teleporting the identity acts as the identity on every input") {
  ChannelSpec spec{QuantumChannel({identity_matrix(4)}), 2, 2};
  SystemLayout l = teleport_layout(spec);
  Rng rng(94);
  for (int t = 0; t < 3; ++t) {
    DensityMatrix payload = random_density(rng, 4);
    DensityMatrix input(
        kron(max_coherent_state(2).density().matrix(), payload.matrix()));
    auto [avg, after] = execute_average(teleport_channel(spec), input, l);
    DensityMatrix out = partial_trace(avg, after, {"wa", "p"});
    CHECK(max_abs_diff(out.matrix(), payload.matrix()) < 1e-9);
  }
}

TEST_CASE("teleporting a random channel matches its direct application") {
  Rng rng(95);
  ChannelSpec spec{random_cptp(rng, 4, 4, 3), 2, 2};
  SystemLayout l = teleport_layout(spec);
  auto [ch, kept] = to_channel_on(teleport_channel(spec), l, {"wa", "p"});
  ComplexMatrix embed = kron(max_coherent_state(2).ket(), identity_matrix(4));
  std::vector<ComplexMatrix> effective;
  for (const ComplexMatrix& k : ch.kraus()) effective.push_back(k * embed);
  CHECK(choi_distance(choi_of(QuantumChannel(effective)),
                      choi_of(spec.target)) < 1e-9);
}

TEST_CASE("teleportation needs the maximally coherent helper") {
  const double s = 1.0 / std::sqrt(2.0);
  ComplexMatrix h(2, 2);
  h << s, s, s, -s;
  ChannelSpec spec{QuantumChannel({h}), 2, 1};
  SystemLayout l = teleport_layout(spec);
  auto [ch, kept] = to_channel_on(teleport_channel(spec), l, {"wa", "p"});
  ComplexMatrix skew = ket({std::sqrt(0.9), std::sqrt(0.1)});
  ComplexMatrix embed = kron(skew, identity_matrix(2));
  std::vector<ComplexMatrix> effective;
  for (const ComplexMatrix& k : ch.kraus()) effective.push_back(k * embed);
  CHECK(choi_distance(choi_of(QuantumChannel(effective)),
                      choi_of(spec.target)) > 1e-6);
}

TEST_CASE("stochastic aligned-channel run succeeds at exactly 1/d") {
  Rng rng(96);
  const int d = 3;
  QuantumChannel ch(random_iqo_kraus(rng, d, d + 1));
  ProtocolTree tree = iqo_stochastic(ch, d);
  SystemLayout l = iqo_layout(ch, d);
  for (int t = 0; t < 3; ++t) {
    DensityMatrix rho = random_density(rng, d);
    BranchReport report = execute_all_branches(tree, rho, l);
    double success = 0.0;
    ComplexMatrix out = zero_matrix(d, d);
    for (const OutcomePath& b : report.branches) {
      if (b.outcomes.back() != 0) continue;
      success += b.probability;
      out += b.probability *
             partial_trace(b.state, b.live_layout, {"w"}).matrix();
    }
    CHECK(std::abs(success - 1.0 / d) < 1e-9);
    CHECK(max_abs_diff(out / success, apply_channel_raw(ch, rho.matrix())) <
          1e-9);
  }
}

TEST_CASE("the obstruction channel runs stochastically at rate 1/3") {
  Rng rng(97);
  QuantumChannel cx = build_counterexample();
  ProtocolTree tree = iqo_stochastic(cx, 3);
  SystemLayout l = iqo_layout(cx, 3);
  DensityMatrix rho = random_density(rng, 3);
  BranchReport report = execute_all_branches(tree, rho, l);
  double success = 0.0;
  ComplexMatrix out = zero_matrix(3, 3);
  for (const OutcomePath& b : report.branches) {
    if (b.outcomes.back() != 0) continue;
    success += b.probability;
    out += b.probability *
           partial_trace(b.state, b.live_layout, {"w"}).matrix();
  }
  CHECK(std::abs(success - 1.0 / 3.0) < 1e-9);
  CHECK(max_abs_diff(out / success, apply_channel_raw(cx, rho.matrix())) <
        1e-9);
}

TEST_CASE("a dimension-one wire makes the stochastic run deterministic") {
  Rng rng(98);
  QuantumChannel ch = random_cptp(rng, 2, 2, 2);  // acts on the quantum side
  // Embed as a wire(1) (x) quantum(2) channel; alignment is vacuous.
  ProtocolTree tree = iqo_stochastic(ch, 1);
  SystemLayout l = iqo_layout(ch, 1);
  DensityMatrix rho = random_density(rng, 2);
  BranchReport report = execute_all_branches(tree, rho, l);
  double success = 0.0;
  for (const OutcomePath& b : report.branches) {
    if (b.outcomes.back() == 0) success += b.probability;
  }
  CHECK(std::abs(success - 1.0) < 1e-12);
}

TEST_CASE("stochastic run rejects channels that couple wire labels") {
  const double s = 1.0 / std::sqrt(2.0);
  ComplexMatrix h(2, 2);
  h << s, s, s, -s;
  CHECK_THROWS_AS(iqo_stochastic(QuantumChannel({h}), 2),
                  std::invalid_argument);
}

TEST_CASE("qubit-exact construction reproduces wire dephasing") {
  ComplexMatrix k0 = zero_matrix(2, 2), k1 = zero_matrix(2, 2);
  k0(0, 0) = 1.0;
  k1(1, 1) = 1.0;
  QuantumChannel ch({k0, k1});
  ProtocolTree tree = iqo_qubit_exact(ch);
  SystemLayout l = iqo_layout(ch, 2);
  auto [run, kept] = to_channel_on(tree, l, {"w", "p"});
  CHECK(run.is_trace_preserving());
  CHECK(choi_distance(choi_of(run), choi_of(ch)) < 1e-9);
}

TEST_CASE("qubit-exact construction handles collapsing label maps") {
  Rng rng(99);
  for (int t = 0; t < 5; ++t) {
    QuantumChannel ch(random_iqo_kraus(rng, 2, 2 + rng.uniform_int(3)));
    ProtocolTree tree = iqo_qubit_exact(ch);
    SystemLayout l = iqo_layout(ch, 2);
    auto [run, kept] = to_channel_on(tree, l, {"w", "p"});
    CHECK(run.is_trace_preserving());
    CHECK(choi_distance(choi_of(run), choi_of(ch)) < 1e-9);
  }
}

TEST_CASE("both cat-state preparations reach their target exactly") {
  for (GhzTopology topo : {GhzTopology::single_wire, GhzTopology::chain}) {
    for (int n : {2, 3}) {
      double f = preparation_fidelity(
          prepare_ghz(n, topo), ghz_input_layout(n, topo),
          ghz_input_ket(n, topo), ghz_output_registers(n, topo),
          ghz_target_ket(n));
      CHECK(f > 1.0 - 1e-9);
    }
  }
  CHECK_THROWS_AS(prepare_ghz(1, GhzTopology::single_wire),
                  std::invalid_argument);
}

TEST_CASE("both single-excitation preparations reach their target exactly") {
  for (int n : {2, 3}) {
    double f = preparation_fidelity(
        prepare_w(n, WTopology::single_wire),
        w_input_layout(n, WTopology::single_wire),
        w_input_ket(n, WTopology::single_wire),
        w_output_registers(n, WTopology::single_wire),
        w_target_ket(n, WTopology::single_wire));
    CHECK(f > 1.0 - 1e-9);
  }
  double f3 = preparation_fidelity(
      prepare_w(3, WTopology::two_wire), w_input_layout(3, WTopology::two_wire),
      w_input_ket(3, WTopology::two_wire),
      w_output_registers(3, WTopology::two_wire),
      w_target_ket(3, WTopology::two_wire));
  CHECK(f3 > 1.0 - 1e-9);
  CHECK_THROWS_AS(prepare_w(4, WTopology::two_wire), std::invalid_argument);
}

TEST_CASE("the n=2 single-excitation target is the symmetric pair state") {
  // Output registers have dims (2, 2); the target is (|01> + |10>)/sqrt(2).
  ComplexMatrix target = w_target_ket(2, WTopology::single_wire);
  CHECK(max_abs_diff(target, ket({0, kInvSqrt2, kInvSqrt2, 0})) < 1e-15);
}
