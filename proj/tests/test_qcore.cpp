#include <doctest.h>

#include "lop/channel.hpp"
#include "lop/layout.hpp"
#include "lop/random_objects.hpp"
#include "lop/states.hpp"

#include "test_helpers.hpp"

#include <cmath>

using namespace lop;
using namespace lop::testing;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

QuantumChannel dephasing_channel() {
  ComplexMatrix k0 = zero_matrix(2, 2), k1 = zero_matrix(2, 2);
  k0(0, 0) = 1.0;
  k1(1, 1) = 1.0;
  return QuantumChannel({k0, k1});
}

}  // namespace

TEST_CASE("apply_channel: identity leaves any state untouched") {
  Rng rng(11);
  QuantumChannel id({identity_matrix(3)});
  for (int t = 0; t < 5; ++t) {
    DensityMatrix rho = random_density(rng, 3);
    CHECK(max_abs_diff(apply_channel(id, rho).matrix(), rho.matrix()) == 0.0);
  }
}

TEST_CASE("apply_channel: swap permutation exchanges populations") {
  ComplexMatrix swap = zero_matrix(2, 2);
  swap(0, 1) = 1.0;
  swap(1, 0) = 1.0;
  DensityMatrix out =
      apply_channel(QuantumChannel({swap}), diag_density({0.3, 0.7}));
  CHECK(max_abs_diff(out.matrix(), diag_density({0.7, 0.3}).matrix()) < 1e-15);
}

TEST_CASE("apply_channel: complete dephasing maps |+><+| to I/2") {
  DensityMatrix plus = max_coherent_state(2).density();
  DensityMatrix out = apply_channel(dephasing_channel(), plus);
  CHECK(max_abs_diff(out.matrix(), 0.5 * identity_matrix(2)) < 1e-15);
}

TEST_CASE("apply_channel: trace and positivity preserved on a random corpus") {
  Rng rng(12);
  for (int t = 0; t < 1000; ++t) {
    const int d = 2 + rng.uniform_int(5);  // dims 2..6
    QuantumChannel ch = random_cptp(rng, d, d, 1 + rng.uniform_int(3));
    CHECK(ch.completeness_defect() < 1e-9);
    DensityMatrix out = apply_channel(ch, random_density(rng, d));
    CHECK(std::abs(out.matrix().trace().real() - 1.0) < 1e-9);
    CHECK(eigen_hermitian(out.matrix()).values.minCoeff() > -1e-9);
  }
}

TEST_CASE("partial_trace: product state factors cleanly") {
  Rng rng(13);
  DensityMatrix a = random_density(rng, 2);
  DensityMatrix b = random_density(rng, 3);
  DensityMatrix ab(kron(a.matrix(), b.matrix()));
  CHECK(max_abs_diff(partial_trace(ab, {2, 3}, {0}).matrix(), a.matrix()) <
        1e-12);
  CHECK(max_abs_diff(partial_trace(ab, {2, 3}, {1}).matrix(), b.matrix()) <
        1e-12);
}

TEST_CASE("partial_trace: either half of a Bell pair is maximally mixed") {
  DensityMatrix bell = pure_density(ket({kInvSqrt2, 0, 0, kInvSqrt2}));
  for (int keep : {0, 1}) {
    DensityMatrix half = partial_trace(bell, {2, 2}, {keep});
    CHECK(max_abs_diff(half.matrix(), 0.5 * identity_matrix(2)) < 1e-12);
  }
}

TEST_CASE("partial_trace: dropping one leg of a three-qubit cat state") {
  DensityMatrix ghz =
      pure_density(ket({kInvSqrt2, 0, 0, 0, 0, 0, 0, kInvSqrt2}));
  DensityMatrix first_two = partial_trace(ghz, {2, 2, 2}, {0, 1});
  ComplexMatrix expect = zero_matrix(4, 4);
  expect(0, 0) = 0.5;
  expect(3, 3) = 0.5;
  CHECK(max_abs_diff(first_two.matrix(), expect) < 1e-12);
}

TEST_CASE("choi_of: identity channel fingerprint is sum_ij |ii><jj|") {
  ComplexMatrix c = choi_of(QuantumChannel({identity_matrix(2)}));
  ComplexMatrix expect = zero_matrix(4, 4);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) expect(i * 2 + i, j * 2 + j) = 1.0;
  }
  CHECK(max_abs_diff(c, expect) == 0.0);
}

TEST_CASE("choi_of: two representations of the same map agree") {
  // Projective dephasing vs the (I, Z)/sqrt(2) mixing form.
  ComplexMatrix z = identity_matrix(2);
  z(1, 1) = -1.0;
  QuantumChannel mixed({kInvSqrt2 * identity_matrix(2), kInvSqrt2 * z});
  CHECK(choi_distance(choi_of(dephasing_channel()), choi_of(mixed)) < 1e-15);
}

TEST_CASE("choi_of: composing with identity changes nothing") {
  Rng rng(14);
  QuantumChannel ch = random_cptp(rng, 3, 3, 2);
  QuantumChannel same = compose(ch, QuantumChannel({identity_matrix(3)}));
  CHECK(choi_distance(choi_of(ch), choi_of(same)) < 1e-12);
}

TEST_CASE("choi_of: equal fingerprints iff equal action") {
  Rng rng(15);
  for (int t = 0; t < 20; ++t) {
    QuantumChannel a = random_cptp(rng, 3, 3, 2);
    QuantumChannel b = random_cptp(rng, 3, 3, 2);
    // Remixed Kraus operators: same map, different representation.
    ComplexMatrix u = haar_unitary(2, rng);
    QuantumChannel a_remixed({u(0, 0) * a.kraus()[0] + u(0, 1) * a.kraus()[1],
                              u(1, 0) * a.kraus()[0] + u(1, 1) * a.kraus()[1]});
    CHECK(choi_distance(choi_of(a), choi_of(a_remixed)) < 1e-12);
    // Independent channels differ both in fingerprint and in action on the
    // matrix-unit spanning set.
    double action_gap = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        ComplexMatrix e = zero_matrix(3, 3);
        e(i, j) = 1.0;
        action_gap = std::max(
            action_gap, max_abs_diff(apply_channel_raw(a, e),
                                     apply_channel_raw(b, e)));
      }
    }
    CHECK(choi_distance(choi_of(a), choi_of(b)) > 1e-6);
    CHECK(action_gap > 1e-6);
  }
}

TEST_CASE("relative_entropy: zero against itself, log d against the flat "
          "state, infinite off support") {
  Rng rng(16);
  DensityMatrix rho = random_density(rng, 4);
  CHECK(std::abs(relative_entropy(rho, rho)) < 1e-9);

  DensityMatrix plus = max_coherent_state(2).density();
  DensityMatrix flat(0.5 * identity_matrix(2));
  CHECK(std::abs(relative_entropy(plus, flat) - 1.0) < 1e-12);

  DensityMatrix zero = pure_density(ket({1, 0}));
  DensityMatrix one = pure_density(ket({0, 1}));
  CHECK(std::isinf(relative_entropy(zero, one)));
}

TEST_CASE("entropy: pure states carry none, the flat state log2(d) bits") {
  CHECK(entropy(pure_density(ket({kInvSqrt2, kInvSqrt2}))) < 1e-12);
  DensityMatrix flat(ComplexMatrix(identity_matrix(4) / 4.0));
  CHECK(std::abs(entropy(flat) - 2.0) < 1e-12);
}

TEST_CASE("dephase: diagonal states pass through, wire coherence dies") {
  SystemLayout wire({{"w", 2, RegKind::wire}});
  DensityMatrix diag = diag_density({0.3, 0.7});
  CHECK(max_abs_diff(dephase(diag, wire).matrix(), diag.matrix()) == 0.0);

  DensityMatrix plus = max_coherent_state(2).density();
  CHECK(max_abs_diff(dephase(plus, wire).matrix(), 0.5 * identity_matrix(2)) <
        1e-15);
}

TEST_CASE("dephase: incoherent-quantum states are fixed points") {
  Rng rng(17);
  SystemLayout wq({{"w", 2, RegKind::wire}, {"q", 2, RegKind::quantum}});
  ComplexMatrix m = zero_matrix(4, 4);
  ComplexMatrix b0 = 0.4 * random_density(rng, 2).matrix();
  ComplexMatrix b1 = 0.6 * random_density(rng, 2).matrix();
  m.block(0, 0, 2, 2) = b0;
  m.block(2, 2, 2, 2) = b1;
  DensityMatrix cq(m);
  CHECK(max_abs_diff(dephase(cq, wq).matrix(), cq.matrix()) == 0.0);
}

TEST_CASE("dephase: idempotent bit-for-bit") {
  Rng rng(18);
  SystemLayout wq({{"w", 3, RegKind::wire}, {"q", 2, RegKind::quantum}});
  DensityMatrix rho = random_density(rng, 6);
  DensityMatrix once = dephase(rho, wq);
  CHECK(max_abs_diff(dephase(once, wq).matrix(), once.matrix()) == 0.0);
}

TEST_CASE("relative entropy to the dephased state equals the entropy gap") {
  Rng rng(19);
  SystemLayout wq({{"w", 2, RegKind::wire}, {"q", 2, RegKind::quantum}});
  for (int t = 0; t < 20; ++t) {
    DensityMatrix rho = random_density(rng, 4);
    DensityMatrix deph = dephase(rho, wq);
    CHECK(std::abs(relative_entropy(rho, deph) -
                   (entropy(deph) - entropy(rho))) < 1e-9);
  }
}

TEST_CASE("state validation rejects malformed inputs") {
  ComplexMatrix not_hermitian = zero_matrix(2, 2);
  not_hermitian(0, 0) = 0.5;
  not_hermitian(1, 1) = 0.5;
  not_hermitian(0, 1) = 0.3;
  CHECK_THROWS_AS(DensityMatrix{not_hermitian}, std::invalid_argument);

  CHECK_THROWS_AS(DensityMatrix{ComplexMatrix(2.0 * identity_matrix(2))},
                  std::invalid_argument);

  ComplexMatrix negative = zero_matrix(2, 2);
  negative(0, 0) = 1.5;
  negative(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix{negative}, std::invalid_argument);

  CHECK_THROWS_AS(PureState{ket({1, 1})}, std::invalid_argument);
}

TEST_CASE("channel shape validation") {
  CHECK_THROWS_AS(QuantumChannel{std::vector<ComplexMatrix>{}},
                  std::invalid_argument);
  CHECK_THROWS_AS(
      QuantumChannel({identity_matrix(2), identity_matrix(3)}),
      std::invalid_argument);
}

TEST_CASE("sqrt_psd and pinv_psd invert on the support") {
  Rng rng(20);
  // Rank-2 PSD matrix on a 3-dim space.
  ComplexMatrix v = haar_isometry(3, 2, rng);
  ComplexMatrix h = v * dagger(v);
  ComplexMatrix r = sqrt_psd(h);
  CHECK(max_abs_diff(r * r, h) < 1e-12);
  ComplexMatrix hp = pinv_psd(h);
  CHECK(max_abs_diff(h * hp * h, h) < 1e-12);
  CHECK(max_abs_diff(support_projector(h), h * hp) < 1e-12);
}

TEST_CASE("trace_out_channel matches tracing the output state") {
  Rng rng(21);
  QuantumChannel ch = random_cptp(rng, 2, 6, 2);  // output factors as 2 x 3
  QuantumChannel reduced = trace_out_channel(ch, {2, 3}, {0});
  for (int t = 0; t < 5; ++t) {
    DensityMatrix rho = random_density(rng, 2);
    DensityMatrix direct =
        partial_trace(apply_channel(ch, rho), {2, 3}, {0});
    CHECK(max_abs_diff(apply_channel(reduced, rho).matrix(),
                       direct.matrix()) < 1e-12);
  }
}
