#include "lop/verify_suites.hpp"

#include "lop/channel.hpp"
#include "lop/classify.hpp"
#include "lop/factories.hpp"
#include "lop/layout.hpp"
#include "lop/locc.hpp"
#include "lop/matrix.hpp"
#include "lop/normal_form.hpp"
#include "lop/protocol.hpp"
#include "lop/random_objects.hpp"
#include "lop/rng.hpp"
#include "lop/states.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <utility>

namespace lop {
namespace {

constexpr double kTau = 6.283185307179586476925286766559;

CheckResult check(std::string name, double worst, double bound,
                  std::string detail) {
  CheckResult c;
  c.name = std::move(name);
  c.worst = worst;
  c.bound = bound;
  c.passed = worst <= bound;
  c.detail = std::move(detail);
  return c;
}

// ---------------------------------------------------------------------------

SuiteReport bijection_suite(std::uint64_t seed) {
  SuiteReport rep;
  rep.suite = "bijection";
  rep.claim = "claim:bijection-roundtrip";
  rep.seed = seed;
  Rng rng(seed);

  double worst_roundtrip = 0.0;
  double worst_mass = 0.0;
  int samples = 0;
  for (int d = 2; d <= 4; ++d) {
    const ProtocolTree tree = bijection_B(d).then(bijection_B_inv(d));
    const SystemLayout layout = bijection_input_layout(d);
    const int count = d == 2 ? 34 : 33;
    for (int t = 0; t < count; ++t) {
      const DensityMatrix rho = random_density(rng, d);
      const BranchReport br = execute_all_branches(tree, rho, layout);
      double mass = 0.0;
      for (const OutcomePath& b : br.branches) {
        mass += b.probability;
        const DensityMatrix back =
            partial_trace(b.state, b.live_layout, {"w"});
        worst_roundtrip = std::max(
            worst_roundtrip, max_abs_diff(back.matrix(), rho.matrix()));
      }
      worst_mass = std::max(worst_mass, std::abs(mass - 1.0));
      ++samples;
    }
  }
  rep.checks.push_back(check("roundtrip", worst_roundtrip, 1e-9,
                             std::to_string(samples) +
                                 " random wire states, dims 2-4, every "
                                 "removal outcome"));
  rep.checks.push_back(
      check("probability-mass", worst_mass, 1e-12, "per-state branch sums"));

  // The doubled maximally coherent qubit is the two-qubit maximally
  // correlated pure state.
  {
    const auto [avg, out_layout] = execute_average(
        bijection_B(2), max_coherent_state(2).density(),
        bijection_input_layout(2));
    ComplexMatrix pair_ket = zero_matrix(4, 1);
    pair_ket(0, 0) = 1.0 / std::sqrt(2.0);
    pair_ket(3, 0) = 1.0 / std::sqrt(2.0);
    const double infidelity =
        1.0 - state_fidelity(PureState(pair_ket),
                             partial_trace(avg, out_layout, {"w", "q"}));
    rep.checks.push_back(check("coherent-image", infidelity, 1e-9,
                               "doubled |+> vs the correlated pair"));
  }
  return rep;
}

// ---------------------------------------------------------------------------

SuiteReport phase_loop_suite(std::uint64_t seed) {
  SuiteReport rep;
  rep.suite = "phase-loop";
  rep.claim = "claim:phase-loop-success";
  rep.seed = seed;
  Rng rng(seed);

  double worst_rate = 0.0;
  double worst_action = 0.0;
  double worst_mass = 0.0;
  int cases = 0;
  for (int d = 2; d <= 4; ++d) {
    const SystemLayout layout = phase_loop_layout(d);
    for (int rounds = 1; rounds <= 6; ++rounds) {
      std::vector<double> phases(d);
      for (int j = 0; j < d; ++j) phases[j] = kTau * rng.uniform();
      const ProtocolTree tree = phase_via_loop(phases, d, rounds);
      const DensityMatrix rho = random_density(rng, d);
      const BranchReport br = execute_all_branches(tree, rho, layout);

      double mass = 0.0;
      double success = 0.0;
      ComplexMatrix conditional = zero_matrix(d, d);
      for (const OutcomePath& b : br.branches) {
        mass += b.probability;
        if (!b.outcomes.empty() && b.outcomes.back() == 0) {
          success += b.probability;
          conditional +=
              b.probability *
              partial_trace(b.state, b.live_layout, {"w"}).matrix();
        }
      }
      const double expected = 1.0 - std::pow(1.0 - 1.0 / d, rounds);
      worst_rate = std::max(worst_rate, std::abs(success - expected));
      worst_mass = std::max(worst_mass, std::abs(mass - 1.0));

      ComplexMatrix u = zero_matrix(d, d);
      for (int j = 0; j < d; ++j) u(j, j) = std::polar(1.0, phases[j]);
      const ComplexMatrix target = u * rho.matrix() * dagger(u);
      conditional /= success;
      worst_action = std::max(worst_action, max_abs_diff(conditional, target));
      ++cases;
    }
  }
  rep.checks.push_back(
      check("success-mass", worst_rate, 1e-12,
            "vs 1-(1-1/d)^M, d in 2..4, M in 1..6, " +
                std::to_string(cases) + " cases"));
  rep.checks.push_back(check("applied-phase", worst_action, 1e-9,
                             "conditional success output vs the target "
                             "diagonal unitary"));
  rep.checks.push_back(
      check("probability-mass", worst_mass, 1e-12, "per-case branch sums"));
  return rep;
}

// ---------------------------------------------------------------------------

SuiteReport teleport_suite(std::uint64_t seed) {
  SuiteReport rep;
  rep.suite = "teleport";
  rep.claim = "claim:channel-teleportation";
  rep.seed = seed;
  Rng rng(seed);

  double worst_branch = 0.0;
  double worst_choi = 0.0;
  int channels = 0;
  for (int d = 2; d <= 3; ++d) {
    for (int dq = 2; dq <= 3; ++dq) {
      for (int t = 0; t < 3; ++t) {
        const int dim = d * dq;
        const int nk = 2 + rng.uniform_int(3);
        ChannelSpec spec{random_cptp(rng, dim, dim, nk), d, dq};
        const SystemLayout layout = teleport_layout(spec);
        const ProtocolTree tree = teleport_channel(spec);
        const ComplexMatrix embed =
            kron(max_coherent_state(d).ket(), identity_matrix(dim));

        // Every (kraus, bell-outcome) branch enacts that kraus / d.
        for (const BranchOperator& b : branch_operators(tree, layout)) {
          const int alpha = b.outcomes.at(1);
          const ComplexMatrix got = b.op * embed;
          worst_branch = std::max(
              worst_branch,
              max_abs_diff(got, spec.target.kraus()[alpha] / double(d)));
        }

        const auto [tele, out_layout] = to_channel_on(tree, layout,
                                                      {"wa", "p"});
        std::vector<ComplexMatrix> effective;
        effective.reserve(tele.kraus_count());
        for (const ComplexMatrix& k : tele.kraus())
          effective.push_back(k * embed);
        worst_choi = std::max(
            worst_choi, choi_distance(choi_of(QuantumChannel(effective)),
                                      choi_of(spec.target)));
        ++channels;
      }
    }
  }
  rep.checks.push_back(check("branch-operators", worst_branch, 1e-9,
                             std::to_string(channels) +
                                 " random channels, wire x quantum dims "
                                 "{2,3}x{2,3}"));
  rep.checks.push_back(check("choi-distance", worst_choi, 1e-9,
                             "teleported vs direct channel on the coherent "
                             "helper input"));
  return rep;
}

// ---------------------------------------------------------------------------

SuiteReport iqo_suite(std::uint64_t seed) {
  SuiteReport rep;
  rep.suite = "iqo";
  rep.claim = "claim:basis-aligned-implementation";
  rep.seed = seed;
  Rng rng(seed);

  double worst_exact = 0.0;
  int misclassified = 0;
  for (int t = 0; t < 20; ++t) {
    const int nk = 2 + rng.uniform_int(3);
    const QuantumChannel ch(random_iqo_kraus(rng, 2, nk));
    const SystemLayout layout = iqo_layout(ch, 2);
    if (!classify_channel(ch, layout).iqo) ++misclassified;
    const ProtocolTree tree = iqo_qubit_exact(ch);
    const auto [impl, out_layout] = to_channel_on(tree, layout, {"w", "p"});
    worst_exact =
        std::max(worst_exact, choi_distance(choi_of(impl), choi_of(ch)));
  }
  rep.checks.push_back(check("exact-qubit-choi", worst_exact, 1e-9,
                             "20 random basis-aligned qubit channels, "
                             "deterministic run"));
  rep.checks.push_back(check("generator-classified", misclassified, 0,
                             "all generated channels classify as "
                             "basis-aligned"));

  double worst_rate = 0.0;
  double worst_output = 0.0;
  double variance = 0.0;
  {
    const QuantumChannel ch(random_iqo_kraus(rng, 3, 4));
    const SystemLayout layout = iqo_layout(ch, 3);
    const ProtocolTree tree = iqo_stochastic(ch, 3);
    std::vector<double> rates;
    for (int i = 0; i < 10; ++i) {
      const DensityMatrix rho = random_density(rng, 3);
      const BranchReport br = execute_all_branches(tree, rho, layout);
      double success = 0.0;
      ComplexMatrix conditional = zero_matrix(3, 3);
      for (const OutcomePath& b : br.branches) {
        if (!b.outcomes.empty() && b.outcomes.back() == 0) {
          success += b.probability;
          conditional +=
              b.probability *
              partial_trace(b.state, b.live_layout, {"w", "p"}).matrix();
        }
      }
      rates.push_back(success);
      worst_rate = std::max(worst_rate, std::abs(success - 1.0 / 3.0));
      conditional /= success;
      worst_output = std::max(
          worst_output,
          max_abs_diff(conditional, apply_channel_raw(ch, rho.matrix())));
    }
    double mean = 0.0;
    for (double r : rates) mean += r;
    mean /= rates.size();
    for (double r : rates) variance += (r - mean) * (r - mean);
    variance /= rates.size();
  }
  rep.checks.push_back(check("stochastic-rate", worst_rate, 1e-9,
                             "success mass vs 1/3 on 10 random qutrit "
                             "inputs"));
  rep.checks.push_back(check("stochastic-rate-variance", variance, 1e-18,
                             "input independence of the heralded rate"));
  rep.checks.push_back(check("stochastic-output", worst_output, 1e-9,
                             "conditional success output vs direct "
                             "application"));
  return rep;
}

// ---------------------------------------------------------------------------

SuiteReport normal_form_suite(std::uint64_t seed) {
  SuiteReport rep;
  rep.suite = "normal-form";
  rep.claim = "claim:two-step-normal-form";
  rep.seed = seed;
  Rng rng(seed);

  RandomTreeConfig cfg;
  cfg.max_depth = 5;
  cfg.max_wire_dim = 4;
  cfg.max_outcomes = 3;
  cfg.max_total_dim = 48;

  const int trees = 50;
  double worst_choi = 0.0;
  double worst_dead = 0.0;
  int structure_failures = 0;
  int alignment_failures = 0;
  int exceptions = 0;
  std::string first_error;
  for (int t = 0; t < trees; ++t) {
    const RandomProtocol rp = random_protocol(rng, cfg);
    try {
      const CompiledNormalForm nf =
          compile_normal_form(rp.tree, rp.layout, 4096);

      for (const NormalFormBranch& nb : normal_form_branches(nf.tree)) {
        const NormalFormCheck ok =
            verify_normal_form(nb.steps, nb.outcomes, rp.layout.wire_dim());
        if (!ok) {
          ++structure_failures;
          if (first_error.empty()) first_error = ok.reason;
        }
      }

      // Both enumerations walk branches depth-first in outcome order, and
      // compilation preserves the branching structure, so after dropping the
      // dead completeness fillers the surviving compiled branches pair off
      // with the source branches one-to-one and in order.  The operator
      // comparison below would flag any mispairing.
      std::vector<ComplexMatrix> original_ops;
      const ComplexMatrix sort_in = sort_permutation(rp.layout);
      for (const BranchOperator& b : branch_operators(rp.tree, rp.layout)) {
        original_ops.push_back(sort_permutation(b.layout) *
                               b.full_operator() * sort_in.transpose());
      }

      std::vector<ComplexMatrix> compiled_ops;
      for (const RecomposedBranch& rb : recompose_normal_form(nf)) {
        if (rb.dead) {
          worst_dead = std::max(worst_dead, max_abs(rb.op));
          continue;
        }
        compiled_ops.push_back(rb.op);
      }
      if (compiled_ops.size() != original_ops.size()) {
        ++alignment_failures;
      } else {
        worst_choi = std::max(
            worst_choi, choi_distance_upper_bound(compiled_ops, original_ops));
      }
    } catch (const std::exception& e) {
      ++exceptions;
      if (first_error.empty()) first_error = e.what();
    }
  }
  rep.checks.push_back(check(
      "structure", structure_failures + exceptions, 0,
      first_error.empty()
          ? std::to_string(trees) + " random trees, every branch verified"
          : first_error));
  rep.checks.push_back(check("branch-alignment", alignment_failures, 0,
                             "compiled branches pair off with source "
                             "branches"));
  rep.checks.push_back(check("choi-equivalence", worst_choi, 1e-9,
                             "recomposed vs original branch operators"));
  rep.checks.push_back(check("dead-branches-vanish", worst_dead, 0.0,
                             "completeness fillers have zero product"));
  return rep;
}

// ---------------------------------------------------------------------------

SuiteReport translate_locc_suite(std::uint64_t seed) {
  SuiteReport rep;
  rep.suite = "translate-locc";
  rep.claim = "claim:wire-locc-translation";
  rep.seed = seed;
  Rng rng(seed);

  RandomTreeConfig cfg;
  cfg.max_depth = 4;
  cfg.max_wire_dim = 3;
  cfg.max_outcomes = 3;
  cfg.max_total_dim = 16;
  cfg.bipartite = true;

  const int trees = 25;
  double worst = 0.0;
  int failures = 0;
  int exceptions = 0;
  int branches = 0;
  std::string first_error;
  for (int t = 0; t < trees; ++t) {
    const RandomProtocol rp = random_protocol(rng, cfg);
    try {
      const LoccTranslation tr = translate_to_locc(rp.tree, rp.layout);
      const LoccCheckReport chk =
          check_locc_translation(rp.tree, rp.layout, tr);
      if (!chk.ok) ++failures;
      worst = std::max(worst, chk.max_deviation);
      branches += static_cast<int>(chk.branches.size());
    } catch (const std::exception& e) {
      ++exceptions;
      if (first_error.empty()) first_error = e.what();
    }
  }
  rep.checks.push_back(
      check("translation-errors", failures + exceptions, 0,
            first_error.empty() ? std::to_string(trees) +
                                      " random two-party protocols over "
                                      "correlated pairs"
                                : first_error));
  rep.checks.push_back(check("branch-deviation", worst, 1e-9,
                             std::to_string(branches) +
                                 " translated branches compared "
                                 "operator-by-operator"));
  return rep;
}

// ---------------------------------------------------------------------------

DensityMatrix random_cq_state(Rng& rng, const SystemLayout& layout) {
  const int dw = layout.wire_dim();
  const int dq = layout.quantum_dim();
  std::vector<double> p(dw);
  double total = 0.0;
  for (int m = 0; m < dw; ++m) {
    p[m] = 0.05 + rng.uniform();
    total += p[m];
  }
  ComplexMatrix out = zero_matrix(layout.total_dim(), layout.total_dim());
  for (int m = 0; m < dw; ++m) {
    const DensityMatrix sigma = random_density(rng, dq);
    for (int a = 0; a < dq; ++a) {
      for (int b = 0; b < dq; ++b) {
        out(layout.unsorted_index(m, a), layout.unsorted_index(m, b)) =
            p[m] / total * sigma.matrix()(a, b);
      }
    }
  }
  return DensityMatrix(out);
}

SuiteReport free_state_suite(std::uint64_t seed) {
  SuiteReport rep;
  rep.suite = "free-state-preservation";
  rep.claim = "claim:free-states-stay-free";
  rep.seed = seed;
  Rng rng(seed);

  const int sequences = 300;
  double worst_offdiag = 0.0;
  int cq_failures = 0;
  int branches = 0;
  for (int t = 0; t < sequences; ++t) {
    std::vector<Register> regs;
    regs.push_back({"w1", 2 + rng.uniform_int(2), RegKind::wire});
    if (rng.uniform_int(2)) regs.push_back({"q1", 2, RegKind::quantum});
    if (rng.uniform_int(2))
      regs.push_back({"w2", 2 + rng.uniform_int(2), RegKind::wire});
    if (rng.uniform_int(2)) regs.push_back({"q2", 2, RegKind::quantum});
    const SystemLayout layout{regs};

    const DensityMatrix rho = random_cq_state(rng, layout);

    SystemLayout current = layout;
    std::vector<ElementalOp> ops;
    const int count = 1 + rng.uniform_int(4);
    for (int i = 0; i < count; ++i) {
      ElementalOp op = random_elemental(rng, current, 48);
      current = elemental(op, current).second;
      ops.push_back(std::move(op));
    }

    const BranchReport br =
        execute_all_branches(ProtocolTree::chain(ops), rho, layout);
    for (const OutcomePath& b : br.branches) {
      ++branches;
      if (!is_cq_state(b.state, b.live_layout)) ++cq_failures;
      worst_offdiag =
          std::max(worst_offdiag,
                   wire_offdiagonal_weight(b.state.matrix(), b.live_layout));
    }
  }
  rep.checks.push_back(check(
      "branch-outputs-free", cq_failures, 0,
      std::to_string(branches) + " post-selected branches from " +
          std::to_string(sequences) + " random operation sequences"));
  rep.checks.push_back(check("wire-offdiagonal-weight", worst_offdiag, 1e-9,
                             "largest coherence leaked into any wire "
                             "block"));
  return rep;
}

}  // namespace

bool SuiteReport::passed() const {
  for (const CheckResult& c : checks)
    if (!c.passed) return false;
  return true;
}

std::vector<std::string> suite_names() {
  return {"bijection",   "phase-loop",     "teleport",
          "iqo",         "normal-form",    "translate-locc",
          "free-state-preservation"};
}

SuiteReport run_suite(const std::string& name, std::uint64_t seed) {
  if (name == "bijection") return bijection_suite(seed);
  if (name == "phase-loop") return phase_loop_suite(seed);
  if (name == "teleport") return teleport_suite(seed);
  if (name == "iqo") return iqo_suite(seed);
  if (name == "normal-form") return normal_form_suite(seed);
  if (name == "translate-locc") return translate_locc_suite(seed);
  if (name == "free-state-preservation") return free_state_suite(seed);
  std::string names;
  for (const std::string& n : suite_names()) {
    if (!names.empty()) names += ", ";
    names += n;
  }
  throw std::invalid_argument("unknown suite \"" + name + "\"; expected one " +
                              "of: " + names);
}

std::string format_report(const SuiteReport& report) {
  std::string out;
  out += "suite: " + report.suite + "\n";
  out += "claim: " + report.claim + "\n";
  out += "seed: " + std::to_string(report.seed) + "\n";
  for (const CheckResult& c : report.checks) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "check %s: %s (worst %.3e, bound %g)",
                  c.name.c_str(), c.passed ? "pass" : "FAIL", c.worst,
                  c.bound);
    out += buf;
    if (!c.detail.empty()) out += " - " + c.detail;
    out += "\n";
  }
  out += std::string("result: ") + (report.passed() ? "pass" : "FAIL") + "\n";
  return out;
}

}  // namespace lop
