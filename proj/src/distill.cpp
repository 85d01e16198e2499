#include "lop/distill.hpp"

#include "lop/classify.hpp"
#include "lop/random_objects.hpp"
#include "lop/rng.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace lop {
namespace {

constexpr double kZeroProb = 1e-15;

void require_unit_interval(double v, const char* who, const char* what) {
  if (!(v >= -1.0 && v <= 1.0))
    throw std::invalid_argument(std::string(who) + ": " + what +
                                " must lie in [-1, 1]");
}

ComplexMatrix symmetric_qubit(double off) {
  ComplexMatrix m = zero_matrix(2, 2);
  m(0, 0) = m(1, 1) = 0.5;
  m(0, 1) = m(1, 0) = off;
  return m;
}

}  // namespace

std::vector<StepOutcome> step_update(double p, double q) {
  require_unit_interval(p, "step_update", "p");
  require_unit_interval(q, "step_update", "q");
  std::vector<StepOutcome> out;
  const double plus_prob = (1.0 + p * q) / 2.0;
  if (plus_prob > kZeroProb)
    out.push_back({+1, plus_prob, (p + q) / (1.0 + p * q)});
  const double minus_prob = (1.0 - p * q) / 2.0;
  if (minus_prob > kZeroProb)
    out.push_back({-1, minus_prob, (p - q) / (1.0 - p * q)});
  return out;
}

std::vector<OracleOutcome> step_oracle(double p, double q) {
  require_unit_interval(p, "step_oracle", "p");
  require_unit_interval(q, "step_oracle", "q");

  const ComplexMatrix rho =
      kron(symmetric_qubit(p / 2.0), symmetric_qubit(q / 2.0));

  // (i, j) -> (i, (i + j) % 2), control first.
  ComplexMatrix cnot = zero_matrix(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) cnot(i * 2 + (i + j) % 2, i * 2 + j) = 1.0;

  ComplexMatrix zflip = identity_matrix(2);
  zflip(1, 1) = -1.0;

  std::vector<OracleOutcome> out;
  for (int sign : {+1, -1}) {
    ComplexMatrix meas = zero_matrix(1, 2);
    meas(0, 0) = 1.0 / std::sqrt(2.0);
    meas(0, 1) = sign / std::sqrt(2.0);
    const ComplexMatrix branch = kron(meas, identity_matrix(2)) * cnot;
    ComplexMatrix tau = branch * rho * dagger(branch);
    if (sign < 0) tau = zflip * tau * zflip;  // re-align the bookkeeping axis
    const double prob = tau.trace().real();
    if (prob <= kZeroProb) continue;
    const ComplexMatrix state = tau / prob;
    out.push_back(
        {sign, prob, 2.0 * state(0, 1).real(), state});
  }
  return out;
}

DistillTrace run_chain(const DistillParams& params) {
  if (!(params.p0 >= 0.0 && params.p0 <= 1.0))
    throw std::invalid_argument("run_chain: p0 must lie in [0, 1]");
  if (!(params.q >= 0.0 && params.q <= 1.0))
    throw std::invalid_argument("run_chain: q must lie in [0, 1]");
  if (params.trials < 1)
    throw std::invalid_argument("run_chain: need at least one trial");
  if (params.steps < 0)
    throw std::invalid_argument("run_chain: steps must be non-negative");

  const int rows = params.steps + 1;
  std::vector<double> sum(rows, 0.0), sum_sq(rows, 0.0);
  std::vector<long> alive(rows, 0);

  for (int trial = 0; trial < params.trials; ++trial) {
    Rng rng(substream(params.seed, static_cast<uint64_t>(trial)));
    double p = params.p0;
    sum[0] += p / 2.0;
    sum_sq[0] += (p / 2.0) * (p / 2.0);
    ++alive[0];
    for (int step = 1; step <= params.steps; ++step) {
      const auto outcomes = step_update(p, params.q);
      const double r = rng.uniform();
      double cumulative = 0.0;
      p = outcomes.back().p_new;
      for (const StepOutcome& o : outcomes) {
        cumulative += o.probability;
        if (r < cumulative) {
          p = o.p_new;
          break;
        }
      }
      if (params.drop_negative && p < 0.0) break;  // trial dropped for good
      sum[step] += p / 2.0;
      sum_sq[step] += (p / 2.0) * (p / 2.0);
      ++alive[step];
    }
  }

  DistillTrace trace;
  trace.records.reserve(rows);
  for (int step = 0; step < rows; ++step) {
    DistillRecord rec;
    rec.step = step;
    rec.survivors =
        static_cast<double>(alive[step]) / static_cast<double>(params.trials);
    if (alive[step] > 0) {
      const double n = static_cast<double>(alive[step]);
      rec.mean_p_half = sum[step] / n;
      const double var =
          std::max(0.0, sum_sq[step] / n - rec.mean_p_half * rec.mean_p_half);
      rec.std_p_half = std::sqrt(var);
    }
    trace.records.push_back(rec);
  }
  return trace;
}

std::string trace_csv(const DistillTrace& trace) {
  std::string out = "step,mean_p_half,std_p_half,survivors\n";
  char line[160];
  for (const DistillRecord& rec : trace.records) {
    std::snprintf(line, sizeof(line), "%d,%.17g,%.17g,%.17g\n", rec.step,
                  rec.mean_p_half, rec.std_p_half, rec.survivors);
    out += line;
  }
  return out;
}

QubitExtraction extract_qubit_block(const DensityMatrix& rho,
                                    const SystemLayout& layout,
                                    uint64_t seed, int max_attempts) {
  if (rho.dim() != layout.total_dim())
    throw std::invalid_argument(
        "extract_qubit_block: state does not match the layout");
  if (is_cq_state(rho, layout))
    throw std::invalid_argument(
        "extract_qubit_block: state is incoherent-quantum, nothing to "
        "extract");

  const int dw = layout.wire_dim();
  const int dq = layout.quantum_dim();
  const ComplexMatrix& m = rho.matrix();

  // Wire-indexed quantum blocks rho(i, j).
  auto block = [&](int i, int j) {
    ComplexMatrix b = zero_matrix(dq, dq);
    for (int a = 0; a < dq; ++a)
      for (int c = 0; c < dq; ++c)
        b(a, c) = m(layout.unsorted_index(i, a), layout.unsorted_index(j, c));
    return b;
  };

  // Largest coherent block decides the wire pair kept by the projection.
  int best_i = -1, best_j = -1;
  double best = 0.0;
  for (int i = 0; i < dw; ++i) {
    for (int j = i + 1; j < dw; ++j) {
      const double weight = max_abs(block(i, j));
      if (weight > best) {
        best = weight;
        best_i = i;
        best_j = j;
      }
    }
  }
  if (best_i < 0)
    throw std::invalid_argument(
        "extract_qubit_block: no coherent wire pair found");

  const ComplexMatrix b00 = block(best_i, best_i);
  const ComplexMatrix b01 = block(best_i, best_j);
  const ComplexMatrix b11 = block(best_j, best_j);

  QubitExtraction result;

  // Discard route first: when the wire marginal of the chosen pair is
  // itself coherent, tracing out the quantum side already works and no
  // probe is spent. Otherwise the coherence is hidden in correlations and
  // the marginal traces cancel, so fall through to the rank-1 search.
  const double pair_weight = b00.trace().real() + b11.trace().real();
  const Complex marginal_01 = b01.trace();
  if (pair_weight > kZeroProb &&
      std::abs(marginal_01) > tol::structural * pair_weight) {
    result.ok = true;
    result.attempts = 0;
    result.p_half = std::abs(marginal_01) / pair_weight;
    result.probability = pair_weight;
    result.state = symmetric_qubit(result.p_half);
    return result;
  }

  Rng rng(seed);
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    result.attempts = attempt;
    ComplexMatrix phi = dq == 1 ? basis_ket(1, 0) : random_pure_ket(rng, dq);
    const Complex s00 = (dagger(phi) * b00 * phi)(0, 0);
    const Complex s01 = (dagger(phi) * b01 * phi)(0, 0);
    const Complex s11 = (dagger(phi) * b11 * phi)(0, 0);
    const double weight = s00.real() + s11.real();
    if (weight <= kZeroProb) continue;
    if (std::abs(s01) <= tol::structural * weight) continue;

    // Free post-processing: rotate the off-diagonal onto the positive real
    // axis, then average with the 0 <-> 1 relabeling to level the diagonal.
    result.ok = true;
    result.p_half = std::abs(s01) / weight;
    result.probability = weight;
    result.state = symmetric_qubit(result.p_half);
    return result;
  }
  return result;  // ok = false: search exhausted
}

}  // namespace lop
