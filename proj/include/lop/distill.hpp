#pragma once

#include "lop/layout.hpp"
#include "lop/states.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lop {

// Two-level coherence pumping. The working state is the symmetric qubit
// wire state with off-diagonal p/2; each round consumes a helper state with
// off-diagonal q/2, applies a copy permutation controlled on the working
// wire, and measures the control in the +/- basis. The "+" outcome raises
// p, the "-" outcome lowers it, and the "+" outcome is the likelier one
// whenever p, q > 0.

struct StepOutcome {
  int sign = +1;  // +1 for the "+" outcome, -1 for "-"
  double probability = 0.0;
  double p_new = 0.0;
};

// Closed-form branch table for one pumping round:
//   +: probability (1 + pq)/2, new p = (p + q)/(1 + pq)
//   -: probability (1 - pq)/2, new p = (p - q)/(1 - pq)
// Requires p, q in [-1, 1]. Zero-probability branches are omitted, so the
// saturated case p = q = 1 returns the "+" entry alone.
std::vector<StepOutcome> step_update(double p, double q);

struct OracleOutcome {
  int sign = +1;
  double probability = 0.0;
  double p_new = 0.0;
  ComplexMatrix state;  // normalized 2x2 post-state on the working wire
};

// The same round executed on explicit 2x2 density matrices: copy
// permutation, +/- measurement of the control, and on the "-" outcome the
// phase flip that returns the off-diagonal to the +/- bookkeeping axis.
// Agrees with step_update to full precision; zero-probability branches are
// omitted.
std::vector<OracleOutcome> step_oracle(double p, double q);

struct DistillParams {
  double p0 = 0.02;  // initial off-diagonal x2
  double q = 0.02;   // helper off-diagonal x2
  int trials = 1000;
  int steps = 5000;
  uint64_t seed = 1;
  // Drop a trial for good the moment its p turns negative; dropped trials
  // leave the mean and feed the surviving fraction instead.
  bool drop_negative = true;
};

struct DistillRecord {
  int step = 0;
  double mean_p_half = 0.0;
  double std_p_half = 0.0;
  double survivors = 1.0;  // fraction of trials still alive
};

struct DistillTrace {
  std::vector<DistillRecord> records;  // one per step, step 0 = initial
};

// Monte Carlo over independent trials, one counter-derived stream per trial
// index, so results do not depend on execution order. Statistics at each
// step cover the surviving trials only.
DistillTrace run_chain(const DistillParams& params);

// CSV rendering with header "step,mean_p_half,std_p_half,survivors".
std::string trace_csv(const DistillTrace& trace);

struct QubitExtraction {
  bool ok = false;
  ComplexMatrix state;        // symmetric 2x2 wire state, when ok
  double p_half = 0.0;        // its off-diagonal
  double probability = 0.0;   // branch probability of reaching it
  int attempts = 0;           // rank-1 probes consumed by the search
};

// Free-operation route from any state with wire coherence to a symmetric
// coherent qubit wire state: pick the wire pair with the largest coherent
// block and project onto it. If the pair's wire marginal is coherent the
// quantum side is simply discarded (attempts = 0); otherwise the coherence
// hides in correlations, and the quantum side is probed with random rank-1
// measurements until the surviving 2x2 wire state is coherent. Either way
// the off-diagonal is rotated positive and the state symmetrized, and
// `probability` is the branch probability of the kept outcomes. Throws
// std::invalid_argument on incoherent-quantum input; a fruitless search
// (possible only with vanishing probability) is reported with ok = false
// rather than thrown.
QubitExtraction extract_qubit_block(const DensityMatrix& rho,
                                    const SystemLayout& layout,
                                    uint64_t seed = 1,
                                    int max_attempts = 1000);

}  // namespace lop
