#pragma once

#include "lop/channel.hpp"
#include "lop/protocol.hpp"

#include <vector>

namespace lop {

// Ready-made protocol trees for the named constructions of the wire/quantum
// operational model. Each factory documents the register names of the layout
// it acts on; companion *_layout / *_ket / *_registers helpers return the
// matching initial layout, canonical input states, and output register names
// so callers never have to re-derive the conventions.

// ---------------------------------------------------------------------------
// Wire <-> quantum correlation ("doubling") and its left inverse.

// Input layout: [ w: wire(d) ].
SystemLayout bijection_input_layout(int d);
// Layout after bijection_B: [ w: wire(d), q: quantum(d) ].
SystemLayout bijection_image_layout(int d);

// Correlates a fresh quantum register q with the wire w: rho on w becomes
// B rho B^dag on (w, q) with B = sum_i |i>_W |i>_Q <i|_W. Three operations:
// prepare a helper wire, copy w into it by a permutation, forward the copy.
ProtocolTree bijection_B(int d);

// Left inverse of bijection_B on states supported on the correlated
// subspace span{|i>_W |i>_Q}: a removing Fourier measurement on q (outcome
// wire "k") followed by a phase correction on w. Every one of the d
// outcomes reproduces the input exactly. Inputs off the correlated subspace
// come out dephased on w in general.
ProtocolTree bijection_B_inv(int d);

// ---------------------------------------------------------------------------
// Repeat-until-success wire phase via the quantum side.

// Input layout: [ w: wire(d) ].
SystemLayout phase_loop_layout(int d);

// Applies sum_j e^{i phases[j]} |j><j| to the wire with per-round success
// probability exactly 1/d (input-independent) and at most max_rounds rounds.
// Each round: correlate w with a fresh quantum register, apply the residual
// phase there, measure it in the Fourier basis. Outcome 0 heralds success;
// any other outcome leaves a known extra phase, which the next round folds
// into its residual. A branch is successful iff its final recorded outcome
// (outcomes.back()) is 0; failed leaves carry the uncorrected residual.
ProtocolTree phase_via_loop(const std::vector<double>& phases, int d,
                            int max_rounds);

// ---------------------------------------------------------------------------
// Channel teleportation across the wire.

struct ChannelSpec {
  QuantumChannel target;  // square channel on wire (x) quantum, W slowest
  int wire_dim = 0;
  int quantum_dim = 0;
};

// Input layout: [ wa: wire(d), w: wire(d), p: quantum(quantum_dim) ].
// wa is the helper wire, to be supplied maximally coherent; (w, p) carries
// the channel input.
SystemLayout teleport_layout(const ChannelSpec& spec);

// Consumes a maximally coherent state on wa to apply spec.target to (w, p),
// leaving the wire output on wa and the quantum output on p. Sequence:
// forward w, apply the target instrument (outcome wire "a"), correlate wa
// with a fresh quantum register, measure that register and the forwarded
// input in the generalized Bell basis (outcome wire "m", index k*d+l), then
// correct wa by a phase and a cyclic shift keyed on (k, l). Each (alpha, k,
// l) branch operator equals K^alpha / d on the coherent-ancilla input.
ProtocolTree teleport_channel(const ChannelSpec& spec);

// ---------------------------------------------------------------------------
// Basis-aligned instruments on the wire, run through the quantum side.

// Input layout for both iqo_* factories: [ w: wire(d), p: quantum(dq) ]
// with dq = ch.in_dim() / d.
SystemLayout iqo_layout(const QuantumChannel& ch, int d);

// Runs a channel whose Kraus operators are all basis-aligned on the wire
// (K_a = sum_i |f_a(i)><i|_W (x) E_a(i)) with heralded success probability
// exactly 1/d, input-independent. A branch is successful iff its final
// recorded outcome is 0; each successful (a, k) branch operator equals
// K_a / d. Throws std::invalid_argument if some Kraus operator couples
// distinct wire labels.
ProtocolTree iqo_stochastic(const QuantumChannel& ch, int d);

// Deterministic (probability-1) realization of a basis-aligned channel on a
// dimension-2 wire. Injective-pattern Kraus operators run directly; the
// label-collapsing ones are deferred behind a positive square-root factor
// and recovered in a second stage through pseudo-inverse operators, with a
// zero-probability defect outcome completing the instrument.
ProtocolTree iqo_qubit_exact(const QuantumChannel& ch);

// ---------------------------------------------------------------------------
// Multipartite target states from coherent wire inputs.

enum class GhzTopology { single_wire, chain };
enum class WTopology { single_wire, two_wire };

// single_wire: [ w: wire(2) ], input |+>.
// chain: [ w1..w(n-1): wire(2) each ], input |+>^(n-1).
SystemLayout ghz_input_layout(int n, GhzTopology topology);
ComplexMatrix ghz_input_ket(int n, GhzTopology topology);
// Output quantum registers, in final layout order; all dimension 2.
std::vector<std::string> ghz_output_registers(int n, GhzTopology topology);
// (|0...0> + |1...1>)/sqrt(2) on n qubits.
ComplexMatrix ghz_target_ket(int n);

// single_wire: fan the coherent wire out across helper wires by one
// permutation per helper, then forward every piece. chain: turn each wire
// into a two-qubit maximally correlated pair, then grow the state link by
// link, consuming each pair to teleport the grown end one register further.
// Requires n >= 2.
ProtocolTree prepare_ghz(int n, GhzTopology topology);

// single_wire: [ w: wire(n) ], input (1/sqrt(n)) sum_i |i>.
// two_wire (n=3 only): [ w1: wire(2), w2: wire(2) ],
// input (|0>+|1>)/sqrt(2) (x) (|0>+sqrt(2)|1>)/sqrt(3).
SystemLayout w_input_layout(int n, WTopology topology);
ComplexMatrix w_input_ket(int n, WTopology topology);
// Output quantum registers in final layout order. single_wire: first has
// dimension n (holding only levels 0/1), the rest dimension 2; two_wire:
// three qubits.
std::vector<std::string> w_output_registers(int n, WTopology topology);
// The single-excitation state on the output registers, in their order and
// dimensions.
ComplexMatrix w_target_ket(int n, WTopology topology);

// single_wire: one permutation spreads level k of the wire into "the k-th
// helper is excited", then everything is forwarded. two_wire: the second
// wire's correlated pair is reshaped into a three-qubit single-excitation
// state, and the first wire is spent as a correlated pair that teleports
// one of those qubits away. Requires n >= 2; two_wire requires n == 3.
ProtocolTree prepare_w(int n, WTopology topology);

}  // namespace lop
