#pragma once

#include "lop/layout.hpp"

#include <string>
#include <utility>
#include <vector>

namespace lop {

// One of the four generating operations of the wire/quantum operational
// model:
//   permutation  relabel the joint basis of one or more wire registers
//   phase        basis-state-dependent phase on wire registers
//   observed     instrument on quantum registers; the outcome index is
//                written into a fresh wire appended at the end of the
//                layout, and the instrument may resize its registers or
//                create fresh quantum registers
//   forward      move a wire's basis states into a fresh quantum register
//                of the same dimension (the embedding sum_j |j>_Q <j|_W)
struct ElementalOp {
  enum class Kind { permutation, phase, observed, forward };

  Kind kind = Kind::permutation;

  // permutation/phase: wire registers whose joint index the table/angles
  // refer to. observed: quantum registers the Kraus operators act on. The
  // listed order fixes the row-major index composition of the local data.
  std::vector<std::string> regs;

  // permutation: table[i] is the image of joint basis state i; a bijection.
  std::vector<int> table;

  // phase: joint basis state i picks up exp(i * angles[i]).
  std::vector<double> angles;

  // observed: Kraus operators of the instrument. Columns are indexed by the
  // joint input space of `regs`; rows by the joint output space: `out_dims`
  // for the same registers, then the `created` registers, in order.
  std::vector<ComplexMatrix> kraus;
  // observed: output dimension of each register in `regs` (empty: all
  // unchanged). A destructive instrument shrinks registers to dimension 1.
  std::vector<int> out_dims;
  // observed: fresh quantum registers produced by the instrument, appended
  // to the layout after the existing registers.
  std::vector<Register> created;
  // observed: name of the fresh outcome wire, always appended last.
  std::string ancilla;
  // observed: dimension of the outcome wire; 0 means "one level per
  // outcome"; an explicit value must cover the outcome count.
  int ancilla_dim = 0;

  // forward: source wire register and fresh target quantum register name.
  std::string source;
  std::string target;

  int outcome_count() const {
    return kind == Kind::observed ? static_cast<int>(kraus.size()) : 1;
  }

  static ElementalOp wire_permutation(std::vector<std::string> regs,
                                      std::vector<int> table);
  static ElementalOp wire_phase(std::vector<std::string> regs,
                                std::vector<double> angles);
  static ElementalOp observed_instrument(std::vector<std::string> regs,
                                         std::vector<ComplexMatrix> kraus,
                                         std::string ancilla,
                                         int ancilla_dim = 0,
                                         std::vector<int> out_dims = {},
                                         std::vector<Register> created = {});
  static ElementalOp forward_wire(std::string source, std::string target);

  // A wire prepared in |0> of the given dimension: an observed operation
  // with no input registers and a single trivial Kraus operator, whose
  // outcome wire is the prepared register itself.
  static ElementalOp prepare_wire(std::string name, int dim);
};

namespace detail {

// Register-level decomposition of one elemental operation: the registers it
// consumes and produces, the layout it leaves behind, and the local Kraus
// operator per outcome. The outcome-wire ket factor is NOT included in
// outcome_kraus; the record register is reported separately so callers can
// track outcome wires symbolically instead of materializing them.
struct LocalAction {
  std::vector<std::string> in_regs;   // consumed registers, op order
  std::vector<std::string> out_regs;  // produced registers, op order
  SystemLayout layout_after;          // includes the record wire, if any
  std::vector<ComplexMatrix> outcome_kraus;  // indexed by outcome
  std::string record_reg;  // outcome wire name; empty if the op has none
  int record_dim = 0;
};

// Validates the op against the layout and lays out its action. Throws
// std::invalid_argument on any inconsistency (unknown register, permutation
// or phase on a quantum register, forwarding a quantum register, an
// incomplete observed Kraus set, name collisions, shape mismatches).
LocalAction local_action(const ElementalOp& op, const SystemLayout& layout);

}  // namespace detail

// The full-space channel of one elemental operation together with the layout
// it leaves behind. The channel's Kraus operators map the joint space of
// `layout` to the joint space of the returned layout; for observed
// operations each Kraus carries its outcome-wire ket.
std::pair<QuantumChannel, SystemLayout> elemental(const ElementalOp& op,
                                                  const SystemLayout& layout);

}  // namespace lop
