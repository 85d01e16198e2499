#pragma once

#include "lop/channel.hpp"

#include <string>
#include <vector>

namespace lop {

// A register is either a wire (classical carrier with a fixed incoherent
// basis) or a quantum register.
enum class RegKind { wire, quantum };

struct Register {
  std::string name;
  int dim = 0;
  RegKind kind = RegKind::quantum;
};

// Ordered list of named registers. States and operators on the composite
// space use row-major flat indexing over the declared order: the first
// register varies slowest.
class SystemLayout {
 public:
  SystemLayout() = default;
  explicit SystemLayout(std::vector<Register> regs);

  int size() const { return static_cast<int>(regs_.size()); }
  const Register& reg(int i) const { return regs_.at(i); }
  const std::vector<Register>& registers() const { return regs_; }

  bool has(const std::string& name) const;
  int index_of(const std::string& name) const;  // throws if absent

  int total_dim() const { return total_dim_; }
  std::vector<int> dims() const;
  std::vector<bool> wire_flags() const;

  // Product of wire (resp. quantum) register dimensions.
  int wire_dim() const;
  int quantum_dim() const;
  std::vector<int> indices_of_kind(RegKind kind) const;

  int flat_index(const std::vector<int>& digits) const;
  std::vector<int> digits_of(int flat) const;

  // Position of a full flat index in the sorted (wire (x) quantum) space:
  // wire registers in declared order form the wire factor, quantum registers
  // the quantum factor.
  int sorted_index(int flat) const;
  // The flat index of a given (wire_flat, quantum_flat) pair.
  int unsorted_index(int wire_flat, int quantum_flat) const;

  // Non-mutating edits used as a protocol evolves.
  SystemLayout with_appended(Register r) const;
  SystemLayout without(const std::string& name) const;
  SystemLayout with_dim(const std::string& name, int new_dim) const;
  // Registers restricted to `names` (declared order preserved).
  SystemLayout restricted_to(const std::vector<std::string>& names) const;

  bool same_registers(const SystemLayout& other) const;

 private:
  std::vector<Register> regs_;
  int total_dim_ = 1;
};

// Named-register conveniences over the qcore primitives.
DensityMatrix partial_trace(const DensityMatrix& rho, const SystemLayout& layout,
                            const std::vector<std::string>& keep);
DensityMatrix dephase(const DensityMatrix& rho, const SystemLayout& layout);
ComplexMatrix dephase_raw(const ComplexMatrix& m, const SystemLayout& layout);

// Lift an operator that acts on a subset of registers to the full layout.
// `local` maps the joint space of in_layout registers `in_sel` (in the listed
// order, row-major) to the joint space of out_layout registers `out_sel`.
// Registers not selected must appear in both layouts with equal name and
// dimension and in the same relative order; they are passed through.
ComplexMatrix lift_operator(const ComplexMatrix& local,
                            const SystemLayout& in_layout,
                            const std::vector<int>& in_sel,
                            const SystemLayout& out_layout,
                            const std::vector<int>& out_sel);

// 0/1 permutation matrix P with P |flat> = |sorted_index(flat)>, mapping the
// declared-order basis to the sorted (wire (x) quantum) basis.
ComplexMatrix sort_permutation(const SystemLayout& layout);

}  // namespace lop
