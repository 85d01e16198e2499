#include "lop/elemental.hpp"

#include <set>
#include <sstream>
#include <stdexcept>

namespace lop {

ElementalOp ElementalOp::wire_permutation(std::vector<std::string> regs,
                                          std::vector<int> table) {
  ElementalOp op;
  op.kind = Kind::permutation;
  op.regs = std::move(regs);
  op.table = std::move(table);
  return op;
}

ElementalOp ElementalOp::wire_phase(std::vector<std::string> regs,
                                    std::vector<double> angles) {
  ElementalOp op;
  op.kind = Kind::phase;
  op.regs = std::move(regs);
  op.angles = std::move(angles);
  return op;
}

ElementalOp ElementalOp::observed_instrument(std::vector<std::string> regs,
                                             std::vector<ComplexMatrix> kraus,
                                             std::string ancilla,
                                             int ancilla_dim,
                                             std::vector<int> out_dims,
                                             std::vector<Register> created) {
  ElementalOp op;
  op.kind = Kind::observed;
  op.regs = std::move(regs);
  op.kraus = std::move(kraus);
  op.ancilla = std::move(ancilla);
  op.ancilla_dim = ancilla_dim;
  op.out_dims = std::move(out_dims);
  op.created = std::move(created);
  return op;
}

ElementalOp ElementalOp::forward_wire(std::string source, std::string target) {
  ElementalOp op;
  op.kind = Kind::forward;
  op.source = std::move(source);
  op.target = std::move(target);
  return op;
}

ElementalOp ElementalOp::prepare_wire(std::string name, int dim) {
  ElementalOp op;
  op.kind = Kind::observed;
  op.kraus = {identity_matrix(1)};
  op.ancilla = std::move(name);
  op.ancilla_dim = dim;
  return op;
}

namespace detail {

namespace {

[[noreturn]] void fail(const std::string& what) {
  throw std::invalid_argument("elemental: " + what);
}

// Resolves op.regs against the layout, enforcing existence, uniqueness and
// the required register kind.
std::vector<int> resolve_regs(const ElementalOp& op, const SystemLayout& layout,
                              RegKind required, const char* op_name,
                              const char* kind_complaint) {
  std::vector<int> idx;
  std::set<std::string> seen;
  for (const auto& name : op.regs) {
    if (!layout.has(name)) {
      fail(std::string(op_name) + ": no register named '" + name + "'");
    }
    if (!seen.insert(name).second) {
      fail(std::string(op_name) + ": register '" + name + "' listed twice");
    }
    int i = layout.index_of(name);
    if (layout.reg(i).kind != required) {
      fail(std::string(op_name) + " " + kind_complaint + " '" + name + "'");
    }
    idx.push_back(i);
  }
  return idx;
}

int joint_dim(const SystemLayout& layout, const std::vector<int>& idx) {
  int d = 1;
  for (int i : idx) d *= layout.reg(i).dim;
  return d;
}

LocalAction permutation_action(const ElementalOp& op,
                               const SystemLayout& layout) {
  std::vector<int> idx = resolve_regs(op, layout, RegKind::wire, "permutation",
                                      "on a quantum register");
  int d = joint_dim(layout, idx);
  if (static_cast<int>(op.table.size()) != d) {
    fail("permutation: table has " + std::to_string(op.table.size()) +
         " entries for joint dimension " + std::to_string(d));
  }
  std::vector<bool> hit(d, false);
  for (int v : op.table) {
    if (v < 0 || v >= d || hit[v]) {
      fail("permutation: table is not a bijection");
    }
    hit[v] = true;
  }
  ComplexMatrix p = zero_matrix(d, d);
  for (int i = 0; i < d; ++i) p(op.table[i], i) = 1.0;

  LocalAction act;
  act.in_regs = op.regs;
  act.out_regs = op.regs;
  act.layout_after = layout;
  act.outcome_kraus = {std::move(p)};
  return act;
}

LocalAction phase_action(const ElementalOp& op, const SystemLayout& layout) {
  std::vector<int> idx =
      resolve_regs(op, layout, RegKind::wire, "phase", "on a quantum register");
  int d = joint_dim(layout, idx);
  if (static_cast<int>(op.angles.size()) != d) {
    fail("phase: " + std::to_string(op.angles.size()) +
         " angles for joint dimension " + std::to_string(d));
  }
  ComplexMatrix p = zero_matrix(d, d);
  for (int i = 0; i < d; ++i) {
    p(i, i) = std::exp(Complex(0.0, op.angles[i]));
  }

  LocalAction act;
  act.in_regs = op.regs;
  act.out_regs = op.regs;
  act.layout_after = layout;
  act.outcome_kraus = {std::move(p)};
  return act;
}

LocalAction observed_action(const ElementalOp& op, const SystemLayout& layout) {
  std::vector<int> idx = resolve_regs(op, layout, RegKind::quantum, "observed",
                                      "instrument on a wire register");
  if (op.kraus.empty()) {
    fail("observed: empty Kraus list");
  }
  if (!op.out_dims.empty() &&
      op.out_dims.size() != op.regs.size()) {
    fail("observed: out_dims must match the register list");
  }

  int in_dim = joint_dim(layout, idx);
  int out_dim = 1;
  for (std::size_t k = 0; k < op.regs.size(); ++k) {
    int d = op.out_dims.empty() ? layout.reg(idx[k]).dim : op.out_dims[k];
    if (d < 1) fail("observed: output dimension < 1");
    out_dim *= d;
  }
  for (const auto& c : op.created) {
    if (c.kind != RegKind::quantum) {
      fail("observed: created register '" + c.name + "' must be quantum");
    }
    if (c.dim < 1) fail("observed: created register dimension < 1");
    out_dim *= c.dim;
  }

  for (const auto& k : op.kraus) {
    if (k.rows() != out_dim || k.cols() != in_dim) {
      std::ostringstream msg;
      msg << "observed: Kraus shape " << k.rows() << "x" << k.cols()
          << ", expected " << out_dim << "x" << in_dim;
      fail(msg.str());
    }
  }
  ComplexMatrix total = zero_matrix(in_dim, in_dim);
  for (const auto& k : op.kraus) total += dagger(k) * k;
  double defect = max_abs_diff(total, identity_matrix(in_dim));
  if (defect > tol::structural) {
    std::ostringstream msg;
    msg << "observed: incomplete Kraus set (completeness defect " << defect
        << ")";
    fail(msg.str());
  }

  int outcomes = static_cast<int>(op.kraus.size());
  int record_dim = op.ancilla_dim == 0 ? outcomes : op.ancilla_dim;
  if (record_dim < outcomes) {
    fail("observed: outcome wire dimension " + std::to_string(record_dim) +
         " below outcome count " + std::to_string(outcomes));
  }
  if (op.ancilla.empty()) fail("observed: outcome wire name missing");

  // Fresh-name bookkeeping for the outcome wire and created registers.
  std::set<std::string> fresh;
  SystemLayout after = layout;
  if (!op.out_dims.empty()) {
    for (std::size_t k = 0; k < op.regs.size(); ++k) {
      after = after.with_dim(op.regs[k], op.out_dims[k]);
    }
  }
  for (const auto& c : op.created) {
    if (layout.has(c.name) || !fresh.insert(c.name).second) {
      fail("observed: created register name '" + c.name + "' already in use");
    }
    after = after.with_appended(c);
  }
  if (layout.has(op.ancilla) || !fresh.insert(op.ancilla).second) {
    fail("observed: outcome wire name '" + op.ancilla + "' already in use");
  }
  after = after.with_appended({op.ancilla, record_dim, RegKind::wire});

  LocalAction act;
  act.in_regs = op.regs;
  act.out_regs = op.regs;
  for (const auto& c : op.created) act.out_regs.push_back(c.name);
  act.layout_after = std::move(after);
  act.outcome_kraus = op.kraus;
  act.record_reg = op.ancilla;
  act.record_dim = record_dim;
  return act;
}

LocalAction forward_action(const ElementalOp& op, const SystemLayout& layout) {
  if (!layout.has(op.source)) {
    fail("forward: no register named '" + op.source + "'");
  }
  const Register& src = layout.reg(layout.index_of(op.source));
  if (src.kind != RegKind::wire) {
    fail("forward: cannot forward quantum register '" + op.source +
         "'; the source must be a wire");
  }
  if (op.target.empty() || layout.has(op.target)) {
    fail("forward: target name '" + op.target + "' already in use or empty");
  }

  LocalAction act;
  act.in_regs = {op.source};
  act.out_regs = {op.target};
  act.layout_after = layout.without(op.source).with_appended(
      {op.target, src.dim, RegKind::quantum});
  // sum_j |j>_target <j|_source is the identity matrix once both spaces are
  // indexed by their basis labels; the register migration carries the
  // wire->quantum change of status.
  act.outcome_kraus = {identity_matrix(src.dim)};
  return act;
}

}  // namespace

LocalAction local_action(const ElementalOp& op, const SystemLayout& layout) {
  switch (op.kind) {
    case ElementalOp::Kind::permutation:
      return permutation_action(op, layout);
    case ElementalOp::Kind::phase:
      return phase_action(op, layout);
    case ElementalOp::Kind::observed:
      return observed_action(op, layout);
    case ElementalOp::Kind::forward:
      return forward_action(op, layout);
  }
  throw std::invalid_argument("elemental: unknown op kind");
}

}  // namespace detail

std::pair<QuantumChannel, SystemLayout> elemental(const ElementalOp& op,
                                                  const SystemLayout& layout) {
  detail::LocalAction act = detail::local_action(op, layout);

  std::vector<int> in_sel;
  for (const auto& name : act.in_regs) in_sel.push_back(layout.index_of(name));
  std::vector<int> out_sel;
  for (const auto& name : act.out_regs) {
    out_sel.push_back(act.layout_after.index_of(name));
  }
  if (!act.record_reg.empty()) {
    out_sel.push_back(act.layout_after.index_of(act.record_reg));
  }

  std::vector<ComplexMatrix> lifted;
  lifted.reserve(act.outcome_kraus.size());
  for (std::size_t a = 0; a < act.outcome_kraus.size(); ++a) {
    ComplexMatrix local = act.outcome_kraus[a];
    if (!act.record_reg.empty()) {
      local = kron(local, basis_ket(act.record_dim, static_cast<int>(a)));
    }
    lifted.push_back(
        lift_operator(local, layout, in_sel, act.layout_after, out_sel));
  }
  return {QuantumChannel(std::move(lifted)), act.layout_after};
}

}  // namespace lop
