#include "lop/layout.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace lop {

SystemLayout::SystemLayout(std::vector<Register> regs) : regs_(std::move(regs)) {
  std::set<std::string> seen;
  total_dim_ = 1;
  for (const auto& r : regs_) {
    if (r.name.empty()) {
      throw std::invalid_argument("SystemLayout: empty register name");
    }
    if (r.dim < 1) {
      throw std::invalid_argument("SystemLayout: register '" + r.name +
                                  "' has dimension < 1");
    }
    if (!seen.insert(r.name).second) {
      throw std::invalid_argument("SystemLayout: duplicate register name '" +
                                  r.name + "'");
    }
    total_dim_ *= r.dim;
  }
}

bool SystemLayout::has(const std::string& name) const {
  for (const auto& r : regs_) {
    if (r.name == name) return true;
  }
  return false;
}

int SystemLayout::index_of(const std::string& name) const {
  for (int i = 0; i < size(); ++i) {
    if (regs_[i].name == name) return i;
  }
  throw std::invalid_argument("SystemLayout: no register named '" + name + "'");
}

std::vector<int> SystemLayout::dims() const {
  std::vector<int> d(regs_.size());
  for (std::size_t i = 0; i < regs_.size(); ++i) d[i] = regs_[i].dim;
  return d;
}

std::vector<bool> SystemLayout::wire_flags() const {
  std::vector<bool> f(regs_.size());
  for (std::size_t i = 0; i < regs_.size(); ++i) {
    f[i] = regs_[i].kind == RegKind::wire;
  }
  return f;
}

int SystemLayout::wire_dim() const {
  int p = 1;
  for (const auto& r : regs_) {
    if (r.kind == RegKind::wire) p *= r.dim;
  }
  return p;
}

int SystemLayout::quantum_dim() const {
  int p = 1;
  for (const auto& r : regs_) {
    if (r.kind == RegKind::quantum) p *= r.dim;
  }
  return p;
}

std::vector<int> SystemLayout::indices_of_kind(RegKind kind) const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i) {
    if (regs_[i].kind == kind) out.push_back(i);
  }
  return out;
}

int SystemLayout::flat_index(const std::vector<int>& digits) const {
  if (digits.size() != regs_.size()) {
    throw std::invalid_argument("flat_index: digit count mismatch");
  }
  int flat = 0;
  for (std::size_t i = 0; i < regs_.size(); ++i) {
    if (digits[i] < 0 || digits[i] >= regs_[i].dim) {
      throw std::invalid_argument("flat_index: digit out of range");
    }
    flat = flat * regs_[i].dim + digits[i];
  }
  return flat;
}

std::vector<int> SystemLayout::digits_of(int flat) const {
  if (flat < 0 || flat >= total_dim_) {
    throw std::invalid_argument("digits_of: index out of range");
  }
  std::vector<int> digits(regs_.size());
  for (int i = size() - 1; i >= 0; --i) {
    digits[i] = flat % regs_[i].dim;
    flat /= regs_[i].dim;
  }
  return digits;
}

int SystemLayout::sorted_index(int flat) const {
  std::vector<int> digits = digits_of(flat);
  int w = 0, q = 0;
  for (int i = 0; i < size(); ++i) {
    if (regs_[i].kind == RegKind::wire) {
      w = w * regs_[i].dim + digits[i];
    } else {
      q = q * regs_[i].dim + digits[i];
    }
  }
  return w * quantum_dim() + q;
}

int SystemLayout::unsorted_index(int wire_flat, int quantum_flat) const {
  std::vector<int> digits(regs_.size());
  for (int i = size() - 1; i >= 0; --i) {
    if (regs_[i].kind == RegKind::wire) {
      digits[i] = wire_flat % regs_[i].dim;
      wire_flat /= regs_[i].dim;
    } else {
      digits[i] = quantum_flat % regs_[i].dim;
      quantum_flat /= regs_[i].dim;
    }
  }
  if (wire_flat != 0 || quantum_flat != 0) {
    throw std::invalid_argument("unsorted_index: index out of range");
  }
  return flat_index(digits);
}

SystemLayout SystemLayout::with_appended(Register r) const {
  std::vector<Register> regs = regs_;
  regs.push_back(std::move(r));
  return SystemLayout(std::move(regs));
}

SystemLayout SystemLayout::without(const std::string& name) const {
  std::vector<Register> regs;
  bool found = false;
  for (const auto& r : regs_) {
    if (r.name == name) {
      found = true;
    } else {
      regs.push_back(r);
    }
  }
  if (!found) {
    throw std::invalid_argument("SystemLayout: no register named '" + name + "'");
  }
  return SystemLayout(std::move(regs));
}

SystemLayout SystemLayout::with_dim(const std::string& name, int new_dim) const {
  std::vector<Register> regs = regs_;
  regs[index_of(name)].dim = new_dim;
  return SystemLayout(std::move(regs));
}

SystemLayout SystemLayout::restricted_to(
    const std::vector<std::string>& names) const {
  std::set<std::string> wanted(names.begin(), names.end());
  if (wanted.size() != names.size()) {
    throw std::invalid_argument("restricted_to: duplicate names");
  }
  std::vector<Register> regs;
  for (const auto& r : regs_) {
    if (wanted.count(r.name)) {
      regs.push_back(r);
      wanted.erase(r.name);
    }
  }
  if (!wanted.empty()) {
    throw std::invalid_argument("restricted_to: unknown register '" +
                                *wanted.begin() + "'");
  }
  return SystemLayout(std::move(regs));
}

bool SystemLayout::same_registers(const SystemLayout& other) const {
  if (size() != other.size()) return false;
  for (int i = 0; i < size(); ++i) {
    if (regs_[i].name != other.regs_[i].name ||
        regs_[i].dim != other.regs_[i].dim ||
        regs_[i].kind != other.regs_[i].kind) {
      return false;
    }
  }
  return true;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const SystemLayout& layout,
                            const std::vector<std::string>& keep) {
  if (rho.dim() != layout.total_dim()) {
    throw std::invalid_argument("partial_trace: state/layout mismatch");
  }
  std::vector<int> keep_idx;
  keep_idx.reserve(keep.size());
  for (const auto& n : keep) keep_idx.push_back(layout.index_of(n));
  std::sort(keep_idx.begin(), keep_idx.end());
  return partial_trace(rho, layout.dims(), keep_idx);
}

ComplexMatrix dephase_raw(const ComplexMatrix& m, const SystemLayout& layout) {
  return dephase_raw(m, layout.dims(), layout.wire_flags());
}

DensityMatrix dephase(const DensityMatrix& rho, const SystemLayout& layout) {
  if (rho.dim() != layout.total_dim()) {
    throw std::invalid_argument("dephase: state/layout mismatch");
  }
  return DensityMatrix(dephase_raw(rho.matrix(), layout));
}

ComplexMatrix lift_operator(const ComplexMatrix& local,
                            const SystemLayout& in_layout,
                            const std::vector<int>& in_sel,
                            const SystemLayout& out_layout,
                            const std::vector<int>& out_sel) {
  // Identify the passthrough registers and check they match pairwise.
  std::vector<bool> in_selected(in_layout.size(), false);
  for (int i : in_sel) in_selected.at(i) = true;
  std::vector<bool> out_selected(out_layout.size(), false);
  for (int i : out_sel) out_selected.at(i) = true;

  std::vector<int> in_pass, out_pass;
  for (int i = 0; i < in_layout.size(); ++i) {
    if (!in_selected[i]) in_pass.push_back(i);
  }
  for (int i = 0; i < out_layout.size(); ++i) {
    if (!out_selected[i]) out_pass.push_back(i);
  }
  if (in_pass.size() != out_pass.size()) {
    throw std::invalid_argument("lift_operator: passthrough register mismatch");
  }
  int pass_dim = 1;
  for (std::size_t k = 0; k < in_pass.size(); ++k) {
    const Register& a = in_layout.reg(in_pass[k]);
    const Register& b = out_layout.reg(out_pass[k]);
    if (a.name != b.name || a.dim != b.dim) {
      throw std::invalid_argument(
          "lift_operator: passthrough registers disagree at '" + a.name + "'");
    }
    pass_dim *= a.dim;
  }

  int local_in = 1;
  std::vector<int> in_sel_dims;
  for (int i : in_sel) {
    in_sel_dims.push_back(in_layout.reg(i).dim);
    local_in *= in_layout.reg(i).dim;
  }
  int local_out = 1;
  std::vector<int> out_sel_dims;
  for (int i : out_sel) {
    out_sel_dims.push_back(out_layout.reg(i).dim);
    local_out *= out_layout.reg(i).dim;
  }
  if (local.rows() != local_out || local.cols() != local_in) {
    throw std::invalid_argument("lift_operator: local operator shape mismatch");
  }

  ComplexMatrix out =
      zero_matrix(out_layout.total_dim(), in_layout.total_dim());
  std::vector<int> in_digits(in_layout.size(), 0);
  std::vector<int> out_digits(out_layout.size(), 0);
  for (int p = 0; p < pass_dim; ++p) {
    // Decompose the passthrough combination into per-register digits.
    int rem = p;
    for (int k = static_cast<int>(in_pass.size()) - 1; k >= 0; --k) {
      int d = in_layout.reg(in_pass[k]).dim;
      int digit = rem % d;
      rem /= d;
      in_digits[in_pass[k]] = digit;
      out_digits[out_pass[k]] = digit;
    }
    for (int a = 0; a < local_out; ++a) {
      int rem_a = a;
      for (int k = static_cast<int>(out_sel.size()) - 1; k >= 0; --k) {
        out_digits[out_sel[k]] = rem_a % out_sel_dims[k];
        rem_a /= out_sel_dims[k];
      }
      int row = out_layout.flat_index(out_digits);
      for (int b = 0; b < local_in; ++b) {
        Complex v = local(a, b);
        if (v == Complex(0.0, 0.0)) continue;
        int rem_b = b;
        for (int k = static_cast<int>(in_sel.size()) - 1; k >= 0; --k) {
          in_digits[in_sel[k]] = rem_b % in_sel_dims[k];
          rem_b /= in_sel_dims[k];
        }
        out(row, in_layout.flat_index(in_digits)) = v;
      }
    }
  }
  return out;
}

ComplexMatrix sort_permutation(const SystemLayout& layout) {
  ComplexMatrix p = zero_matrix(layout.total_dim(), layout.total_dim());
  for (int f = 0; f < layout.total_dim(); ++f) {
    p(layout.sorted_index(f), f) = 1.0;
  }
  return p;
}

}  // namespace lop
