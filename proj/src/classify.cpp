#include "lop/classify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lop {

namespace {

// Reorders `k` so both sides factor as wire (x) quantum, then returns the
// quantum-space block for each (wire row, wire column) pair on demand.
struct SortedBlocks {
  ComplexMatrix sorted;
  int wire_in = 0, wire_out = 0;
  int q_in = 0, q_out = 0;

  SortedBlocks(const ComplexMatrix& k, const SystemLayout& in_layout,
               const SystemLayout& out_layout) {
    if (k.cols() != in_layout.total_dim() ||
        k.rows() != out_layout.total_dim()) {
      throw std::invalid_argument(
          "kraus_wire_pattern: operator shape does not match the layouts");
    }
    wire_in = in_layout.wire_dim();
    wire_out = out_layout.wire_dim();
    q_in = in_layout.quantum_dim();
    q_out = out_layout.quantum_dim();
    sorted = sort_permutation(out_layout) * k *
             dagger(sort_permutation(in_layout));
  }

  ComplexMatrix block(int wr, int wc) const {
    return sorted.block(wr * q_out, wc * q_in, q_out, q_in);
  }
};

// True when the merged entry is consistent; records f(i) into `merged`.
bool merge_pattern_entry(std::vector<std::optional<int>>& merged, int i,
                         int value) {
  if (merged[i].has_value()) return *merged[i] == value;
  merged[i] = value;
  return true;
}

bool injective_pattern(const WirePattern& p) {
  std::vector<bool> used;
  for (const auto& v : p) {
    if (!v.has_value()) continue;
    if (*v >= static_cast<int>(used.size())) used.resize(*v + 1, false);
    if (used[*v]) return false;
    used[*v] = true;
  }
  return true;
}

}  // namespace

std::optional<WirePattern> kraus_wire_pattern(const ComplexMatrix& k,
                                              const SystemLayout& in_layout,
                                              const SystemLayout& out_layout,
                                              double threshold) {
  SortedBlocks s(k, in_layout, out_layout);
  WirePattern pattern(s.wire_in);
  for (int wc = 0; wc < s.wire_in; ++wc) {
    for (int wr = 0; wr < s.wire_out; ++wr) {
      if (max_abs(s.block(wr, wc)) <= threshold) continue;
      if (pattern[wc].has_value()) return std::nullopt;
      pattern[wc] = wr;
    }
  }
  return pattern;
}

std::optional<WireBlockDecomposition> wire_block_decompose(
    const ComplexMatrix& k, const SystemLayout& in_layout,
    const SystemLayout& out_layout, double threshold) {
  SortedBlocks s(k, in_layout, out_layout);
  WireBlockDecomposition d;
  d.pattern.assign(s.wire_in, std::nullopt);
  d.blocks.assign(s.wire_in, zero_matrix(s.q_out, s.q_in));
  for (int wc = 0; wc < s.wire_in; ++wc) {
    for (int wr = 0; wr < s.wire_out; ++wr) {
      ComplexMatrix b = s.block(wr, wc);
      if (max_abs(b) <= threshold) continue;
      if (d.pattern[wc].has_value()) return std::nullopt;
      d.pattern[wc] = wr;
      d.blocks[wc] = std::move(b);
    }
  }
  return d;
}

bool is_iqo_kraus(const ComplexMatrix& k, const SystemLayout& layout,
                  double threshold) {
  return kraus_wire_pattern(k, layout, layout, threshold).has_value();
}

ChannelClass classify_channel(const QuantumChannel& ch,
                              const SystemLayout& layout, double threshold) {
  ChannelClass result;
  std::vector<WirePattern> patterns;
  patterns.reserve(ch.kraus().size());
  for (const auto& k : ch.kraus()) {
    auto p = kraus_wire_pattern(k, layout, layout, threshold);
    if (!p.has_value()) return result;  // not even iqo
    patterns.push_back(std::move(*p));
  }
  result.iqo = true;

  for (const auto& p : patterns) {
    if (!injective_pattern(p)) return result;
  }
  result.sio = true;

  std::vector<std::optional<int>> merged(layout.wire_dim());
  for (const auto& p : patterns) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i].has_value() &&
          !merge_pattern_entry(merged, static_cast<int>(i), *p[i])) {
        return result;
      }
    }
  }
  result.pio = injective_pattern(merged);
  return result;
}

double wire_offdiagonal_weight(const ComplexMatrix& m,
                               const SystemLayout& layout) {
  if (m.rows() != layout.total_dim() || m.cols() != layout.total_dim()) {
    throw std::invalid_argument(
        "wire_offdiagonal_weight: shape does not match the layout");
  }
  int qd = layout.quantum_dim();
  double worst = 0.0;
  for (int r = 0; r < m.rows(); ++r) {
    int wr = layout.sorted_index(r) / qd;
    for (int c = 0; c < m.cols(); ++c) {
      int wc = layout.sorted_index(c) / qd;
      if (wr == wc) continue;
      worst = std::max(worst, std::abs(m(r, c)));
    }
  }
  return worst;
}

ComplexMatrix partial_transpose(const ComplexMatrix& m,
                                const std::vector<int>& dims,
                                const std::vector<bool>& transposed) {
  int total = 1;
  for (int d : dims) total *= d;
  if (m.rows() != total || m.cols() != total ||
      dims.size() != transposed.size()) {
    throw std::invalid_argument("partial_transpose: shape mismatch");
  }
  auto digits = [&](int flat) {
    std::vector<int> v(dims.size());
    for (int i = static_cast<int>(dims.size()) - 1; i >= 0; --i) {
      v[i] = flat % dims[i];
      flat /= dims[i];
    }
    return v;
  };
  auto flat = [&](const std::vector<int>& v) {
    int f = 0;
    for (std::size_t i = 0; i < dims.size(); ++i) f = f * dims[i] + v[i];
    return f;
  };
  ComplexMatrix out(total, total);
  for (int r = 0; r < total; ++r) {
    std::vector<int> rd = digits(r);
    for (int c = 0; c < total; ++c) {
      std::vector<int> cd = digits(c);
      std::vector<int> nr = rd, nc = cd;
      for (std::size_t i = 0; i < dims.size(); ++i) {
        if (transposed[i]) std::swap(nr[i], nc[i]);
      }
      out(flat(nr), flat(nc)) = m(r, c);
    }
  }
  return out;
}

bool is_cq_state(const DensityMatrix& rho, const SystemLayout& layout,
                 bool check_separability, double tolerance) {
  if (rho.dim() != layout.total_dim()) {
    throw std::invalid_argument("is_cq_state: state/layout mismatch");
  }
  if (wire_offdiagonal_weight(rho.matrix(), layout) > tolerance) return false;

  std::vector<int> q_regs = layout.indices_of_kind(RegKind::quantum);
  if (!check_separability || q_regs.size() < 2) return true;

  std::vector<int> q_dims;
  for (int i : q_regs) q_dims.push_back(layout.reg(i).dim);
  int qd = layout.quantum_dim();
  ComplexMatrix sorted = sort_permutation(layout) * rho.matrix() *
                         dagger(sort_permutation(layout));

  for (int m = 0; m < layout.wire_dim(); ++m) {
    ComplexMatrix block = sorted.block(m * qd, m * qd, qd, qd);
    double weight = block.trace().real();
    if (weight < tol::eigenvalue_floor) continue;
    block /= weight;
    // Positive partial transpose across every bipartition of the quantum
    // registers (seen once each: the subset containing register 0).
    int n = static_cast<int>(q_regs.size());
    for (int mask = 1; mask < (1 << n) - 1; ++mask) {
      if (!(mask & 1)) continue;
      std::vector<bool> flags(n);
      for (int i = 0; i < n; ++i) flags[i] = (mask >> i) & 1;
      ComplexMatrix pt = partial_transpose(block, q_dims, flags);
      HermitianEigen eig = eigen_hermitian((pt + dagger(pt)) / 2.0);
      if (eig.values.minCoeff() < -tolerance) return false;
    }
  }
  return true;
}

}  // namespace lop
