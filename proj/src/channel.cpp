#include "lop/channel.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lop {

namespace {

int product(const std::vector<int>& dims) {
  int p = 1;
  for (int d : dims) p *= d;
  return p;
}

// Decompose a flat row-major index into digits for the given dims.
std::vector<int> digits_of(int flat, const std::vector<int>& dims) {
  std::vector<int> digits(dims.size());
  for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
    digits[k] = flat % dims[k];
    flat /= dims[k];
  }
  return digits;
}

int flat_of(const std::vector<int>& digits, const std::vector<int>& dims) {
  int flat = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    flat = flat * dims[k] + digits[k];
  }
  return flat;
}

void check_factorization(int dim, const std::vector<int>& dims,
                         const char* where) {
  if (product(dims) != dim) {
    std::ostringstream os;
    os << where << ": factor dimensions do not multiply to the matrix dimension";
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

QuantumChannel::QuantumChannel(std::vector<ComplexMatrix> kraus)
    : kraus_(std::move(kraus)) {
  if (kraus_.empty()) {
    throw std::invalid_argument("QuantumChannel: needs at least one Kraus operator");
  }
  out_dim_ = static_cast<int>(kraus_[0].rows());
  in_dim_ = static_cast<int>(kraus_[0].cols());
  if (in_dim_ == 0 || out_dim_ == 0) {
    throw std::invalid_argument("QuantumChannel: empty Kraus operator");
  }
  for (const auto& k : kraus_) {
    if (k.rows() != out_dim_ || k.cols() != in_dim_) {
      throw std::invalid_argument("QuantumChannel: inconsistent Kraus shapes");
    }
  }
  ComplexMatrix sum = zero_matrix(in_dim_, in_dim_);
  for (const auto& k : kraus_) sum += k.adjoint() * k;
  defect_ = max_abs(sum - identity_matrix(in_dim_));
}

DensityMatrix apply_channel(const QuantumChannel& ch, const DensityMatrix& rho) {
  if (!ch.is_trace_preserving()) {
    std::ostringstream os;
    os << "apply_channel: channel is not trace preserving (defect "
       << ch.completeness_defect() << "); use apply_channel_raw";
    throw std::invalid_argument(os.str());
  }
  return DensityMatrix(apply_channel_raw(ch, rho.matrix()));
}

ComplexMatrix apply_channel_raw(const QuantumChannel& ch,
                                const ComplexMatrix& rho) {
  if (rho.rows() != ch.in_dim() || rho.cols() != ch.in_dim()) {
    throw std::invalid_argument("apply_channel: state dimension mismatch");
  }
  ComplexMatrix out = zero_matrix(ch.out_dim(), ch.out_dim());
  for (const auto& k : ch.kraus()) out += k * rho * k.adjoint();
  return out;
}

ComplexMatrix choi_of(const QuantumChannel& ch) {
  const int din = ch.in_dim();
  const int dout = ch.out_dim();
  ComplexMatrix c = zero_matrix(din * dout, din * dout);
  // C = sum_k |v_k><v_k| with v_k[(i,r)] = K_k(r, i): the fingerprint of the
  // map assembled column by column.
  for (const auto& k : ch.kraus()) {
    ComplexMatrix v(din * dout, 1);
    for (int i = 0; i < din; ++i) {
      for (int r = 0; r < dout; ++r) {
        v(i * dout + r, 0) = k(r, i);
      }
    }
    c += v * v.adjoint();
  }
  return c;
}

double choi_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  return max_abs_diff(a, b);
}

QuantumChannel compose(const QuantumChannel& second,
                       const QuantumChannel& first) {
  if (second.in_dim() != first.out_dim()) {
    throw std::invalid_argument("compose: dimension mismatch");
  }
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(static_cast<std::size_t>(second.kraus_count()) *
                first.kraus_count());
  for (const auto& s : second.kraus()) {
    for (const auto& f : first.kraus()) {
      kraus.push_back(s * f);
    }
  }
  return QuantumChannel(std::move(kraus));
}

QuantumChannel trace_out_channel(const QuantumChannel& ch,
                                 const std::vector<int>& dims,
                                 const std::vector<int>& keep) {
  check_factorization(ch.out_dim(), dims, "trace_out_channel");
  std::vector<bool> kept(dims.size(), false);
  for (int k : keep) kept.at(k) = true;
  std::vector<int> kept_dims, dropped_dims;
  for (std::size_t f = 0; f < dims.size(); ++f) {
    (kept[f] ? kept_dims : dropped_dims).push_back(dims[f]);
  }
  const int kept_dim = product(kept_dims);
  const int dropped_dim = product(dropped_dims);

  // Tracing out the dropped factors of the output space is the same as
  // measuring them in any fixed basis and forgetting the result; on Kraus
  // operators that is row selection per dropped basis value.
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(static_cast<std::size_t>(ch.kraus_count()) * dropped_dim);
  for (const auto& k : ch.kraus()) {
    for (int m = 0; m < dropped_dim; ++m) {
      std::vector<int> md = digits_of(m, dropped_dims);
      ComplexMatrix sub(kept_dim, ch.in_dim());
      for (int r = 0; r < kept_dim; ++r) {
        std::vector<int> rd = digits_of(r, kept_dims);
        std::vector<int> full(dims.size());
        int ik = 0, id = 0;
        for (std::size_t f = 0; f < dims.size(); ++f) {
          full[f] = kept[f] ? rd[ik++] : md[id++];
        }
        sub.row(r) = k.row(flat_of(full, dims));
      }
      kraus.push_back(std::move(sub));
    }
  }
  return QuantumChannel(std::move(kraus));
}

double entropy(const DensityMatrix& rho) {
  HermitianEigen eig = eigen_hermitian(rho.matrix());
  double s = 0.0;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    double p = eig.values[k];
    if (p > tol::eigenvalue_floor) s -= p * std::log2(p);
  }
  return s;
}

double relative_entropy(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("relative_entropy: dimension mismatch");
  }
  HermitianEigen ea = eigen_hermitian(a.matrix());
  HermitianEigen eb = eigen_hermitian(b.matrix());
  const Eigen::Index n = ea.values.size();

  // tr a log a
  double tr_a_log_a = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    double p = ea.values[k];
    if (p > tol::eigenvalue_floor) tr_a_log_a += p * std::log2(p);
  }

  // tr a log b, with a support check against the kernel of b.
  double tr_a_log_b = 0.0;
  for (Eigen::Index l = 0; l < n; ++l) {
    double q = eb.values[l];
    ComplexMatrix v = eb.vectors.col(l);
    double weight = ((v.adjoint() * a.matrix() * v)(0, 0)).real();
    if (q <= tol::eigenvalue_floor) {
      if (weight > tol::eigenvalue_floor) {
        return std::numeric_limits<double>::infinity();
      }
      continue;
    }
    tr_a_log_b += weight * std::log2(q);
  }
  return tr_a_log_a - tr_a_log_b;
}

ComplexMatrix partial_trace_raw(const ComplexMatrix& m,
                                const std::vector<int>& dims,
                                const std::vector<int>& keep) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("partial_trace: matrix not square");
  }
  check_factorization(static_cast<int>(m.rows()), dims, "partial_trace");
  std::vector<bool> kept(dims.size(), false);
  for (int k : keep) {
    if (k < 0 || k >= static_cast<int>(dims.size())) {
      throw std::invalid_argument("partial_trace: keep index out of range");
    }
    kept[k] = true;
  }
  std::vector<int> kept_dims, dropped_dims;
  for (std::size_t f = 0; f < dims.size(); ++f) {
    (kept[f] ? kept_dims : dropped_dims).push_back(dims[f]);
  }
  const int kept_dim = product(kept_dims);
  const int dropped_dim = product(dropped_dims);

  ComplexMatrix out = zero_matrix(kept_dim, kept_dim);
  for (int r = 0; r < kept_dim; ++r) {
    std::vector<int> rd = digits_of(r, kept_dims);
    for (int c = 0; c < kept_dim; ++c) {
      std::vector<int> cd = digits_of(c, kept_dims);
      Complex sum = 0.0;
      for (int t = 0; t < dropped_dim; ++t) {
        std::vector<int> td = digits_of(t, dropped_dims);
        std::vector<int> full_r(dims.size()), full_c(dims.size());
        int ik = 0, id = 0;
        for (std::size_t f = 0; f < dims.size(); ++f) {
          if (kept[f]) {
            full_r[f] = rd[ik];
            full_c[f] = cd[ik];
            ++ik;
          } else {
            full_r[f] = td[id];
            full_c[f] = td[id];
            ++id;
          }
        }
        sum += m(flat_of(full_r, dims), flat_of(full_c, dims));
      }
      out(r, c) = sum;
    }
  }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho,
                            const std::vector<int>& dims,
                            const std::vector<int>& keep) {
  return DensityMatrix(partial_trace_raw(rho.matrix(), dims, keep));
}

ComplexMatrix dephase_raw(const ComplexMatrix& m, const std::vector<int>& dims,
                          const std::vector<bool>& is_wire) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("dephase: matrix not square");
  }
  check_factorization(static_cast<int>(m.rows()), dims, "dephase");
  if (is_wire.size() != dims.size()) {
    throw std::invalid_argument("dephase: flag count mismatch");
  }
  ComplexMatrix out = m;
  const int n = static_cast<int>(m.rows());
  for (int r = 0; r < n; ++r) {
    std::vector<int> rd = digits_of(r, dims);
    for (int c = 0; c < n; ++c) {
      std::vector<int> cd = digits_of(c, dims);
      for (std::size_t f = 0; f < dims.size(); ++f) {
        if (is_wire[f] && rd[f] != cd[f]) {
          out(r, c) = 0.0;
          break;
        }
      }
    }
  }
  return out;
}

}  // namespace lop
