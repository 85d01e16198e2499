#include "lop/random_objects.hpp"

#include "lop/elemental.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lop {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

ComplexMatrix gaussian_matrix(Rng& rng, int rows, int cols) {
  ComplexMatrix g(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) g(r, c) = rng.complex_gaussian();
  }
  return g;
}

// Fisher-Yates with our own stream; std::shuffle would tie results to the
// standard library's implementation.
void shuffle_ints(std::vector<int>& v, Rng& rng) {
  for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
    std::swap(v[i], v[rng.uniform_int(i + 1)]);
  }
}

}  // namespace

DensityMatrix random_density(Rng& rng, int dim) {
  const ComplexMatrix g = gaussian_matrix(rng, dim, dim);
  ComplexMatrix m = g * dagger(g);
  m /= m.trace();
  return DensityMatrix(std::move(m));
}

ComplexMatrix random_pure_ket(Rng& rng, int dim) {
  ComplexMatrix v = gaussian_matrix(rng, dim, 1);
  v /= v.norm();
  return v;
}

QuantumChannel random_cptp(Rng& rng, int dim_in, int dim_out,
                           int kraus_count) {
  if (kraus_count * dim_out < dim_in) {
    throw std::invalid_argument(
        "random_cptp: kraus_count * dim_out must cover dim_in");
  }
  const ComplexMatrix v = haar_isometry(kraus_count * dim_out, dim_in, rng);
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(kraus_count);
  for (int j = 0; j < kraus_count; ++j) {
    kraus.push_back(v.block(j * dim_out, 0, dim_out, dim_in));
  }
  return QuantumChannel(std::move(kraus));
}

// Basis-aligned Kraus sets are parametrized by label maps f_a plus one
// amplitude per (a, defined input label). Writing w_i for the vector of
// amplitudes feeding input label i, grouped by the label-collision classes
// of the f_a, the completeness condition sum_a K_a^dag K_a = 1 is exactly
// orthonormality of the w_i. So: draw the label maps first, then
// orthonormalize random amplitude rows inside their allowed supports.
std::vector<ComplexMatrix> random_iqo_kraus(Rng& rng, int dim,
                                            int kraus_count) {
  if (dim < 1 || kraus_count < dim) {
    throw std::invalid_argument(
        "random_iqo_kraus: need kraus_count >= dim >= 1");
  }
  const int m = kraus_count;
  std::vector<std::vector<int>> f(m, std::vector<int>(dim, -1));
  for (int a = 0; a < m; ++a) {
    if (rng.uniform() < 0.5) {
      f[a] = random_permutation(dim, rng);
    } else {
      for (int i = 0; i < dim; ++i) f[a][i] = rng.uniform_int(dim);
    }
  }
  // Random partiality, keeping every input label fed by at least dim maps
  // so the orthonormalization below cannot run out of room.
  std::vector<int> cover(dim, m);
  for (int a = 0; a < m; ++a) {
    for (int i = 0; i < dim; ++i) {
      if (cover[i] > dim && rng.uniform() < 0.2) {
        f[a][i] = -1;
        --cover[i];
      }
    }
  }
  // One column per label-collision class of each map.
  std::vector<std::vector<int>> col_of(m, std::vector<int>(dim, -1));
  int cols = 0;
  for (int a = 0; a < m; ++a) {
    std::map<int, int> cls;
    for (int i = 0; i < dim; ++i) {
      if (f[a][i] < 0) continue;
      const auto [it, fresh] = cls.try_emplace(f[a][i], cols);
      if (fresh) ++cols;
      col_of[a][i] = it->second;
    }
  }
  // Row i of X lives on the columns of the classes containing label i; the
  // rows must come out orthonormal. Each new row is drawn inside its own
  // support and projected off the earlier rows' restrictions, which is
  // always possible because the support has >= dim columns.
  ComplexMatrix x = zero_matrix(dim, cols);
  for (int i = 0; i < dim; ++i) {
    std::vector<int> sup;
    for (int a = 0; a < m; ++a) {
      if (col_of[a][i] >= 0) sup.push_back(col_of[a][i]);
    }
    const int s = static_cast<int>(sup.size());
    std::vector<ComplexMatrix> basis;
    for (int j = 0; j < i; ++j) {
      ComplexMatrix r = zero_matrix(s, 1);
      for (int t = 0; t < s; ++t) r(t, 0) = x(j, sup[t]);
      for (const ComplexMatrix& q : basis) r -= (dagger(q) * r)(0, 0) * q;
      if (r.norm() > 1e-12) basis.push_back(r / r.norm());
    }
    ComplexMatrix v;
    double nrm = 0.0;
    do {
      v = gaussian_matrix(rng, s, 1);
      for (const ComplexMatrix& q : basis) v -= (dagger(q) * v)(0, 0) * q;
      nrm = v.norm();
    } while (nrm < 1e-6);
    v /= nrm;
    for (int t = 0; t < s; ++t) x(i, sup[t]) = v(t, 0);
  }
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(m);
  for (int a = 0; a < m; ++a) {
    ComplexMatrix k = zero_matrix(dim, dim);
    for (int i = 0; i < dim; ++i) {
      if (f[a][i] >= 0) k(f[a][i], i) = std::conj(x(i, col_of[a][i]));
    }
    kraus.push_back(std::move(k));
  }
  return kraus;
}

namespace {

struct SamplerConfig {
  int max_outcomes = 3;
  int max_total_dim = 72;
  bool bipartite = false;
};

class OpSampler {
 public:
  OpSampler(Rng& rng, const SamplerConfig& cfg) : rng_(rng), cfg_(cfg) {}

  ElementalOp sample(const SystemLayout& l) {
    for (int attempt = 0; attempt < 8; ++attempt) {
      std::optional<ElementalOp> op;
      switch (rng_.uniform_int(6)) {
        case 0: op = permutation(l); break;
        case 1: op = phase(l); break;
        case 2:
        case 3: op = observed(l); break;
        case 4: op = forward(l); break;
        case 5: op = prepare(l); break;
      }
      if (op) return std::move(*op);
    }
    // A one-outcome instrument on nothing: always applicable.
    return ElementalOp::observed_instrument({}, {identity_matrix(1)},
                                            fresh(l, "r"));
  }

 private:
  std::string fresh(const SystemLayout& l, const std::string& stem) {
    std::string name;
    do {
      name = stem + std::to_string(counter_++);
    } while (l.has(name));
    return name;
  }

  std::string fresh_quantum(const SystemLayout& l, int party,
                            const std::string& stem) {
    if (!cfg_.bipartite) return fresh(l, stem);
    std::string name;
    do {
      name = "q" + std::to_string(party) + "_" + stem +
             std::to_string(counter_++);
    } while (l.has(name));
    return name;
  }

  std::vector<int> wire_positions(const SystemLayout& l) const {
    std::vector<int> out;
    for (int i = 0; i < l.size(); ++i) {
      if (l.reg(i).kind == RegKind::wire) out.push_back(i);
    }
    return out;
  }

  // 1-2 wire registers with a joint dimension small enough to tabulate.
  std::optional<std::vector<std::string>> wire_subset(const SystemLayout& l) {
    std::vector<int> ws = wire_positions(l);
    if (ws.empty()) return std::nullopt;
    shuffle_ints(ws, rng_);
    const int want =
        1 + (static_cast<int>(ws.size()) > 1 ? rng_.uniform_int(2) : 0);
    std::vector<std::string> names;
    int joint = 1;
    for (int t = 0; t < want; ++t) {
      const Register& r = l.reg(ws[t]);
      if (joint * r.dim > 24) break;
      joint *= r.dim;
      names.push_back(r.name);
    }
    if (names.empty()) return std::nullopt;
    return names;
  }

  int joint_dim(const SystemLayout& l,
                const std::vector<std::string>& names) const {
    int joint = 1;
    for (const std::string& n : names) joint *= l.reg(l.index_of(n)).dim;
    return joint;
  }

  std::optional<ElementalOp> permutation(const SystemLayout& l) {
    auto names = wire_subset(l);
    if (!names) return std::nullopt;
    return ElementalOp::wire_permutation(
        *names, random_permutation(joint_dim(l, *names), rng_));
  }

  std::optional<ElementalOp> phase(const SystemLayout& l) {
    auto names = wire_subset(l);
    if (!names) return std::nullopt;
    std::vector<double> angles(joint_dim(l, *names));
    for (double& a : angles) a = kTau * rng_.uniform();
    return ElementalOp::wire_phase(*names, std::move(angles));
  }

  std::optional<ElementalOp> forward(const SystemLayout& l) {
    std::vector<int> ws = wire_positions(l);
    if (ws.empty()) return std::nullopt;
    const Register& src =
        l.reg(ws[rng_.uniform_int(static_cast<int>(ws.size()))]);
    const int party = 1 + rng_.uniform_int(2);
    return ElementalOp::forward_wire(src.name, fresh_quantum(l, party, "f"));
  }

  std::optional<ElementalOp> prepare(const SystemLayout& l) {
    const int dim = 2 + rng_.uniform_int(2);
    if (l.total_dim() * dim > cfg_.max_total_dim) return std::nullopt;
    return ElementalOp::prepare_wire(fresh(l, "p"), dim);
  }

  std::optional<ElementalOp> observed(const SystemLayout& l) {
    const int party = 1 + rng_.uniform_int(2);
    std::vector<int> qs;
    for (int i = 0; i < l.size(); ++i) {
      const Register& r = l.reg(i);
      if (r.kind != RegKind::quantum) continue;
      if (cfg_.bipartite &&
          r.name.rfind("q" + std::to_string(party) + "_", 0) != 0) {
        continue;
      }
      qs.push_back(i);
    }
    shuffle_ints(qs, rng_);
    const int nregs =
        std::min<int>(rng_.uniform_int(3), static_cast<int>(qs.size()));
    std::vector<std::string> regs;
    int din = 1;
    for (int t = 0; t < nregs; ++t) {
      regs.push_back(l.reg(qs[t]).name);
      din *= l.reg(qs[t]).dim;
    }
    std::vector<int> out_dims;
    int dout_regs = din;
    if (!regs.empty() && rng_.uniform() < 0.3) {
      dout_regs = 1;
      for (std::size_t t = 0; t < regs.size(); ++t) {
        out_dims.push_back(1 + rng_.uniform_int(3));
        dout_regs *= out_dims.back();
      }
    }
    std::vector<Register> created;
    if (rng_.uniform() < 0.25) {
      created.push_back({fresh_quantum(l, party, "c"), 2, RegKind::quantum});
    }
    int dout = dout_regs;
    for (const Register& r : created) dout *= r.dim;
    int m = 1 + rng_.uniform_int(cfg_.max_outcomes);
    if (m * dout < din) m = (din + dout - 1) / dout;
    int record_dim = 0;
    if (rng_.uniform() < 0.2) record_dim = m + 1 + rng_.uniform_int(2);
    const int actual_record = record_dim ? record_dim : m;
    const long grown =
        static_cast<long>(l.total_dim()) / din * dout * actual_record;
    if (grown > cfg_.max_total_dim) return std::nullopt;
    const ComplexMatrix v = haar_isometry(m * dout, din, rng_);
    std::vector<ComplexMatrix> kraus;
    kraus.reserve(m);
    for (int j = 0; j < m; ++j) {
      kraus.push_back(v.block(j * dout, 0, dout, din));
    }
    return ElementalOp::observed_instrument(std::move(regs), std::move(kraus),
                                            fresh(l, "r"), record_dim,
                                            std::move(out_dims),
                                            std::move(created));
  }

  Rng& rng_;
  SamplerConfig cfg_;
  int counter_ = 0;
};

class TreeBuilder {
 public:
  TreeBuilder(Rng& rng, const RandomTreeConfig& cfg)
      : rng_(rng),
        cfg_(cfg),
        sampler_(rng, SamplerConfig{cfg.max_outcomes, cfg.max_total_dim,
                                    cfg.bipartite}) {}

  RandomProtocol build() {
    std::vector<Register> regs;
    const int wires = 1 + rng_.uniform_int(2);
    for (int i = 0; i < wires; ++i) {
      regs.push_back({"w" + std::to_string(i),
                      2 + rng_.uniform_int(cfg_.max_wire_dim - 1),
                      RegKind::wire});
    }
    if (cfg_.bipartite) {
      regs.push_back({"q1_a0", 2, RegKind::quantum});
      regs.push_back({"q2_a1", 2, RegKind::quantum});
    } else {
      const int quanta = rng_.uniform_int(3);
      for (int i = 0; i < quanta; ++i) {
        regs.push_back({"a" + std::to_string(i), 2 + rng_.uniform_int(2),
                        RegKind::quantum});
      }
    }
    // Trim until the starting point leaves room to grow.
    SystemLayout layout{regs};
    while (layout.total_dim() * 2 > cfg_.max_total_dim && regs.size() > 1) {
      regs.pop_back();
      layout = SystemLayout{regs};
    }
    RandomProtocol out;
    out.layout = layout;
    out.tree = grow(layout, 1 + rng_.uniform_int(cfg_.max_depth));
    return out;
  }

 private:
  ProtocolTree grow(const SystemLayout& l, int depth) {
    if (depth <= 0) return ProtocolTree::leaf();
    ElementalOp op = sampler_.sample(l);
    const detail::LocalAction act = detail::local_action(op, l);
    const int m = op.outcome_count();
    if (m == 1 || cfg_.uniform) {
      return ProtocolTree::step_uniform(std::move(op),
                                        grow(act.layout_after, depth - 1));
    }
    std::vector<ProtocolTree> children;
    children.reserve(m);
    for (int j = 0; j < m; ++j) {
      children.push_back(grow(act.layout_after, depth - 1));
    }
    return ProtocolTree::step(std::move(op), std::move(children));
  }

  Rng& rng_;
  RandomTreeConfig cfg_;
  OpSampler sampler_;
};

}  // namespace

RandomProtocol random_protocol(Rng& rng, const RandomTreeConfig& config) {
  return TreeBuilder(rng, config).build();
}

ElementalOp random_elemental(Rng& rng, const SystemLayout& layout,
                             int max_total_dim) {
  SamplerConfig cfg;
  cfg.max_total_dim = max_total_dim;
  OpSampler sampler(rng, cfg);
  return sampler.sample(layout);
}

}  // namespace lop
