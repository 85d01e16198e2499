#include "lop/counterexample.hpp"

#include "lop/classify.hpp"
#include "lop/factories.hpp"
#include "lop/protocol.hpp"

#include <cmath>
#include <stdexcept>

namespace lop {
namespace {

constexpr double kEntryCutoff = 1e-12;

ComplexMatrix from_rows(std::initializer_list<std::initializer_list<double>>
                            rows) {
  const int n = static_cast<int>(rows.size());
  ComplexMatrix m = zero_matrix(n, n);
  int r = 0;
  for (const auto& row : rows) {
    int c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

}  // namespace

QuantumChannel build_counterexample() {
  std::vector<ComplexMatrix> kraus;
  kraus.push_back(from_rows({{0.5, -0.5, 0.0},  //
                             {0.0, 0.0, 0.5},
                             {0.0, 0.0, 0.0}}));
  kraus.push_back(from_rows({{0.5, 0.0, -0.5},  //
                             {0.0, 0.5, 0.0},
                             {0.0, 0.0, 0.0}}));
  kraus.push_back(from_rows({{0.0, 0.5, -0.5},  //
                             {0.5, 0.0, 0.0},
                             {0.0, 0.0, 0.0}}));
  kraus.push_back(from_rows({{0.5, 0.5, 0.5},  //
                             {0.0, 0.0, 0.0},
                             {0.0, 0.0, 0.0}}));
  return QuantumChannel(std::move(kraus));
}

ObstructionCertificate certify_not_lop(const QuantumChannel& ch) {
  ObstructionCertificate cert;
  cert.cptp_ok = ch.is_trace_preserving(1e-12);

  const SystemLayout wire({{"w", ch.in_dim(), RegKind::wire}});
  cert.iqo_ok = true;
  for (const ComplexMatrix& k : ch.kraus())
    cert.iqo_ok = cert.iqo_ok && is_iqo_kraus(k, wire);

  // Rank of the last operator's Gram matrix: count of eigenvalues above the
  // cutoff, relative to the largest.
  {
    const ComplexMatrix& last = ch.kraus().back();
    const HermitianEigen eig = eigen_hermitian(dagger(last) * last);
    double top = 0.0;
    for (int i = 0; i < eig.values.size(); ++i)
      top = std::max(top, eig.values[i]);
    int rank = 0;
    for (int i = 0; i < eig.values.size(); ++i)
      if (eig.values[i] > 1e-10 * std::max(top, 1.0)) ++rank;
    cert.k4_rank_one = (rank == 1);
  }

  // A combination a*K_s + b*K_s' (a, b nonzero) stays basis-aligned only if
  // every column keeps a single nonzero row. Entries of the two operators
  // in distinct rows of one column cannot cancel, so finding such a column
  // rules every nontrivial combination out.
  const int m = ch.kraus_count();
  bool all_rigid = true;
  for (int s = 0; s < m; ++s) {
    for (int t = s + 1; t < m; ++t) {
      const ComplexMatrix& a = ch.kraus()[s];
      const ComplexMatrix& b = ch.kraus()[t];
      bool rigid = false;
      for (int c = 0; c < a.cols() && !rigid; ++c) {
        for (int ra = 0; ra < a.rows() && !rigid; ++ra) {
          if (std::abs(a(ra, c)) <= kEntryCutoff) continue;
          for (int rb = 0; rb < b.rows() && !rigid; ++rb) {
            if (rb == ra) continue;
            rigid = std::abs(b(rb, c)) > kEntryCutoff;
          }
        }
      }
      cert.pairwise_rigidity.push_back({s + 1, t + 1, rigid});
      all_rigid = all_rigid && rigid;
    }
  }

  cert.verdict =
      cert.cptp_ok && cert.iqo_ok && cert.k4_rank_one && all_rigid;
  return cert;
}

double stochastic_rate_check(const QuantumChannel& ch,
                             const DensityMatrix& rho) {
  const int d = 3;
  if (ch.in_dim() % d != 0)
    throw std::invalid_argument(
        "stochastic_rate_check: channel dimension is not a multiple of 3");
  const SystemLayout layout = iqo_layout(ch, d);
  if (rho.dim() != layout.total_dim())
    throw std::invalid_argument(
        "stochastic_rate_check: state does not match the channel");
  const ProtocolTree tree = iqo_stochastic(ch, d);
  const BranchReport report = execute_all_branches(tree, rho, layout);
  double success = 0.0;
  for (const OutcomePath& branch : report.branches)
    if (!branch.outcomes.empty() && branch.outcomes.back() == 0)
      success += branch.probability;
  return success;
}

double stochastic_rate_check(const QuantumChannel& ch) {
  const int dim = ch.in_dim();
  return stochastic_rate_check(
      ch, DensityMatrix(identity_matrix(dim) / static_cast<double>(dim)));
}

}  // namespace lop
