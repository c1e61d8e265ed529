#include "qpstrip/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace qps {

SubspaceFrame::SubspaceFrame(const CMat& spanning) : n_(static_cast<int>(spanning.rows())) {
  if (spanning.cols() == 0) {
    q_ = CMat(n_, 0);
    return;
  }
  if (spanning.cols() > spanning.rows()) throw DomainError("frame has more columns than ambient dimension");
  Eigen::JacobiSVD<CMat> svd(spanning, Eigen::ComputeThinU);
  const RVec& s = svd.singularValues();
  if (!(s(s.size() - 1) > kRankTol * s(0))) throw DomainError("rank-deficient frame");
  q_ = svd.matrixU();
}

SubspaceFrame SubspaceFrame::empty(int ambient) {
  SubspaceFrame f;
  f.n_ = ambient;
  f.q_ = CMat(ambient, 0);
  return f;
}

SubspaceFrame SubspaceFrame::from_orthonormal(CMat q) {
  SubspaceFrame f;
  f.n_ = static_cast<int>(q.rows());
  f.q_ = std::move(q);
  return f;
}

std::vector<double> principal_angles(const SubspaceFrame& a, const SubspaceFrame& b) {
  if (a.ambient() != b.ambient()) throw DomainError("principal_angles: dimension mismatch");
  std::vector<double> out;
  if (a.rank() == 0 || b.rank() == 0) return out;
  // the smaller frame is projected onto the larger one
  const CMat& big = a.rank() >= b.rank() ? a.basis() : b.basis();
  const CMat& small = a.rank() >= b.rank() ? b.basis() : a.basis();
  const int k = static_cast<int>(small.cols());
  CMat m = big.adjoint() * small;
  RVec cosines = Eigen::JacobiSVD<CMat>(m).singularValues();          // descending
  RVec sines = Eigen::JacobiSVD<CMat>(small - big * m).singularValues();  // descending
  // pair the i-th largest cosine with the i-th smallest sine; atan2 is accurate at both ends
  for (int i = 0; i < k; ++i) out.push_back(std::atan2(sines(k - 1 - i), cosines(i)));
  std::sort(out.begin(), out.end());
  return out;
}

double subspace_distance(const SubspaceFrame& a, const SubspaceFrame& b) {
  if (a.ambient() != b.ambient()) throw DomainError("subspace_distance: dimension mismatch");
  return spectral_norm(a.projector() - b.projector());
}

SubspaceFrame intersect(const SubspaceFrame& a, const SubspaceFrame& b, double tol) {
  int n = a.ambient();
  if (a.rank() == 0 || b.rank() == 0) return SubspaceFrame::empty(n);
  CMat m(n, a.rank() + b.rank());
  m << a.basis(), -b.basis();
  Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeFullV);
  const RVec& s = svd.singularValues();
  int cols = static_cast<int>(m.cols());
  int k = 0;
  // singular values are sorted descending; count the trailing small ones
  for (int i = static_cast<int>(s.size()) - 1; i >= 0 && s(i) < tol; --i) ++k;
  k += std::max(0, cols - static_cast<int>(s.size()));
  if (k == 0) return SubspaceFrame::empty(n);
  CMat v = svd.matrixV().rightCols(k);
  return SubspaceFrame(a.basis() * v.topRows(a.rank()));
}

double spectral_norm(const CMat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMat> svd(a);
  return svd.singularValues()(0);
}

double smallest_singular(const CMat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMat> svd(a);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

int bandwidth(const CMat& h, double tol) {
  int n = static_cast<int>(h.rows());
  int bw = 0;
  for (int j = 0; j < h.cols(); ++j)
    for (int i = 0; i < n; ++i)
      if (std::abs(h(i, j)) > tol) bw = std::max(bw, std::abs(i - j));
  return bw;
}

bool is_hermitian(const CMat& h, double tol) {
  if (h.rows() != h.cols()) return false;
  double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  return (h - h.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

CVec solve_shifted(const CMat& h, cplx z, const CVec& rhs) {
  CMat r = rhs;
  return solve_shifted(h, z, r).col(0);
}

CMat solve_shifted(const CMat& h, cplx z, const CMat& rhs) {
  int n = static_cast<int>(h.rows());
  if (h.cols() != n || rhs.rows() != n) throw DomainError("solve_shifted: dimension mismatch");
  double scale = std::max(1.0, h.cwiseAbs().maxCoeff() + std::abs(z));
  int bw = bandwidth(h);
  CMat x;
  if (bw <= kBandLimit) {
    BandedLU lu(n, bw, bw, [&](int i, int j) { return i == j ? h(i, j) - z : h(i, j); });
    x = lu.solve(rhs);
  } else {
    CMat a = h;
    a.diagonal().array() -= z;
    Eigen::PartialPivLU<CMat> lu(a);
    if (!(std::abs(lu.determinant()) > 0.0)) throw DomainError("singular shift");
    x = lu.solve(rhs);
  }
  if (!x.allFinite() || x.norm() > 1e14 * std::max(rhs.norm(), 1e-300) / scale) throw DomainError("singular shift");
  // one step of iterative refinement keeps the residual at the 1e-12 level
  CMat res = rhs - (h * x - z * x);
  double rn = res.norm(), bn = rhs.norm();
  if (rn > 1e-13 * scale * std::max(bn, 1e-300)) {
    CMat dx;
    if (bw <= kBandLimit) {
      BandedLU lu(n, bw, bw, [&](int i, int j) { return i == j ? h(i, j) - z : h(i, j); });
      dx = lu.solve(res);
    } else {
      CMat a = h;
      a.diagonal().array() -= z;
      dx = a.partialPivLu().solve(res);
    }
    x += dx;
  }
  return x;
}

int band_count_below(const std::vector<CVec>& band, double E) {
  // LDL* without pivoting on (h - E); the count of negative pivots is the inertia.
  const int n = static_cast<int>(band[0].size());
  const int k = static_cast<int>(band.size()) - 1;
  double scale = 1.0;
  for (const auto& b : band) scale = std::max(scale, b.cwiseAbs().maxCoeff());
  scale += std::abs(E);
  const double tiny = 1e-300 + 1e-15 * scale;
  // l(i, j) for i - k <= j < i stored as l[i * k + (i - j - 1)]
  std::vector<cplx> l(static_cast<size_t>(n) * std::max(k, 1), cplx(0.0));
  std::vector<double> d(n);
  int count = 0;
  for (int j = 0; j < n; ++j) {
    double dj = band[0](j).real() - E;
    for (int p = std::max(0, j - k); p < j; ++p) dj -= std::norm(l[static_cast<size_t>(j) * k + (j - p - 1)]) * d[p];
    if (std::abs(dj) < tiny) dj = tiny;
    d[j] = dj;
    if (dj < 0) ++count;
    for (int i = j + 1; i <= std::min(n - 1, j + k); ++i) {
      // a_ij for i > j is conj(a_ji) = conj(band[i-j](j))
      cplx s = std::conj(band[i - j](j));
      for (int p = std::max(0, i - k); p < j; ++p)
        s -= l[static_cast<size_t>(i) * k + (i - p - 1)] * std::conj(l[static_cast<size_t>(j) * k + (j - p - 1)]) * d[p];
      l[static_cast<size_t>(i) * k + (i - j - 1)] = s / dj;
    }
  }
  return count;
}

int eig_count_below(const CMat& h, double E) {
  if (!is_hermitian(h, 1e-12)) throw DomainError("eig_count_below: non-Hermitian input");
  const int n = static_cast<int>(h.rows());
  int bw = bandwidth(h);
  if (bw <= kBandLimit) {
    std::vector<CVec> band(bw + 1, CVec::Zero(n));
    for (int j = 0; j <= bw; ++j)
      for (int i = 0; i + j < n; ++i) band[j](i) = h(i, i + j);
    return band_count_below(band, E);
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
  const RVec& ev = es.eigenvalues();
  return static_cast<int>(std::count_if(ev.data(), ev.data() + n, [E](double x) { return x < E; }));
}

std::vector<Phase> qmc_phases(int d, int count, const Phase& shift) {
  // generalized golden ratio: the unique positive root of x^(d+1) = x + 1
  double g = 2.0;
  for (int it = 0; it < 60; ++it) g = std::pow(1.0 + g, 1.0 / (d + 1));
  Phase a(d);
  for (int j = 0; j < d; ++j) a(j) = std::fmod(std::pow(1.0 / g, j + 1), 1.0);
  std::vector<Phase> out;
  out.reserve(count);
  for (int s = 0; s < count; ++s) {
    Phase p(d);
    for (int j = 0; j < d; ++j) {
      double base = d == 1 ? (s + 0.5) / count : 0.5 + s * a(j);
      double sh = shift.size() > j ? shift(j) : 0.0;
      p(j) = base + sh - std::floor(base + sh);
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace qps
