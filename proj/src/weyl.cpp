#include "qpstrip/weyl.hpp"

#include <algorithm>
#include <cmath>

namespace qps {

namespace {

CMat orth(const CMat& x) {
  Eigen::HouseholderQR<CMat> qr(x);
  return qr.householderQ() * CMat::Identity(x.rows(), x.cols());
}

CMat start_frame(int m) {
  // generic fixed start: every column mixes both halves
  CMat x(2 * m, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < 2 * m; ++i) x(i, j) = cplx(std::cos(1.0 + i + 3.7 * j), std::sin(2.0 + 1.3 * i - j));
  return orth(x);
}

// Frame of E^u (forward) or E^s (backward) at T t, refined by doubling the window.
CMat half_line_frame(const Cocycle& c, const Phase& t, bool stable, const HalfLineOptions& opt) {
  const int m = c.dim() / 2;
  auto push = [&](long N) {
    CMat X = start_frame(m);
    if (stable) {
      for (long j = N; j >= 1; --j) X = orth(c.at(c.shift(t, j)).partialPivLu().solve(X));
    } else {
      for (long j = -N; j <= 0; ++j) X = orth(c.at(c.shift(t, j)) * X);
    }
    return X;
  };
  long N = opt.n_start;
  CMat prev = push(N);
  while (true) {
    N *= 2;
    if (N > opt.n_max) throw ConvergenceError("half-line subspace did not converge (no uniform hyperbolicity)");
    CMat cur = push(N);
    double d = subspace_distance(SubspaceFrame::from_orthonormal(prev), SubspaceFrame::from_orthonormal(cur));
    if (d < opt.tol) return cur;
    prev = cur;
  }
}

// F(1) with basis rows [u(1); u(0)] read as the graph u(1) = F u(0).
CMat graph_slope(const CMat& X) {
  const long m = X.rows() / 2;
  CMat top = X.topRows(m), bottom = X.bottomRows(m);
  if (smallest_singular(bottom) < 1e-10) throw DomainError("half-line subspace is not a graph over the position fiber");
  return top * bottom.inverse();
}

void check_herglotz(const CMat& M, cplx z) {
  if (z.imag() <= 0) return;
  Eigen::SelfAdjointEigenSolver<CMat> es(im_part(M), Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues()(0) > 0)) throw InvariantError("Im M is not positive definite at Im z > 0");
}

}  // namespace

CMat im_part(const CMat& a) { return (a - a.adjoint()) / (2.0 * kI); }

double conformal_coefficient(const CMat& a) {
  Eigen::JacobiSVD<CMat> svd(a);
  const RVec& s = svd.singularValues();
  return s(0) / s(s.size() - 1);
}

CMat m_plus(const StripSpec& strip, cplx z, const Phase& t, const HalfLineOptions& opt) {
  Cocycle c = schrodinger_cocycle(strip, z);
  CMat M = -strip.C * graph_slope(half_line_frame(c, t, true, opt));
  check_herglotz(M, z);
  return M;
}

CMat m_minus(const StripSpec& strip, cplx z, const Phase& t, const HalfLineOptions& opt) {
  Cocycle c = schrodinger_cocycle(strip, z);
  CMat M = strip.C * graph_slope(half_line_frame(c, t, false, opt));
  check_herglotz(M, z);
  return M;
}

CMat m_matrix(const CMat& C, const CMat& Mp, const CMat& Mm) {
  const long m = C.rows();
  CMat sum = Mp + Mm;
  Eigen::FullPivLU<CMat> lu(sum);
  if (!lu.isInvertible() || smallest_singular(sum) < 1e-14 * std::max(1.0, spectral_norm(sum)))
    throw DomainError("M+ + M- is singular");
  CMat inv = lu.inverse();
  CMat Cinv = C.inverse();
  CMat CinvAdj = C.adjoint().inverse();
  CMat M(2 * m, 2 * m);
  M.topLeftCorner(m, m) = -inv;
  M.topRightCorner(m, m) = inv * Mp * CinvAdj;
  M.bottomLeftCorner(m, m) = Cinv * Mp * inv;
  M.bottomRightCorner(m, m) = Cinv * Mp * inv * Mm * CinvAdj;
  return M;
}

CMat m_matrix(const StripSpec& strip, cplx z, const Phase& t, const HalfLineOptions& opt) {
  return m_matrix(strip.C, m_plus(strip, z, t, opt), m_minus(strip, z, t, opt));
}

WeylData weyl_data(const StripSpec& strip, cplx z, const Phase& t, const HalfLineOptions& opt) {
  WeylData w;
  w.z = z;
  w.C = strip.C;
  w.M_plus = m_plus(strip, z, t, opt);
  w.M_minus = m_minus(strip, z, t, opt);
  w.M_z = m_matrix(strip.C, w.M_plus, w.M_minus);
  return w;
}

ImMTrace im_m_trace(const WeylData& w, double tol) {
  const CMat& X = w.M_plus;
  const CMat& Y = w.M_minus;
  const long m = X.rows();
  CMat ImX = im_part(X), ImY = im_part(Y);
  Eigen::SelfAdjointEigenSolver<CMat> ex(ImX), ey(ImY);
  if (!(ex.eigenvalues()(0) > 0) || !(ey.eigenvalues()(0) > 0))
    throw DomainError("indefinite imaginary parts of M+ or M-");
  CMat Sinv = (X + Y).inverse();
  CMat Cinv = w.C.inverse();
  ImMTrace r;
  r.terms[0] = (Cinv * Y * Sinv * ImX * Sinv.adjoint() * Y.adjoint() * Cinv.adjoint()).trace().real();
  r.terms[1] = (Sinv * ImX * Sinv.adjoint()).trace().real();
  r.terms[2] = (Cinv * X * Sinv * ImY * Sinv.adjoint() * X.adjoint() * Cinv.adjoint()).trace().real();
  r.terms[3] = (Sinv * ImY * Sinv.adjoint()).trace().real();
  r.expansion = r.terms[0] + r.terms[1] + r.terms[2] + r.terms[3];
  r.direct = im_part(w.M_z).trace().real();
  const double md = static_cast<double>(m);
  r.kappa = std::max(conformal_coefficient(ImX), conformal_coefficient(ImY));
  double ax = md + (Cinv * X * X.adjoint() * Cinv.adjoint()).trace().real();
  double ay = md + (Cinv * Y * Y.adjoint() * Cinv.adjoint()).trace().real();
  r.bound = std::pow(r.kappa, 3) * (ax / spectral_norm(ImX) + ay / spectral_norm(ImY));
  r.agrees = std::abs(r.expansion - r.direct) <= tol * std::max(1.0, std::abs(r.direct));
  r.bound_holds = r.direct <= r.bound * (1 + 1e-12);
  return r;
}

namespace {

// Solves the truncated problem for the given site columns and returns rows at the given sites.
CMat band_green(const std::vector<CVec>& band, long lo, cplx z, const std::vector<long>& rows,
                const std::vector<long>& cols) {
  const long n = band[0].size();
  CMat rhs = CMat::Zero(n, static_cast<long>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j) {
    long idx = cols[j] - lo;
    if (idx < 0 || idx >= n) throw DomainError("green: site outside the truncation");
    rhs(idx, static_cast<long>(j)) = 1.0;
  }
  CMat x = band_solve_shifted(band, z, rhs);
  CMat out(static_cast<long>(rows.size()), static_cast<long>(cols.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    long idx = rows[i] - lo;
    if (idx < 0 || idx >= n) throw DomainError("green: site outside the truncation");
    out.row(static_cast<long>(i)) = x.row(idx);
  }
  return out;
}

double rel_change(const CMat& a, const CMat& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

template <class F>
CMat with_doubling(F&& at_size, long N, double tol) {
  CMat a = at_size(N);
  if (tol > 0) {
    CMat b = at_size(2 * N);
    if (rel_change(a, b) > tol) throw ConvergenceError("truncation not converged under doubling");
  }
  return a;
}

}  // namespace

CMat green_block(const StripSpec& strip, cplx z, const Phase& t, long p, long q, long N, double tol) {
  if (z.imag() == 0.0) throw DomainError("green_block: Im z must be nonzero");
  const int m = strip.m();
  auto at_size = [&](long n) {
    long lo = -n / 2, hi = lo + n - 1;
    auto band = assemble_strip_band(strip, lo, hi, t);
    std::vector<long> rows, cols;
    for (int i = 0; i < m; ++i) {
      rows.push_back((p - lo) * m + i);
      cols.push_back((q - lo) * m + i);
    }
    return band_green(band, 0, z, rows, cols);
  };
  return with_doubling(at_size, N, tol);
}

cplx green_oracle(const OperatorSpec& spec, cplx z, long p, long q, long N, double tol) {
  if (z.imag() == 0.0) throw DomainError("green_oracle: Im z must be nonzero");
  auto at_size = [&](long n) {
    long lo = -n / 2, hi = lo + n - 1;
    return band_green(assemble_band(spec, lo, hi), lo, z, {p}, {q});
  };
  return with_doubling(at_size, N, tol)(0, 0);
}

CMat m_matrix_oracle(const OperatorSpec& spec, cplx z, long N, double tol) {
  if (z.imag() == 0.0) throw DomainError("m_matrix_oracle: Im z must be nonzero");
  const int K = spec.hopping.range();
  std::vector<long> sites;
  for (int b = 0; b < 2; ++b)
    for (int i = 0; i < K; ++i) sites.push_back(static_cast<long>(K) * b + K - 1 - i);
  auto at_size = [&](long n) {
    long lo = -(n / 2) * K, hi = lo + n * K - 1;
    return band_green(assemble_band(spec, lo, hi), lo, z, sites, sites);
  };
  return with_doubling(at_size, N, tol);
}

double op_s_residual(const std::vector<CVec>& band, cplx z, const CVec& phi) {
  CVec v = band_solve_shifted(band, z, CMat(phi)).col(0);
  double vn = v.squaredNorm();
  cplx ip = (v.array() * phi.array().conjugate()).sum();
  return std::abs(ip.imag() - z.imag() * vn) / (std::abs(z.imag()) * vn);
}

double center_sup(const Cocycle& c, const Phase& t, long S, long N, Dims* dims_out) {
  Phase start = c.shift(t, -S);
  Splitting s = detect_splitting(c, start, N, 2 * S);
  if (dims_out) *dims_out = s.dims;
  if (s.dims.c == 0) throw DomainError("no center bundle at this energy");
  auto M = center_transport(c, s);
  const long dc = s.dims.c;
  double best = 1.0;
  CMat P = CMat::Identity(dc, dc);
  for (long k = 0; k < S; ++k) {
    P = M[S + k] * P;
    best = std::max(best, spectral_norm(P));
  }
  P = CMat::Identity(dc, dc);
  for (long k = 1; k <= S; ++k) {
    P = M[S - k].partialPivLu().solve(P);
    best = std::max(best, spectral_norm(P));
  }
  return best;
}

namespace {

// A constant fitted on the coarse half may drift by O(eps) before the asymptotic regime; the fine
// half is accepted within this factor of the fitted bound.
constexpr double kValidateSlack = 2.0;

// indices of the coarse (larger eps) and fine halves
std::pair<std::vector<size_t>, std::vector<size_t>> split_grid(const std::vector<double>& eps) {
  std::vector<size_t> idx(eps.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return eps[a] > eps[b]; });
  size_t half = (idx.size() + 1) / 2;
  return {std::vector<size_t>(idx.begin(), idx.begin() + half), std::vector<size_t>(idx.begin() + half, idx.end())};
}

}  // namespace

CriterionFit imm_criterion(const StripSpec& strip, double E, const Phase& t, const std::vector<double>& eps_grid,
                           long N) {
  if (eps_grid.size() < 2) throw DomainError("imm_criterion: need at least two eps values");
  double eps_min = *std::min_element(eps_grid.begin(), eps_grid.end());
  if (!(eps_min > 0)) throw DomainError("imm_criterion: eps must be positive");
  const long nmax = static_cast<long>(std::ceil(3.0 / eps_min));
  Cocycle c = schrodinger_cocycle(strip, E);
  Splitting s = detect_splitting(c, t, N, nmax);
  if (s.dims.c == 0) throw DomainError("imm_criterion: no center bundle at this energy");
  auto Cn = center_growth(c, s, nmax);
  CriterionFit f;
  const long m = strip.m();
  CMat Cinv = strip.C.inverse();
  for (double eps : eps_grid) {
    CMat Mp = m_plus(strip, cplx(E, eps), t);
    double lhs = im_part(Mp).trace().real();
    double rhs = static_cast<double>(m) + (Cinv * Mp * Mp.adjoint() * Cinv.adjoint()).trace().real();
    f.eps.push_back(eps);
    f.ratio.push_back(rhs / lhs);
    f.growth.push_back(std::pow(Cn[static_cast<long>(std::ceil(3.0 / eps))], 3));
  }
  auto [coarse, fine] = split_grid(f.eps);
  for (size_t i : coarse) f.C4 = std::max(f.C4, f.ratio[i] / f.growth[i]);
  f.holds = true;
  for (size_t i : fine) f.holds = f.holds && f.ratio[i] <= kValidateSlack * f.C4 * f.growth[i];
  for (size_t i = 0; i < f.eps.size(); ++i) f.C5_max = std::max(f.C5_max, kValidateSlack * f.C4 * f.growth[i]);
  return f;
}

SpectralBound spectral_bound(const StripSpec& strip, double E, const Phase& t, const std::vector<double>& eps_grid,
                             long N, double floor) {
  if (eps_grid.size() < 2) throw DomainError("spectral_bound: need at least two eps values");
  Cocycle c = schrodinger_cocycle(strip, E);
  Splitting here = detect_splitting(c, t, N, 1);
  SpectralBound b;
  b.dims = here.dims;
  b.angle_s = vertical_angle(here);
  b.angle_u = inverse_vertical_angle(here);
  if (!critical_set_test(here, floor, Bundle::Stable) || !critical_set_test(here, floor, Bundle::Unstable))
    throw DomainError("critical energy: vertical angle below the floor");
  for (double eps : eps_grid) {
    if (!(eps > 0)) throw DomainError("spectral_bound: eps must be positive");
    WeylData w = weyl_data(strip, cplx(E, eps), t);
    b.eps.push_back(eps);
    b.mu_bound.push_back(eps * im_part(w.M_z).trace().real());
    double sup = center_sup(c, t, static_cast<long>(std::ceil(3.0 / eps)), N);
    b.center_sup.push_back(sup);
  }
  auto coarse = split_grid(b.eps).first;
  std::vector<double> unit(b.eps.size());
  for (size_t i = 0; i < unit.size(); ++i) unit[i] = b.eps[i] * std::pow(b.center_sup[i], 42);
  for (size_t i : coarse) b.C = std::max(b.C, b.mu_bound[i] / unit[i]);
  b.holds = true;
  for (size_t i = 0; i < unit.size(); ++i) {
    b.jl_rhs.push_back(kValidateSlack * b.C * unit[i]);
    b.holds = b.holds && b.mu_bound[i] <= b.jl_rhs[i];
  }
  return b;
}

}  // namespace qps
