#include "qpstrip/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace qps {

namespace {

CMat seed_frame(int n, int k, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CMat x(n, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < n; ++i) x(i, j) = cplx(g(rng), g(rng));
  return x;
}

CMat orth(const CMat& x) {
  Eigen::HouseholderQR<CMat> qr(x);
  return qr.householderQ() * CMat::Identity(x.rows(), x.cols());
}

// Frames at t_0..t_L of the k-dimensional bundle pushed forward from T^{-N} t.
std::vector<CMat> push_forward(const Cocycle& c, const Phase& t, int k, long N, long L, unsigned seed) {
  std::vector<CMat> out;
  CMat X = orth(seed_frame(c.dim(), k, seed));
  for (long j = -N; j < 0; ++j) X = orth(c.at(c.shift(t, j)) * X);
  out.push_back(X);
  for (long j = 0; j < L; ++j) {
    X = orth(c.at(c.shift(t, j)) * X);
    out.push_back(X);
  }
  return out;
}

// Frames at t_0..t_L of the k-dimensional bundle pulled back from T^{N+L} t.
std::vector<CMat> push_backward(const Cocycle& c, const Phase& t, int k, long N, long L, unsigned seed) {
  std::vector<CMat> out(L + 1);
  CMat X = orth(seed_frame(c.dim(), k, seed));
  for (long j = N + L - 1; j >= 0; --j) {
    X = orth(c.at(c.shift(t, j)).partialPivLu().solve(X));
    if (j <= L) out[j] = X;
  }
  return out;
}

// Per-step finite-time exponents from a full QR sweep over the N steps ending at t.
std::vector<double> window_exponents(const Cocycle& c, const Phase& t, long N) {
  const int n = c.dim();
  CMat Q = orth(seed_frame(n, n, 7));
  std::vector<double> acc(n, 0.0);
  for (long j = -N; j < 0; ++j) {
    Eigen::HouseholderQR<CMat> qr(c.at(c.shift(t, j)) * Q);
    Q = qr.householderQ() * CMat::Identity(n, n);
    for (int i = 0; i < n; ++i) acc[i] += std::log(std::abs(qr.matrixQR()(i, i)));
  }
  for (double& a : acc) a /= static_cast<double>(N);
  return acc;
}

CMat psi_complement(const SympForm& form, const CMat& B) {
  const long n = B.rows();
  if (B.cols() == 0) return CMat::Identity(n, n);
  CMat sb = form.S * B;
  Eigen::HouseholderQR<CMat> qr(sb);
  CMat full = qr.householderQ() * CMat::Identity(n, n);
  return full.rightCols(n - B.cols());
}

double min_angle_between(const SubspaceFrame& a, const SubspaceFrame& b) {
  auto ang = principal_angles(a, b);
  return ang.empty() ? kPi / 2 : ang.front();
}

}  // namespace

Splitting compute_splitting(const Cocycle& c, const Phase& t, Dims dims, long N, long orbit_len) {
  const int n = c.dim();
  if (dims.u + dims.c + dims.s != n || dims.u < 0 || dims.c < 0 || dims.s < 0)
    throw DomainError("compute_splitting: dims must add up to the fiber dimension");
  if (dims.u != dims.s) throw DomainError("compute_splitting: expects d_u = d_s");
  const long L = std::max(1L, orbit_len);
  Splitting s;
  s.dims = dims;
  for (long j = 0; j <= L; ++j) s.orbit.push_back(c.shift(t, j));
  s.symplectic = c.form.has_value() && is_hsp(c.at(t), *c.form, 1e-10);

  if (dims.u == 0) {
    s.gap = std::numeric_limits<double>::infinity();
    for (long j = 0; j <= L; ++j) {
      s.Eu.push_back(SubspaceFrame::empty(n));
      s.Es.push_back(SubspaceFrame::empty(n));
      s.Ec.push_back(SubspaceFrame::from_orthonormal(CMat::Identity(n, n)));
    }
    s.min_angle = kPi / 2;
    return s;
  }

  std::vector<double> lam = window_exponents(c, t, N);
  double g1 = std::exp(lam[dims.u - 1] - lam[dims.u]);
  double g2 = std::exp(lam[dims.u + dims.c - 1] - lam[dims.u + dims.c]);
  s.gap = std::min(g1, g2);
  if (!(s.gap > kGapThreshold)) throw ConvergenceError("no dominated splitting at these dims (gap certificate below 1.01)");

  auto fu = push_forward(c, t, dims.u, N, L, 11);
  auto bs = push_backward(c, t, dims.s, N, L, 13);
  std::vector<CMat> fcu, bcs;
  if (!s.symplectic && dims.c > 0) {
    fcu = push_forward(c, t, dims.u + dims.c, N, L, 17);
    bcs = push_backward(c, t, dims.s + dims.c, N, L, 19);
  }
  for (long j = 0; j <= L; ++j) {
    s.Eu.push_back(SubspaceFrame::from_orthonormal(fu[j]));
    s.Es.push_back(SubspaceFrame::from_orthonormal(bs[j]));
    if (dims.c == 0) {
      s.Ec.push_back(SubspaceFrame::empty(n));
    } else if (s.symplectic) {
      CMat B(n, dims.u + dims.s);
      B << fu[j], bs[j];
      s.Ec.push_back(SubspaceFrame::from_orthonormal(psi_complement(*c.form, B)));
    } else {
      SubspaceFrame ec = intersect(SubspaceFrame::from_orthonormal(fcu[j]), SubspaceFrame::from_orthonormal(bcs[j]), 1e-6);
      if (ec.rank() != dims.c) throw ConvergenceError("center bundle intersection has the wrong dimension");
      s.Ec.push_back(ec);
    }
  }
  s.min_angle = std::min({min_angle_between(s.Eu[0], s.Es[0]), min_angle_between(s.Eu[0], s.Ec[0]),
                          min_angle_between(s.Es[0], s.Ec[0])});
  if (s.min_angle < 1e-8) throw ConvergenceError("bundles are not transverse");
  for (long j = 0; j < L; ++j) {
    CMat a = c.at(s.orbit[j]);
    for (auto* bundle : {&s.Eu, &s.Ec, &s.Es}) {
      const SubspaceFrame& f = (*bundle)[j];
      if (f.rank() == 0) continue;
      double r = subspace_distance(SubspaceFrame(a * f.basis()), (*bundle)[j + 1]);
      s.invariance_residual = std::max(s.invariance_residual, r);
    }
  }
  if (s.invariance_residual > 1e-6) throw ConvergenceError("splitting is not invariant to 1e-6");
  return s;
}

Splitting detect_splitting(const Cocycle& c, const Phase& t, long N, long orbit_len) {
  const int n = c.dim();
  for (int dc = 0; dc <= n; dc += 2) {
    Dims d{(n - dc) / 2, dc, (n - dc) / 2};
    try {
      return compute_splitting(c, t, d, N, orbit_len);
    } catch (const ConvergenceError&) {
      if (dc == n) throw;
    }
  }
  throw ConvergenceError("no splitting found");
}

namespace {

SubspaceFrame vertical(int n, bool inverse) {
  const int m = n / 2;
  CMat v = CMat::Zero(n, m);
  for (int i = 0; i < m; ++i) v(inverse ? i : m + i, i) = 1.0;
  return SubspaceFrame::from_orthonormal(v);
}

}  // namespace

double vertical_angle(const Splitting& s, long j) {
  const SubspaceFrame& es = s.Es.at(j);
  if (es.rank() == 0) return kPi / 2;
  return principal_angles(es, vertical(es.ambient(), false)).front();
}

double inverse_vertical_angle(const Splitting& s, long j) {
  const SubspaceFrame& eu = s.Eu.at(j);
  if (eu.rank() == 0) return kPi / 2;
  return principal_angles(eu, vertical(eu.ambient(), true)).front();
}

bool critical_set_test(const Splitting& s, double floor, Bundle which, long j) {
  return (which == Bundle::Stable ? vertical_angle(s, j) : inverse_vertical_angle(s, j)) > floor;
}

std::vector<CMat> center_transport(const Cocycle& c, const Splitting& s) {
  if (s.dims.c == 0) throw DomainError("no center bundle");
  const int n = c.dim();
  std::vector<CMat> out;
  out.reserve(s.length());
  for (long j = 0; j < s.length(); ++j) {
    CMat y = c.at(s.orbit[j]) * s.Ec[j].basis();
    if (s.dims.c == n) {
      out.push_back(s.Ec[j + 1].basis().adjoint() * y);
      continue;
    }
    CMat F(n, n);
    F << s.Ec[j + 1].basis(), s.Eu[j + 1].basis(), s.Es[j + 1].basis();
    out.push_back(F.partialPivLu().solve(y).topRows(s.dims.c));
  }
  return out;
}

std::vector<double> center_growth(const Cocycle& c, const Splitting& s, long n_max) {
  if (s.dims.c == 0) throw DomainError("no center bundle");
  if (s.length() < n_max) throw DomainError("center_growth: splitting orbit shorter than n_max");
  if (s.invariance_residual > 1e-6) throw InvariantError("center frame invariance residual too large");
  Splitting cut = s;
  cut.orbit.resize(n_max + 1);
  auto M = center_transport(c, cut);
  std::vector<double> C(n_max + 1, 1.0);
  CMat P = CMat::Identity(s.dims.c, s.dims.c);
  for (long k = 1; k <= n_max; ++k) {
    P = M[k - 1] * P;
    double nrm = spectral_norm(P);
    C[k] = std::max(C[k - 1], nrm * nrm);
  }
  return C;
}

double sampled_lipschitz(const MapChain& chain, double t_max, int samples) {
  double L = 0.0;
  for (long n = 1; n <= chain.n_max; ++n) {
    CMat q = orth(chain.V[n]);
    CMat q1 = orth(chain.V[n + 1]);
    CMat prev = chain.f(n, 0.0);
    for (int i = 1; i <= samples; ++i) {
      double ta = t_max * (i - 1) / samples, tb = t_max * i / samples;
      CMat cur = chain.f(n, tb);
      double dt = tb - ta;
      L = std::max(L, spectral_norm((cur - prev) * q) / dt);
      CMat inv_a = prev.partialPivLu().solve(q1), inv_b = cur.partialPivLu().solve(q1);
      L = std::max(L, spectral_norm(inv_b - inv_a) / dt);
      prev = cur;
    }
  }
  return L;
}

TelescopingReport telescoping_check(const MapChain& chain, double L, double t, long n) {
  if (n < 1 || n > chain.n_max) throw DomainError("telescoping_check: n outside the chain");
  TelescopingReport r;
  r.L = L;
  CMat q1 = orth(chain.V[1]);
  for (long k = 1; k <= n; ++k) {
    CMat f0 = chain.f(k, 0.0);
    CMat qk = orth(chain.V[k]);
    if (spectral_norm(qk.adjoint() * chain.form.S * qk - (f0 * qk).adjoint() * chain.form.S * (f0 * qk)) > 1e-9)
      throw DomainError("telescoping_check: f_0 is not symplectic on V_n");
  }
  double c = 1.0;
  for (long k = 1; k <= n + 1; ++k) c = std::max(c, reverse_norm_constant(chain.form, orth(chain.V[k])));
  r.c = c;
  CMat Y0 = q1, Yt = q1;
  double Cn = 1.0;
  for (long k = 1; k <= n; ++k) {
    Y0 = chain.f(k, 0.0) * Y0;
    Yt = chain.f(k, t) * Yt;
    double a = spectral_norm(Y0);
    Cn = std::max(Cn, a * a);
  }
  r.Cn = Cn;
  r.lhs = spectral_norm(Yt);
  r.lhs_inv = 1.0 / smallest_singular(Yt);
  r.rhs = c * Cn * std::exp(c * Cn * L * t * static_cast<double>(n));
  r.holds = r.lhs <= r.rhs * (1 + 1e-12) && r.lhs_inv <= r.rhs * (1 + 1e-12);
  return r;
}

namespace {

// smallest x >= 1 with x C exp(x C eps n) >= target
double fit_growth_constant(double target, double C, double eps, double n) {
  auto g = [&](double x) { return x * C * std::exp(x * C * eps * n); };
  if (g(1.0) >= target) return 1.0;
  double lo = 1.0, hi = 2.0;
  while (g(hi) < target) hi *= 2.0;
  for (int it = 0; it < 100; ++it) {
    double mid = 0.5 * (lo + hi);
    (g(mid) >= target ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

CenterVariationReport center_variation_check(const StripSpec& strip, double E, const Phase& t,
                                             const std::vector<double>& eps_grid, long n_max, long N, double C2_max) {
  Cocycle c0 = schrodinger_cocycle(strip, E);
  Splitting s0 = detect_splitting(c0, t, N, n_max);
  if (s0.dims.c == 0) throw DomainError("center_variation_check: no center at this energy");
  CenterVariationReport r;
  r.dims = s0.dims;
  r.Cn = center_growth(c0, s0, n_max);
  auto M0 = center_transport(c0, s0);
  const int n = c0.dim(), dc = s0.dims.c;
  r.C2 = 1.0;
  for (double eps : eps_grid) {
    Cocycle ce = schrodinger_cocycle(strip, cplx(E, eps));
    Splitting se = eps == 0.0 ? s0 : compute_splitting(ce, t, s0.dims, N, n_max);
    std::vector<CMat> At;
    At.reserve(n_max);
    for (long j = 0; j < n_max; ++j) {
      auto coords = [&](long k, const CMat& x) -> CMat {
        if (dc == n) return s0.Ec[k].basis().adjoint() * x;
        CMat F(n, n);
        F << s0.Ec[k].basis(), s0.Eu[k].basis(), s0.Es[k].basis();
        return F.partialPivLu().solve(x).topRows(dc);
      };
      CMat G = coords(j, se.Ec[j].basis());
      if (smallest_singular(G) < 1e-6) throw DomainError("center_variation_check: eps outside the persistence range");
      CMat y = coords(j + 1, ce.at(s0.orbit[j]) * se.Ec[j].basis());
      At.push_back(y * G.inverse());
    }
    double lip = 0.0;
    for (long j = 0; j < n_max; ++j) lip = std::max(lip, spectral_norm(At[j] - M0[j]));
    r.eps.push_back(eps);
    r.lipschitz_ratio.push_back(eps > 0 ? lip / eps : 0.0);
    std::vector<double> norms(n_max + 1, 1.0);
    CMat P = CMat::Identity(dc, dc);
    double worst = 1.0;
    for (long k = 1; k <= n_max; ++k) {
      P = At[k - 1] * P;
      Eigen::JacobiSVD<CMat> svd(P);
      double a = svd.singularValues()(0), b = 1.0 / svd.singularValues()(dc - 1);
      norms[k] = a;
      worst = std::max(worst, a);
      r.C2 = std::max(r.C2, fit_growth_constant(std::max(a, b), r.Cn[k], eps, static_cast<double>(k)));
    }
    r.norms.push_back(norms);
    r.max_norm.push_back(worst);
  }
  for (double x : r.lipschitz_ratio) r.C3 = std::max(r.C3, x);
  r.holds = r.C2 <= C2_max;
  return r;
}

}  // namespace qps
