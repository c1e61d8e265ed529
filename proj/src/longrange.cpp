#include "qpstrip/longrange.hpp"

#include <algorithm>
#include <cmath>

namespace qps {

namespace {

void require_cover(const WindowVec& f, long a, long b, const char* what) {
  if (f.lo > a || f.hi() < b) throw DomainError(std::string(what) + ": window too small for the hopping range");
}

double decay_constant(const HoppingSeq& h) {
  double measured = h.measured_decay();
  if (h.decay_C > 0 && measured > h.decay_C * (1 + 1e-12)) throw DomainError("decay hypothesis |w_k| <= C/k^3 violated");
  return std::max(h.decay_C, measured);
}

double lagrange_constant(const HoppingSeq& h, long R) {
  double c = 0.0;
  for (const auto& [k, w] : h.w)
    if (k > 0 && k <= R) c += 4.0 * k * std::abs(w);
  return c;
}

// a_n = (Hf)_n conj(g_n) - f_n conj((Hg)_n) for |n| <= R
std::vector<cplx> lagrange_density(const OperatorSpec& spec, const WindowVec& f, const WindowVec& g, long R) {
  WindowVec hf = apply_range(spec, f, -R, R), hg = apply_range(spec, g, -R, R);
  std::vector<cplx> a(2 * R + 1);
  for (long n = -R; n <= R; ++n) a[n + R] = hf(n) * std::conj(g(n)) - f(n) * std::conj(hg(n));
  return a;
}

// W_r for r = 0..R from the density
std::vector<cplx> cumulative(const std::vector<cplx>& a, long R) {
  std::vector<cplx> W(R + 1);
  W[0] = a[R];
  for (long r = 1; r <= R; ++r) W[r] = W[r - 1] + a[R + r] + a[R - r];
  return W;
}

}  // namespace

cplx lagrange_form(const OperatorSpec& spec, const WindowVec& f, const WindowVec& g, long r) {
  if (r < 0) throw DomainError("lagrange_form: r must be nonnegative");
  const long K = spec.hopping.range();
  require_cover(f, -r - K, r + K, "lagrange_form");
  require_cover(g, -r - K, r + K, "lagrange_form");
  auto a = lagrange_density(spec, f, g, r);
  cplx s = 0.0;
  for (const cplx& x : a) s += x;
  return s;
}

LagrangeBounds lagrange_sum_bounds(const OperatorSpec& spec, const WindowVec& f, const WindowVec& g, long R) {
  if (R < 1) throw DomainError("lagrange_sum_bounds: R must be positive");
  const long K = spec.hopping.range();
  require_cover(f, -R - K, R + K, "lagrange_sum_bounds");
  require_cover(g, -R - K, R + K, "lagrange_sum_bounds");
  double ginf = g.v.size() ? g.v.cwiseAbs().maxCoeff() : 0.0;
  if (ginf > 1.0 + 1e-12) throw DomainError("lagrange_sum_bounds: needs ||g||_inf <= 1");
  const double C = decay_constant(spec.hopping);
  auto W = cumulative(lagrange_density(spec, f, g, R), R);
  cplx sum = 0.0;
  for (long r = 1; r <= R; ++r) sum += W[r];
  LagrangeBounds b;
  b.lhs = std::abs(sum);
  b.finite_range = spec.hopping.decay_C == 0.0;
  if (b.finite_range) b.finite_bound = lagrange_constant(spec.hopping, K) * f.norm(-R - K, R + K) * g.norm(-R - K, R + K);
  b.infinite_bound = 6.0 * std::max(1.0, C) * f.v.norm() +
                     lagrange_constant(spec.hopping, R) * f.norm(-2 * R, 2 * R) * g.norm(-2 * R, 2 * R);
  const double slack = 1e-12 * std::max(1.0, b.lhs);
  b.holds = b.lhs <= b.infinite_bound + slack && (!b.finite_range || b.lhs <= b.finite_bound + slack);
  return b;
}

TailSolve solve_window(const OperatorSpec& spec, cplx z, const WindowVec& phi, long lo, long hi, double tol,
                       int max_iter) {
  const long n = hi - lo + 1;
  if (n <= 0) throw DomainError("solve_window: empty window");
  const int Kc = std::min(spec.hopping.range(), kBandLimit);
  const double eps = spec.potential.epsilon;
  std::vector<cplx> diag(n);
  for (long i = 0; i < n; ++i) diag[i] = spec.hopping.at(0) + (eps != 0.0 ? eps * spec.potential.site(lo + i) : 0.0) - z;
  BandedLU lu(static_cast<int>(n), Kc, Kc,
              [&](int i, int j) { return i == j ? diag[i] : spec.hopping.at(j - i); });
  CVec rhs = CVec::Zero(n);
  for (long i = 0; i < n; ++i) rhs(i) = phi(lo + i);
  const double bn = rhs.norm();
  if (!(bn > 0)) throw DomainError("solve_window: zero right-hand side");
  TailSolve s;
  s.v = WindowVec{lo, lu.solve(rhs)};
  for (s.iterations = 1;; ++s.iterations) {
    WindowVec hv = apply_range(spec, s.v, lo, hi);
    CVec r = rhs - (hv.v - z * s.v.v);
    s.residual = r.norm() / bn;
    if (!std::isfinite(s.residual)) throw ConvergenceError("solve_window: defect correction diverged");
    if (s.residual <= tol) break;
    if (s.iterations >= max_iter) throw ConvergenceError("solve_window: defect correction did not converge");
    s.v.v += lu.solve(r);
  }
  return s;
}

SubordinacyReport subordinacy_probe(const OperatorSpec& spec, double E, const SiteFunction& u, const WindowVec& phi,
                                    const std::vector<long>& R_grid, double alpha) {
  if (R_grid.empty()) throw DomainError("subordinacy_probe: empty R grid");
  for (size_t i = 1; i < R_grid.size(); ++i)
    if (R_grid[i] <= R_grid[i - 1]) throw DomainError("subordinacy_probe: R grid must increase");
  const long Rmax = R_grid.back();
  const long K = spec.hopping.range();
  SubordinacyReport rep;
  rep.E = E;
  rep.alpha = alpha;
  rep.decay_C = decay_constant(spec.hopping);
  const double Ceff = std::max(1.0, rep.decay_C);

  const long uw = 2 * Rmax + K;
  WindowVec U{-uw, CVec(2 * uw + 1)};
  for (long n = -uw; n <= uw; ++n) U.v(n + uw) = u(n);
  const double uinf = U.v.cwiseAbs().maxCoeff();
  if (!(uinf > 0)) throw DomainError("subordinacy_probe: u vanishes");
  WindowVec hu = apply_range(spec, U, -2 * Rmax, 2 * Rmax);
  double res = 0.0;
  for (long n = -2 * Rmax; n <= 2 * Rmax; ++n) res = std::max(res, std::abs(hu(n) - E * U(n)));
  rep.u_residual = res / uinf;
  if (rep.u_residual > 1e-8) throw DomainError("u does not solve (H - E) u = 0 on the probe window");

  cplx pair = 0.0;
  for (long n = phi.lo; n <= phi.hi(); ++n) pair += phi(n) * std::conj(u(n));
  if (std::abs(pair) < 1e-12 * phi.v.norm() * uinf) throw DomainError("<phi, u> = 0: the pairing hypothesis fails");

  rep.holds = true;
  for (long R : R_grid) {
    if (R < std::max(std::abs(phi.lo), std::abs(phi.hi())) + 1) throw DomainError("R must exceed the support of phi");
    SubordinacyRow row;
    row.R = R;
    row.eps = 1.0 / static_cast<double>(R);
    const cplx z(E, row.eps);
    TailSolve ts = solve_window(spec, z, phi, -4 * R, 4 * R);
    const WindowVec& v = ts.v;
    row.solver_iterations = ts.iterations;
    row.v_norm = v.v.norm();
    row.v_norm_2R = v.norm(-2 * R, 2 * R);
    row.u_norm_2R = U.norm(-2 * R, 2 * R);

    cplx ip = 0.0;
    for (long n = phi.lo; n <= phi.hi(); ++n) ip += v(n) * std::conj(phi(n));
    row.op_s_residual = std::abs(ip.imag() - row.eps * row.v_norm * row.v_norm) / (row.eps * row.v_norm * row.v_norm);

    WindowVec hv = apply_range(spec, v, -R, R);
    WindowVec hur = apply_range(spec, U, -R, R);
    cplx wr = 0.0, pr = 0.0, vr = 0.0, wsum = 0.0, psum = 0.0;
    double idres = 0.0;
    for (long r = 0; r <= R; ++r) {
      for (long n : {-r, r}) {
        wr += hv(n) * std::conj(U(n)) - v(n) * std::conj(hur(n));
        pr += phi(n) * std::conj(U(n));
        vr += v(n) * std::conj(U(n));
        if (r == 0) break;
      }
      idres = std::max(idres, std::abs(wr - pr - kI * row.eps * vr) / std::max(1.0, std::abs(wr)));
      if (r >= 1) {
        wsum += wr;
        psum += pr;
      }
    }
    row.identity_residual = idres;
    row.pairing_sum = std::abs(psum);
    row.w_sum = std::abs(wsum);
    row.lower = row.pairing_sum - row.eps * R * row.v_norm_2R * row.u_norm_2R;
    row.upper = 6.0 * Ceff * std::max(1.0, uinf) * row.v_norm +
                lagrange_constant(spec.hopping, R) * row.v_norm_2R * row.u_norm_2R;
    row.lower_margin = row.w_sum - row.lower;
    row.upper_margin = row.upper - row.w_sum;
    row.growth_c = row.v_norm / std::pow(static_cast<double>(R), 1.0 - alpha / 2.0);
    row.proxy = std::pow(row.eps, alpha) * row.v_norm * row.v_norm;
    const double slack = 1e-9 * std::max(1.0, row.w_sum);
    row.holds = row.lower_margin >= -slack && row.upper_margin >= -slack && row.op_s_residual < 1e-8;
    rep.holds = rep.holds && row.holds;
    rep.rows.push_back(row);
  }
  return rep;
}

nlohmann::json to_json(const SubordinacyReport& r) {
  nlohmann::json j;
  j["E"] = r.E;
  j["alpha"] = r.alpha;
  j["decay_C"] = r.decay_C;
  j["u_residual"] = r.u_residual;
  j["holds"] = r.holds;
  for (const auto& x : r.rows) {
    j["rows"].push_back({{"R", x.R},
                         {"eps", x.eps},
                         {"v_norm", x.v_norm},
                         {"v_norm_2R", x.v_norm_2R},
                         {"u_norm_2R", x.u_norm_2R},
                         {"pairing_sum", x.pairing_sum},
                         {"lower", x.lower},
                         {"w_sum", x.w_sum},
                         {"upper", x.upper},
                         {"lower_margin", x.lower_margin},
                         {"upper_margin", x.upper_margin},
                         {"growth_c", x.growth_c},
                         {"proxy", x.proxy},
                         {"op_s_residual", x.op_s_residual},
                         {"identity_residual", x.identity_residual},
                         {"solver_iterations", x.solver_iterations},
                         {"holds", x.holds}});
  }
  return j;
}

std::vector<long> DualVector::site(long idx) const {
  std::vector<long> m(d);
  for (int j = d - 1; j >= 0; --j) {
    m[j] = idx % side() - N;
    idx /= side();
  }
  return m;
}

WindowVec duality_transform(const DualVector& u, double x, const Phase& theta, const Phase& alpha, long lo, long hi) {
  if (theta.size() != u.d || alpha.size() != u.d) throw DomainError("duality_transform: dimension mismatch");
  if (hi < lo) throw DomainError("duality_transform: empty window");
  WindowVec out{lo, CVec::Zero(hi - lo + 1)};
  std::vector<std::vector<long>> sites(u.values.size());
  for (long i = 0; i < u.values.size(); ++i) sites[i] = u.site(i);
  for (long n = lo; n <= hi; ++n) {
    cplx s = 0.0;
    for (long i = 0; i < u.values.size(); ++i) {
      double arg = 0.0;
      for (int j = 0; j < u.d; ++j) arg += sites[i][j] * (theta(j) + static_cast<double>(n) * alpha(j));
      s += u.values(i) * std::exp(kI * kTwoPi * arg);
    }
    out.v(n - lo) = std::exp(kI * kTwoPi * static_cast<double>(n) * x) * s;
  }
  return out;
}

DualityCheck duality_check(const OperatorSpec& spec, const DualVector& u, double E, double x, long lo, long hi,
                           double tail_tol) {
  const auto& pot = spec.potential;
  if (pot.kind != PotentialSpec::Kind::QuasiPeriodic) throw DomainError("duality_check: potential not quasi-periodic");
  int reach = 0;
  double vsum = 0.0;
  for (const auto& t : pot.fourier) {
    std::vector<int> neg(t.k.size());
    for (size_t j = 0; j < t.k.size(); ++j) neg[j] = -t.k[j];
    cplx partner = 0.0;
    for (const auto& s : pot.fourier)
      if (s.k == neg) partner += s.c;
    if (std::abs(partner - t.c) > 1e-12 * std::max(1.0, std::abs(t.c)))
      throw DomainError("duality needs an even potential (v_{-k} = v_k)");
    for (int kj : t.k) reach = std::max(reach, std::abs(kj));
    vsum += std::abs(t.c);
  }
  DualityCheck c;
  double total = 0.0;
  for (long i = 0; i < u.values.size(); ++i) {
    double a = std::abs(u.values(i));
    total += a;
    auto m = u.site(i);
    bool shell = false;
    for (long mj : m) shell = shell || std::abs(mj) > u.N - reach;
    if (shell) c.shell_l1 += a;
  }
  c.tail = total > 0 ? c.shell_l1 / total : 0.0;
  if (c.tail > tail_tol) throw DomainError("duality_check: l1 tail of the dual vector too heavy");
  LatticeOperator dual = dual_operator(spec, Phase::Constant(1, x));
  CVec inner = dual.assemble(u.N) * u.values - E * u.values;
  c.bound = std::abs(pot.epsilon) * vsum * c.shell_l1 + inner.cwiseAbs().sum();
  const long K = spec.hopping.range();
  WindowVec wide = duality_transform(u, x, pot.theta, pot.alpha, lo - K, hi + K);
  WindowVec lu = apply_range(spec, wide, lo, hi);
  for (long n = lo; n <= hi; ++n) c.residual = std::max(c.residual, std::abs(lu(n) - E * wide(n)));
  c.u = WindowVec{lo, wide.v.segment(K, hi - lo + 1)};
  c.holds = c.residual <= c.bound * (1 + 1e-9) + 1e-12;
  return c;
}

DualEigen dual_localized_eigenvector(const OperatorSpec& spec, double x, long N) {
  LatticeOperator dual = dual_operator(spec, Phase::Constant(1, x));
  CMat h = dual.assemble(N);
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  DualVector probe{dual.dim(), N, CVec()};
  long origin = 0;
  for (int j = 0; j < probe.d; ++j) origin = origin * probe.side() + N;
  long best = 0;
  double w = -1.0;
  for (long c = 0; c < h.cols(); ++c) {
    double a = std::abs(es.eigenvectors()(origin, c));
    if (a > w) {
      w = a;
      best = c;
    }
  }
  DualEigen out;
  out.vec = probe;
  out.vec.values = es.eigenvectors().col(best);
  out.E = es.eigenvalues()(best);
  return out;
}

DualVector restrict_cube(const DualVector& u, long n) {
  if (n > u.N) throw DomainError("restrict_cube: larger than the source cube");
  DualVector r{u.d, n, CVec()};
  long total = 1;
  for (int j = 0; j < u.d; ++j) total *= r.side();
  r.values.resize(total);
  for (long i = 0; i < total; ++i) {
    auto m = r.site(i);
    long idx = 0;
    for (int j = 0; j < u.d; ++j) idx = idx * u.side() + (m[j] + u.N);
    r.values(i) = u.values(idx);
  }
  return r;
}

GrowthProxy solution_growth(const WindowVec& u, const std::vector<long>& R_grid, double alpha) {
  if (R_grid.empty()) throw DomainError("solution_growth: empty grid");
  GrowthProxy g;
  g.proxy = 1e300;
  for (long R : R_grid) {
    if (!u.contains(-R) || !u.contains(R)) throw DomainError("solution_growth: window smaller than R");
    double s = u.norm(-R, R);
    double val = s * s / std::pow(static_cast<double>(R), alpha);
    g.values.push_back(val);
    g.proxy = std::min(g.proxy, val);
  }
  if (R_grid.size() >= 2 && g.values.front() > 0 && g.values.back() > 0)
    g.slope = std::log(g.values.back() / g.values.front()) /
              std::log(static_cast<double>(R_grid.back()) / static_cast<double>(R_grid.front()));
  return g;
}

}  // namespace qps
