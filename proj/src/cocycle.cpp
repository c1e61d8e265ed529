#include "qpstrip/cocycle.hpp"

#include <algorithm>
#include <cmath>

namespace qps {

Phase Cocycle::shift(const Phase& t, long n) const {
  Phase r = t + static_cast<double>(n) * alpha_;
  if (torus_) r = r.array() - r.array().floor();
  return r;
}

Cocycle schrodinger_cocycle(const StripSpec& strip, cplx E, double y) {
  const int m = strip.m();
  Eigen::PartialPivLU<CMat> lu(strip.C);
  if (!(std::abs(lu.determinant()) > 0.0)) throw DomainError("singular C");
  CMat Cinv = lu.inverse();
  CMat B = -Cinv * strip.C.adjoint();
  Cocycle c(strip.alpha, 2 * m, [strip, Cinv, B, E, y, m](const Phase& t) {
    CMat a = CMat::Zero(2 * m, 2 * m);
    CMat e = E * CMat::Identity(m, m) - strip.potential(t, y);
    a.topLeftCorner(m, m) = Cinv * e;
    a.topRightCorner(m, m) = B;
    a.bottomLeftCorner(m, m) = CMat::Identity(m, m);
    return a;
  });
  c.form = SympForm::from_C(strip.C);
  c.energy = E;
  return c;
}

CMat schrodinger_energy_derivative(const StripSpec& strip) {
  const int m = strip.m();
  CMat d = CMat::Zero(2 * m, 2 * m);
  d.topLeftCorner(m, m) = strip.C.inverse();
  return d;
}

Cocycle finite_range_cocycle(const OperatorSpec& spec, cplx E) {
  spec.hopping.validate();
  const int K = spec.hopping.range();
  if (K == 0 || spec.hopping.at(K) == cplx(0.0)) throw DomainError("hopping range misdeclared (w_K = 0)");
  const cplx wK = spec.hopping.at(K);
  const cplx w0 = spec.hopping.at(0);
  // columns ordered k = K-1, ..., 1, 0, -1, ..., -K
  CVec row(2 * K);
  for (int c = 0; c < 2 * K; ++c) {
    int k = K - 1 - c;
    row(c) = k == 0 ? cplx(0.0) : -spec.hopping.at(k) / wK;
  }
  const PotentialSpec pot = spec.potential;
  const bool torus = pot.kind == PotentialSpec::Kind::QuasiPeriodic;
  Phase alpha = torus ? pot.alpha : Phase::Constant(1, 1.0);
  Cocycle c(alpha, 2 * K, [=](const Phase& t) {
    CMat a = CMat::Zero(2 * K, 2 * K);
    a.row(0) = row.transpose();
    double v = 0.0;
    if (pot.epsilon != 0.0) v = torus ? pot.eval(t).real() : pot.site(std::lround(t(0)));
    a(0, K - 1) = (E - w0 - pot.epsilon * v) / wK;
    for (int i = 1; i < 2 * K; ++i) a(i, i - 1) = 1.0;
    return a;
  }, torus);
  c.energy = E;
  return c;
}

Cocycle constant_cocycle(const CMat& a, const Phase& alpha) {
  return Cocycle(alpha, static_cast<int>(a.rows()), [a](const Phase&) { return a; });
}

ScaledProduct iterate(const Cocycle& c, const Phase& t, long n) {
  ScaledProduct p{CMat::Identity(c.dim(), c.dim()), 0.0};
  auto rescale = [&p]() {
    double nrm = spectral_norm(p.Q);
    if (!(nrm > 0.0) || !std::isfinite(nrm)) throw DomainError("singular fiber matrix");
    p.Q /= nrm;
    p.s += std::log(nrm);
  };
  if (n >= 0) {
    for (long j = 0; j < n; ++j) {
      p.Q = c.at(c.shift(t, j)) * p.Q;
      rescale();
    }
  } else {
    for (long j = 1; j <= -n; ++j) {
      CMat a = c.at(c.shift(t, -j));
      Eigen::PartialPivLU<CMat> lu(a);
      if (!(std::abs(lu.determinant()) > 0.0)) throw DomainError("singular fiber matrix");
      p.Q = lu.inverse() * p.Q;
      rescale();
    }
  }
  return p;
}

namespace {

std::vector<double> qr_exponents(const Cocycle& c, const Phase& t0, long N, long burn) {
  const int n = c.dim();
  CMat Q = CMat::Identity(n, n);
  std::vector<double> acc(n, 0.0);
  for (long j = 0; j < burn + N; ++j) {
    CMat M = c.at(c.shift(t0, j)) * Q;
    Eigen::HouseholderQR<CMat> qr(M);
    Q = qr.householderQ() * CMat::Identity(n, n);
    if (j >= burn) {
      const CMat& R = qr.matrixQR();
      for (int i = 0; i < n; ++i) acc[i] += std::log(std::abs(R(i, i)));
    }
  }
  for (double& a : acc) a /= static_cast<double>(N);
  std::sort(acc.begin(), acc.end(), std::greater<double>());
  return acc;
}

std::vector<Phase> sample_phases(const Cocycle& c, int samples, const Phase& shift) {
  Phase sh = shift.size() ? shift : Phase::Zero(c.alpha().size());
  if (!c.on_torus()) return std::vector<Phase>(1, sh);
  return qmc_phases(static_cast<int>(c.alpha().size()), samples, sh);
}

}  // namespace

LyapunovEstimate lyapunov_spectrum(const Cocycle& c, long N, int samples, long burn, Exec exec, const Phase& shift) {
  if (N <= 0 || samples <= 0) throw DomainError("lyapunov_spectrum: N and samples must be positive");
  if (burn < 0) burn = std::min(N / 10, 1000L);
  std::vector<Phase> phases = sample_phases(c, samples, shift);
  LyapunovEstimate est;
  est.per_sample.resize(phases.size());
  for_each_index(static_cast<long>(phases.size()), exec,
                 [&](long s) { est.per_sample[s] = qr_exponents(c, phases[s], N, burn); });
  const int n = c.dim();
  est.exponents.assign(n, 0.0);
  for (const auto& ps : est.per_sample)
    for (int i = 0; i < n; ++i) est.exponents[i] += ps[i] / static_cast<double>(est.per_sample.size());
  for (const auto& ps : est.per_sample)
    for (int i = 0; i < n; ++i) est.spread = std::max(est.spread, std::abs(ps[i] - est.exponents[i]));
  return est;
}

LyapunovSum upper_lyapunov_sum(const Cocycle& c, int k, long N, int samples, Exec exec) {
  if (k < 1 || k > c.dim()) throw DomainError("upper_lyapunov_sum: k out of range");
  LyapunovEstimate e = lyapunov_spectrum(c, N, samples, -1, exec);
  LyapunovSum s;
  for (int i = 0; i < k; ++i) s.value += e.exponents[i];
  for (const auto& ps : e.per_sample) {
    double v = 0.0;
    for (int i = 0; i < k; ++i) v += ps[i];
    s.spread = std::max(s.spread, std::abs(v - s.value));
  }
  return s;
}

AccelerationEstimate acceleration(const StripSpec& strip, cplx E, const std::vector<double>& y_grid, long N, int samples,
                                  double max_residual) {
  if (y_grid.size() < 2) throw DomainError("acceleration: need at least two imaginary shifts");
  AccelerationEstimate a;
  a.y = y_grid;
  a.L.resize(y_grid.size());
  for (size_t i = 0; i < y_grid.size(); ++i)
    a.L[i] = lyapunov_spectrum(schrodinger_cocycle(strip, E, y_grid[i]), N, samples).exponents[0];
  const double n = static_cast<double>(y_grid.size());
  double sy = 0, sl = 0, syy = 0, syl = 0;
  for (size_t i = 0; i < y_grid.size(); ++i) {
    sy += a.y[i];
    sl += a.L[i];
    syy += a.y[i] * a.y[i];
    syl += a.y[i] * a.L[i];
  }
  double den = n * syy - sy * sy;
  if (!(std::abs(den) > 0)) throw DomainError("acceleration: degenerate y grid");
  double slope = (n * syl - sy * sl) / den;
  double icpt = (sl - slope * sy) / n;
  for (size_t i = 0; i < y_grid.size(); ++i) a.fit_residual = std::max(a.fit_residual, std::abs(a.L[i] - icpt - slope * a.y[i]));
  a.omega = slope / kTwoPi;
  a.rounded = std::lround(a.omega);
  if (a.fit_residual > max_residual) throw ConvergenceError("acceleration: y grid straddles a turning point");
  return a;
}

namespace {

void require_sl2r(const CMat& a) {
  if (a.rows() != 2 || a.cols() != 2) throw DomainError("rotation_number needs 2x2 fibers");
  if (a.imag().cwiseAbs().maxCoeff() > 1e-12) throw DomainError("rotation_number needs real fibers");
  if (std::abs(a.determinant() - 1.0) > 1e-10) throw DomainError("rotation_number needs det 1");
}

double angle_step(const CMat& a, Eigen::Vector2d& v) {
  Eigen::Matrix2d r = a.real();
  Eigen::Vector2d w = r * v;
  double cross = v(0) * w(1) - v(1) * w(0);
  double dotp = v.dot(w);
  v = w / w.norm();
  return std::atan2(cross, dotp);
}

}  // namespace

long cocycle_degree(const Cocycle& c, int grid) {
  if (c.alpha().size() != 1) throw DomainError("cocycle_degree: one-dimensional base only");
  double total = 0.0;
  Phase t(1);
  t(0) = 0.0;
  CMat a = c.at(t);
  Eigen::Vector2d prev = a.real().col(0);
  for (int i = 1; i <= grid; ++i) {
    t(0) = static_cast<double>(i) / grid;
    Eigen::Vector2d cur = c.at(t).real().col(0);
    double step = std::atan2(prev(0) * cur(1) - prev(1) * cur(0), prev.dot(cur));
    if (std::abs(step) > kPi / 2) throw DomainError("cocycle_degree: grid too coarse");
    total += step;
    prev = cur;
  }
  return std::lround(total / kTwoPi);
}

double rotation_number(const Cocycle& c, long N, int samples) {
  require_sl2r(c.at(Phase::Zero(c.alpha().size())));
  if (c.on_torus() && c.alpha().size() == 1 && cocycle_degree(c) != 0)
    throw DomainError("rotation_number: cocycle not homotopic to the identity");
  std::vector<Phase> phases = sample_phases(c, samples, Phase());
  std::vector<double> rho(phases.size());
  for_each_index(static_cast<long>(phases.size()), Exec::Parallel, [&](long s) {
    Eigen::Vector2d v(1.0, 0.0);
    double total = 0.0;
    for (long j = 0; j < N; ++j) total += angle_step(c.at(c.shift(phases[s], j)), v);
    rho[s] = total / (kTwoPi * static_cast<double>(N));
  });
  double mean = 0.0;
  for (double r : rho) mean += r / static_cast<double>(rho.size());
  return mean - std::floor(mean);
}

cplx monotonicity_check(const StripSpec& strip, double E, const Phase& t, const CVec& v) {
  Cocycle c = schrodinger_cocycle(strip, E);
  CMat a0 = c.at(t), a1 = c.at(c.shift(t, 1));
  CMat d = schrodinger_energy_derivative(strip);
  CMat a2 = a1 * a0;
  CMat da2 = d * a0 + a1 * d;
  return form_value(*c.form, da2 * v, a2 * v);
}

double monotonicity_reference(const StripSpec& strip, double E, const Phase& t, const CVec& v) {
  const int m = strip.m();
  Cocycle c = schrodinger_cocycle(strip, E);
  CVec w = c.at(t) * v;
  return -v.head(m).squaredNorm() - w.head(m).squaredNorm();
}

CMat rotation(double a) {
  CMat r(2, 2);
  r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return r;
}

}  // namespace qps
