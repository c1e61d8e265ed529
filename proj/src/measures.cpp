#include "qpstrip/measures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

namespace qps {

double IdsTable::at(double e) const {
  if (E.empty()) throw DomainError("empty IDS table");
  if (e <= E.front()) return N.front();
  if (e >= E.back()) return N.back();
  size_t i = static_cast<size_t>(std::upper_bound(E.begin(), E.end(), e) - E.begin()) - 1;
  double s = (e - E[i]) / (E[i + 1] - E[i]);
  return N[i] + s * (N[i + 1] - N[i]);
}

std::vector<double> linspace(double a, double b, int points) {
  if (points < 2) throw DomainError("linspace: need at least two points");
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = a + (b - a) * i / (points - 1);
  return g;
}

namespace {

void check_grid(const std::vector<double>& g) {
  if (g.empty()) throw DomainError("empty energy grid");
  for (size_t i = 1; i < g.size(); ++i)
    if (!(g[i] > g[i - 1])) throw DomainError("energy grid must be strictly increasing");
}

IdsTable count_table(const std::vector<double>& E_grid, int samples, long size, double norm,
                     const std::function<std::vector<CVec>(int)>& band_of, Exec exec) {
  check_grid(E_grid);
  const long ne = static_cast<long>(E_grid.size());
  std::vector<std::vector<CVec>> bands(samples);
  for_each_index(samples, exec, [&](long s) { bands[s] = band_of(static_cast<int>(s)); });
  std::vector<int> counts(static_cast<size_t>(samples) * ne);
  for_each_index(samples * ne, exec, [&](long idx) {
    counts[idx] = band_count_below(bands[idx / ne], E_grid[idx % ne]);
  });
  IdsTable t;
  t.E = E_grid;
  t.N.assign(ne, 0.0);
  t.size = size;
  t.samples = samples;
  for (long e = 0; e < ne; ++e) {
    long total = 0;
    for (int s = 0; s < samples; ++s) total += counts[static_cast<size_t>(s) * ne + e];
    t.N[e] = static_cast<double>(total) / (static_cast<double>(samples) * norm);
  }
  return t;
}

}  // namespace

IdsTable ids(const OperatorSpec& spec, const std::vector<double>& E_grid, long N, int samples, Exec exec) {
  if (N < 1 || samples < 1) throw DomainError("ids: need N >= 1 and samples >= 1");
  const bool qp = spec.potential.kind == PotentialSpec::Kind::QuasiPeriodic && spec.potential.epsilon != 0.0 &&
                  !spec.potential.fourier.empty();
  if (!qp) samples = 1;
  const int d = spec.potential.dim();
  auto phases = qmc_phases(d, samples, Phase::Zero(d));
  const long lo = -N / 2, hi = lo + N - 1;
  auto table = count_table(E_grid, samples, N, static_cast<double>(N),
                           [&](int s) { return assemble_band(spec, lo, hi, qp ? phases[s] : spec.potential.theta); },
                           exec);
  table.mass = 1.0;
  return table;
}

IdsTable ids_strip(const StripSpec& strip, const std::vector<double>& E_grid, long blocks, int samples, Exec exec) {
  if (blocks < 1 || samples < 1) throw DomainError("ids_strip: need blocks >= 1 and samples >= 1");
  const int d = strip.dim();
  auto phases = qmc_phases(d, samples, Phase::Zero(d));
  const long lo = -blocks / 2, hi = lo + blocks - 1;
  auto table = count_table(E_grid, samples, blocks, static_cast<double>(blocks),
                           [&](int s) { return assemble_strip_band(strip, lo, hi, phases[s]); }, exec);
  table.mass = strip.m();
  return table;
}

namespace {

// antiderivative of log|x - z| in x
double log_antiderivative(double x, cplx z) {
  cplx d = x - z;
  if (std::abs(d) == 0.0) return 0.0;
  return (d * std::log(d) - d).real();
}

}  // namespace

double log_potential(const IdsTable& t, cplx z) {
  if (t.E.size() < 2) throw DomainError("log_potential: IDS table too short");
  if (std::abs(t.N.front()) > 1e-12 || std::abs(t.N.back() - t.mass) > 1e-9)
    throw DomainError("log_potential: energy grid does not cover the spectrum");
  double step = 0.0;
  for (size_t i = 1; i < t.E.size(); ++i) step = std::max(step, t.E[i] - t.E[i - 1]);
  double sum = 0.0;
  for (size_t i = 0; i + 1 < t.E.size(); ++i) {
    double mass = t.N[i + 1] - t.N[i];
    if (mass == 0.0) continue;
    double a = t.E[i], b = t.E[i + 1];
    if (std::abs(z.imag()) < step && z.real() > a - step && z.real() < b + step)
      throw DomainError("log_potential: energy within one grid step of IDS mass");
    sum += mass / (b - a) * (log_antiderivative(b, z) - log_antiderivative(a, z));
  }
  return sum;
}

double thouless_residual(const OperatorSpec& spec, cplx E, const IdsTable& table, double lyap_sum) {
  const int K = spec.hopping.range();
  if (K == 0) throw DomainError("thouless_residual: zero hopping range");
  return std::abs(log_potential(table, E) - std::log(std::abs(spec.hopping.at(K))) - lyap_sum);
}

double thouless_residual(const StripSpec& strip, cplx E, const IdsTable& table, double lyap_sum) {
  return std::abs(log_potential(table, E) - std::log(std::abs(strip.C.determinant())) - lyap_sum);
}

Measure Measure::point(double x, double w) {
  Measure m;
  m.x = {x};
  m.w = {w};
  return m;
}

Measure Measure::uniform(double a, double b, double total, int cells) {
  Measure m;
  m.grid = linspace(a, b, cells + 1);
  m.density.assign(cells + 1, total / (b - a));
  return m;
}

cplx stieltjes(const Measure& mu, cplx z) {
  cplx F = 0.0;
  for (size_t i = 0; i < mu.x.size(); ++i) F += mu.w[i] / (mu.x[i] - z);
  for (size_t i = 0; i + 1 < mu.grid.size(); ++i) {
    double a = mu.grid[i], b = mu.grid[i + 1];
    double ra = mu.density[i];
    double s = (mu.density[i + 1] - ra) / (b - a);
    F += s * (b - a) + (ra + s * (z - a)) * (std::log(b - z) - std::log(a - z));
  }
  return F;
}

const char* trend_name(Trend t) {
  switch (t) {
    case Trend::Diverging: return "diverging";
    case Trend::Saturating: return "saturating";
    case Trend::Vanishing: return "vanishing";
  }
  return "?";
}

namespace {

struct Fit {
  double slope = 0.0, se = 0.0;
};

Fit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += std::log(x[i]);
    sy += std::log(y[i]);
  }
  double mx = sx / n, my = sy / n, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  Fit f;
  f.slope = sxy / sxx;
  if (x.size() > 2) {
    double rss = 0;
    for (size_t i = 0; i < x.size(); ++i) {
      double r = std::log(y[i]) - (my + f.slope * (std::log(x[i]) - mx));
      rss += r * r;
    }
    f.se = std::sqrt(rss / (n - 2) / sxx);
  }
  return f;
}

}  // namespace

AlphaDerivative upper_alpha_derivative(const std::function<cplx(cplx)>& F, double E, double alpha,
                                       const std::vector<double>& eps_grid) {
  if (eps_grid.size() < 2) throw DomainError("upper_alpha_derivative: grid too short");
  auto [lo, hi] = std::minmax_element(eps_grid.begin(), eps_grid.end());
  if (!(*lo > 0) || *hi / *lo < 100.0) throw DomainError("upper_alpha_derivative: eps grid must span two decades");
  AlphaDerivative r;
  for (double e : eps_grid) {
    r.eps.push_back(e);
    r.scaled.push_back(std::pow(e, 1.0 - alpha) * F(cplx(E, e)).imag());
  }
  r.value = *std::max_element(r.scaled.begin(), r.scaled.end());
  std::vector<double> x, y;
  for (size_t i = 0; i < r.eps.size(); ++i)
    if (r.eps[i] <= 10.0 * *lo && r.scaled[i] > 0) {
      x.push_back(r.eps[i]);
      y.push_back(r.scaled[i]);
    }
  if (x.size() < 2) {
    r.slope = 1.0;
    r.trend = Trend::Vanishing;
    return r;
  }
  r.slope = loglog_fit(x, y).slope;
  r.trend = r.slope < -0.1 ? Trend::Diverging : (r.slope > 0.1 ? Trend::Vanishing : Trend::Saturating);
  return r;
}

AlphaDerivative upper_alpha_derivative(const Measure& mu, double E, double alpha, const std::vector<double>& eps_grid) {
  return upper_alpha_derivative([&](cplx z) { return stieltjes(mu, z); }, E, alpha, eps_grid);
}

HolderProbe holder_probe(const IdsTable& t, double E, const std::vector<double>& eps_grid) {
  if (eps_grid.size() < 2) throw DomainError("holder_probe: grid too short");
  double step = 0.0;
  for (size_t i = 1; i < t.E.size(); ++i) step = std::max(step, t.E[i] - t.E[i - 1]);
  double emin = *std::min_element(eps_grid.begin(), eps_grid.end());
  if (step > emin) throw DomainError("holder_probe: IDS grid coarser than the smallest eps");
  HolderProbe h;
  std::vector<double> x, y;
  h.upper_check = true;
  h.c_lower = 1e300;
  for (double e : eps_grid) {
    double d = t.at(E + e) - t.at(E - e);
    h.eps.push_back(e);
    h.increment.push_back(d);
    h.upper_check = h.upper_check && d <= std::sqrt(e);
    h.c_lower = std::min(h.c_lower, d / std::pow(e, 1.5));
    if (d > 1e-12) {
      x.push_back(e);
      y.push_back(d);
    }
  }
  if (x.size() < 2) {
    h.gap = true;
    h.c_lower = 0.0;
    return h;
  }
  Fit f = loglog_fit(x, y);
  h.exponent = f.slope;
  h.ci = 1.96 * f.se;
  return h;
}

void write_ids_csv(const IdsTable& t, const std::string& path, const std::string& footer) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path);
  out << "E,N,truncation,samples\n" << std::setprecision(17);
  for (size_t i = 0; i < t.E.size(); ++i) out << t.E[i] << ',' << t.N[i] << ',' << t.size << ',' << t.samples << '\n';
  out << footer;
}

}  // namespace qps
