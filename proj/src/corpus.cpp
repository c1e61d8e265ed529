#include "qpstrip/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "qpstrip/measures.hpp"
#include "qpstrip/splitting.hpp"
#include "qpstrip/weyl.hpp"

namespace qps {

bool CorpusEntry::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CorpusCheck& c) { return c.pass; });
}

std::vector<double> amo_spectrum_sample(double lambda, int count, double theta) {
  const int q = 987;
  const double a = 610.0 / 987.0;
  RVec diag(q), off(q - 1);
  CMat h = CMat::Zero(q, q);
  for (int n = 0; n < q; ++n) {
    h(n, n) = 2.0 * lambda * std::cos(kTwoPi * (theta + n * a));
    h(n, (n + 1) % q) += 1.0;
    h((n + 1) % q, n) += 1.0;
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    int idx = static_cast<int>(std::lround((i + 0.5) * q / count - 0.5));
    out.push_back(es.eigenvalues()(std::clamp(idx, 0, q - 1)));
  }
  return out;
}

std::vector<CVec> strip_solution(const StripSpec& strip, cplx E, const Phase& t, const CVec& state, long n) {
  Cocycle c = schrodinger_cocycle(strip, E);
  const int m = strip.m();
  std::vector<CVec> u;
  u.push_back(state.head(m));
  CVec x = state;
  for (long j = 0; j < n; ++j) {
    x = c.at(c.shift(t, j)) * x;
    u.push_back(x.head(m));
  }
  return u;
}

double fold_unitarity_defect(const OperatorSpec& spec, long blocks, unsigned seed) {
  const int K = spec.hopping.range();
  const long n = blocks * K;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CVec u(n);
  for (long i = 0; i < n; ++i) u(i) = cplx(g(rng), g(rng));
  auto blocks_v = fold_vector(u, K);
  double d = (unfold_vector(blocks_v) - u).cwiseAbs().maxCoeff();
  double sq = 0.0;
  for (const auto& b : blocks_v) sq += b.squaredNorm();
  d = std::max(d, std::abs(std::sqrt(sq) - u.norm()) / u.norm());
  CMat line = assemble_window(spec, 0, n - 1);
  StripSpec strip = fold_to_strip(spec);
  CMat s = assemble_strip(strip, 0, blocks - 1, spec.potential.theta);
  std::vector<long> perm(n);
  for (long b = 0; b < blocks; ++b)
    for (int i = 0; i < K; ++i) perm[b * K + i] = b * K + K - 1 - i;
  double od = 0.0;
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) od = std::max(od, std::abs(s(i, j) - line(perm[i], perm[j])));
  return std::max(d, od);
}

namespace {

CMat random_unitary(int m, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMat x(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) x(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<CMat> qr(x);
  return qr.householderQ() * CMat::Identity(m, m);
}

}  // namespace

StripSpec random_strip(int m, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.5, 2.0);
  RVec s(m);
  for (int i = 0; i < m; ++i) s(i) = u(rng);
  StripSpec st;
  st.C = random_unitary(m, rng) * s.cast<cplx>().asDiagonal() * random_unitary(m, rng);
  CMat v0(m, m), v1(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      v0(i, j) = cplx(g(rng), g(rng));
      v1(i, j) = 0.5 * cplx(g(rng), g(rng));
    }
  v0 = (0.5 * (v0 + v0.adjoint())).eval();
  st.V = {{{0}, v0}, {{1}, v1}, {{-1}, v1.adjoint()}};
  st.alpha = Phase::Constant(1, kGolden);
  st.validate();
  return st;
}

OperatorSpec random_finite_range(int K, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0), mag(0.3, 1.0), eps(0.2, 2.0), th(0.0, 1.0);
  std::map<int, cplx> pos;
  for (int k = 1; k < K; ++k) pos[k] = cplx(u(rng), u(rng));
  pos[K] = std::polar(mag(rng), kPi * u(rng));
  OperatorSpec spec;
  spec.hopping = HoppingSeq::symmetric(pos, u(rng));
  double e = eps(rng);
  spec.potential = PotentialSpec::cosine(kGolden, th(rng), e);
  return spec;
}

namespace {

CorpusCheck make_check(std::string name, double expected, double tol, std::string source, bool upper_only,
                       const std::function<double()>& f) {
  CorpusCheck c;
  c.name = std::move(name);
  c.expected = expected;
  c.tol = tol;
  c.source = std::move(source);
  c.upper_only = upper_only;
  try {
    c.value = f();
    double dev = upper_only ? c.value - expected : std::abs(c.value - expected);
    c.margin = tol - dev;
    c.pass = std::isfinite(c.value) && c.margin >= 0;
  } catch (const std::exception& e) {
    c.value = std::nan("");
    c.error = e.what();
    c.pass = false;
  }
  return c;
}

double wronskian_defect(const StripSpec& strip, double E, const Phase& t, unsigned seed, long n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  const int m = strip.m();
  CVec a(2 * m), b(2 * m);
  for (int i = 0; i < 2 * m; ++i) {
    a(i) = cplx(g(rng), g(rng));
    b(i) = cplx(g(rng), g(rng));
  }
  auto u = strip_solution(strip, E, t, a, n);
  auto v = strip_solution(strip, E, t, b, n);
  auto tr = wronskian_orbit(strip.C, u, v, 1e-10);
  // deviation in units of the scale-aware tolerance, times 1e-10
  return tr.max_deviation / tr.tolerance * 1e-10;
}

double symplectic_defect(const StripSpec& strip, double E, const Phase& t) {
  Cocycle c = schrodinger_cocycle(strip, E);
  CMat a = c.at(t);
  return (a.adjoint() * c.form->S * a - c.form->S).norm();
}

CorpusEntry free_entry() {
  CorpusEntry e{"free", {}};
  StripSpec s = StripSpec::free_laplacian();
  OperatorSpec op = OperatorSpec::free_laplacian();
  Phase t0 = Phase::Zero(1);
  const double sq5 = std::sqrt(5.0);
  e.checks.push_back(make_check("L1(3)", std::log((3 + sq5) / 2), 5e-3, "eigenvalues of the constant transfer matrix",
                                false, [&] {
                                  return lyapunov_spectrum(schrodinger_cocycle(s, 3.0), 10000, 4).exponents[0];
                                }));
  e.checks.push_back(make_check("Im M+(i)", (sq5 - 1) / 2, 1e-6, "root of zeta^2 - i zeta + 1", false,
                                [&] { return m_plus(s, kI, t0)(0, 0).imag(); }));
  e.checks.push_back(make_check("Im G_i(0,0)", 1 / sq5, 1e-4, "free resolvent i/sqrt5", false,
                                [&] { return m_matrix(s, kI, t0)(0, 0).imag(); }));
  e.checks.push_back(make_check("N(1)", 2.0 / 3.0, 5e-3, "arccos(-E/2)/pi", false, [&] {
    return ids(op, {1.0}, 2048, 1).N[0];
  }));
  e.checks.push_back(make_check("rho(0)", 0.25, 1e-4, "rotation by pi/2", false, [&] {
    return rotation_number(schrodinger_cocycle(s, 0.0), 20000, 4);
  }));
  e.checks.push_back(make_check("wronskian", 0.0, 1e-10, "constancy identity", true,
                                [&] { return wronskian_defect(s, 0.7, t0, 1, 2000); }));
  e.checks.push_back(make_check("fold/unfold", 0.0, 1e-10, "permutation identity", true,
                                [&] { return fold_unitarity_defect(op, 40, 2); }));
  e.checks.push_back(make_check("E^u(3) slope", (3 + sq5) / 2, 1e-6, "eigenvector of the constant matrix", false, [&] {
    Splitting sp = compute_splitting(schrodinger_cocycle(s, 3.0), t0, {1, 0, 1}, 200);
    CMat b = sp.Eu[0].basis();
    return std::abs(b(0, 0) / b(1, 0));
  }));
  return e;
}

CorpusEntry amo_entry(double lambda, const std::string& name) {
  CorpusEntry e{name, {}};
  StripSpec s = StripSpec::amo(lambda, kGolden);
  Phase t0 = Phase::Zero(1);
  auto energies = amo_spectrum_sample(lambda, 5);
  for (size_t i = 0; i < energies.size(); ++i) {
    double E = energies[i];
    std::string tag = "E=" + std::to_string(E);
    if (lambda < 1) {
      e.checks.push_back(make_check("L1 " + tag, 0.0, 5e-3, "subcritical regime, zero exponent on the spectrum", true,
                                    [&] { return lyapunov_spectrum(schrodinger_cocycle(s, E), 10000, 8).exponents[0]; }));
      if (i == 2)
        e.checks.push_back(make_check("max ||A_n||^2, n <= 1e4 " + tag, 0.0, 50.0, "bounded orbit", true, [&] {
          Cocycle c = schrodinger_cocycle(s, E);
          Splitting sp = compute_splitting(c, t0, {0, 2, 0}, 10, 10000);
          return center_growth(c, sp, 10000).back();
        }));
    } else {
      e.checks.push_back(make_check("L1 " + tag, std::log(lambda), 2e-2, "Thouless cross-check, log lambda", false,
                                    [&] { return lyapunov_spectrum(schrodinger_cocycle(s, E), 10000, 8).exponents[0]; }));
    }
    e.checks.push_back(make_check("wronskian " + tag, 0.0, 1e-10, "constancy identity", true,
                                  [&] { return wronskian_defect(s, E, t0, 3 + static_cast<unsigned>(i), 200); }));
  }
  e.checks.push_back(make_check("fold/unfold", 0.0, 1e-10, "permutation identity", true,
                                [&] { return fold_unitarity_defect(OperatorSpec::amo(lambda, kGolden, 0.1), 60, 4); }));
  return e;
}

CorpusEntry random_strip_entry() {
  CorpusEntry e{"random_strip", {}};
  for (int m = 2; m <= 3; ++m)
    for (unsigned seed = 1; seed <= 3; ++seed) {
      StripSpec s = random_strip(m, 100 * m + seed);
      std::string tag = "m=" + std::to_string(m) + " seed=" + std::to_string(seed);
      Phase t = Phase::Constant(1, 0.1 * seed);
      e.checks.push_back(make_check("symplectic " + tag, 0.0, 1e-12, "form preservation", true,
                                    [&] { return symplectic_defect(s, 0.3 * seed - 0.5, t); }));
      e.checks.push_back(make_check("wronskian " + tag, 0.0, 1e-10, "constancy identity", true,
                                    [&] { return wronskian_defect(s, 0.3 * seed - 0.5, t, seed, 200); }));
    }
  return e;
}

CorpusEntry long_range_entry() {
  CorpusEntry e{"long_range", {}};
  for (int K = 1; K <= 3; ++K) {
    OperatorSpec op = random_finite_range(K, 7 * K);
    std::string tag = "K=" + std::to_string(K);
    e.checks.push_back(make_check("fold/unfold " + tag, 0.0, 1e-10, "permutation identity", true,
                                  [&] { return fold_unitarity_defect(op, 30, K); }));
    e.checks.push_back(make_check("wronskian " + tag, 0.0, 1e-10, "constancy identity", true,
                                  [&] { return wronskian_defect(fold_to_strip(op), 0.25, op.potential.theta, K, 100); }));
  }
  // decaying tail cut where the remainder is below 1e-3
  OperatorSpec tail{HoppingSeq::with_power_tail(HoppingSeq::laplacian(), 0.2, 4.0, 1e-3), PotentialSpec::cosine(kGolden, 0.2, 0.3)};
  e.checks.push_back(make_check("fold/unfold tail", 0.0, 1e-10, "permutation identity", true,
                                [&] { return fold_unitarity_defect(tail, 12, 9); }));
  e.checks.push_back(make_check("wronskian tail", 0.0, 1e-10, "constancy identity", true,
                                [&] { return wronskian_defect(fold_to_strip(tail), 0.1, tail.potential.theta, 9, 40); }));
  return e;
}

}  // namespace

std::vector<CorpusEntry> run_corpus(const std::string& filter, Exec exec) {
  std::vector<std::pair<std::string, std::function<CorpusEntry()>>> all = {
      {"free", free_entry},
      {"amo_subcritical", [] { return amo_entry(0.5, "amo_subcritical"); }},
      {"amo_supercritical", [] { return amo_entry(2.0, "amo_supercritical"); }},
      {"random_strip", random_strip_entry},
      {"long_range", long_range_entry},
  };
  std::vector<std::function<CorpusEntry()>> chosen;
  for (auto& [name, f] : all)
    if (filter.empty() || name.find(filter) != std::string::npos) chosen.push_back(f);
  if (chosen.empty()) throw DomainError("run_corpus: no entry matches the filter");
  std::vector<CorpusEntry> out(chosen.size());
  for_each_index(static_cast<long>(chosen.size()), exec, [&](long i) { out[i] = chosen[i](); });
  return out;
}

nlohmann::json corpus_manifest(const std::vector<CorpusEntry>& entries) {
  nlohmann::json j;
  bool all = true;
  for (const auto& e : entries) {
    nlohmann::json je;
    je["name"] = e.name;
    je["pass"] = e.pass();
    all = all && e.pass();
    for (const auto& c : e.checks) {
      nlohmann::json jc = {{"check", c.name},       {"value", c.value}, {"expected", c.expected},
                           {"tol", c.tol},          {"margin", c.margin}, {"source", c.source},
                           {"upper_only", c.upper_only}, {"pass", c.pass}};
      if (!c.error.empty()) jc["error"] = c.error;
      je["checks"].push_back(jc);
    }
    j["entries"].push_back(je);
  }
  j["pass"] = all;
  return j;
}

}  // namespace qps
