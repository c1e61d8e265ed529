// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "qpstrip/corpus.hpp"
#include "qpstrip/longrange.hpp"
#include "qpstrip/measures.hpp"
#include "qpstrip/splitting.hpp"
#include "qpstrip/weyl.hpp"

using namespace qps;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

CMat gaussian(int r, int c, std::mt19937_64& rng) {
  std::normal_distribution<double> G;
  return CMat::NullaryExpr(r, c, [&]() { return cplx(G(rng), G(rng)); });
}

// 1: ||A* S A - S|| < 1e-12 for random strips, real energies and phases.
Outcome symplecticity() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> E(-4, 4), T(0, 1);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    StripSpec s = random_strip(1 + i % 3, 1000 + i);
    Cocycle c = schrodinger_cocycle(s, E(rng));
    CMat a = c.at(Phase::Constant(1, T(rng)));
    worst = std::max(worst, spectral_norm(a.adjoint() * c.form->S * a - c.form->S));
  }
  return {worst < 1e-12, fmt("max defect %.2e over 1000 samples", worst)};
}

// 2: |L_j + L_{2m+1-j}| < 3 spread for random Hermitian-symplectic cocycles.
Outcome lyapunov_pairing() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> E(-3, 3);
  double worst_ratio = 0.0;
  int fails = 0;
  for (int i = 0; i < 50; ++i) {
    const int m = 1 + i % 3;
    StripSpec s = random_strip(m, 2000 + i);
    auto est = lyapunov_spectrum(schrodinger_cocycle(s, E(rng)), 10000, 8);
    for (int j = 0; j < m; ++j) {
      double pair = std::abs(est.exponents[j] + est.exponents[2 * m - 1 - j]);
      double ratio = pair / (3.0 * est.spread);
      worst_ratio = std::max(worst_ratio, ratio);
      if (!(pair < 3.0 * est.spread)) ++fails;
    }
  }
  return {fails == 0, fmt("worst |L_j + L_2m+1-j| / (3 spread) = %.3f", worst_ratio) + ", " +
                          std::to_string(fails) + " violations"};
}

// 3: free Laplacian closed forms.
Outcome free_closed_forms() {
  StripSpec s = StripSpec::free_laplacian();
  OperatorSpec op = OperatorSpec::free_laplacian();
  const Phase t = Phase::Zero(1);
  double L = lyapunov_spectrum(schrodinger_cocycle(s, 3.0), 10000, 4).exponents[0];
  cplx mp = m_plus(s, kI, t)(0, 0);
  cplx g = green_oracle(op, kI, 0, 0, 4001);
  cplx gm = m_matrix(s, kI, t)(0, 0);
  double N1 = ids(op, {1.0}, 2048).N[0];
  double rho = rotation_number(schrodinger_cocycle(s, 0.0), 100000, 4);
  bool ok = std::abs(L - 0.96242) <= 5e-3 && std::abs(mp - cplx(0, 0.6180)) <= 1e-4 + 1e-6 &&
            std::abs(mp - cplx(0, (std::sqrt(5.0) - 1) / 2)) <= 1e-6 && std::abs(g - cplx(0, 0.4472)) <= 1e-4 &&
            std::abs(gm - cplx(0, 0.4472)) <= 1e-4 && std::abs(N1 - 2.0 / 3.0) <= 5e-3 && std::abs(rho - 0.25) <= 1e-4;
  char buf[256];
  std::snprintf(buf, sizeof buf, "L1(3)=%.5f M+(i)=%.7fi G(0,0)=%.5fi (Weyl %.5fi) N(1)=%.5f rho(0)=%.6f", L, mp.imag(),
                g.imag(), gm.imag(), N1, rho);
  return {ok, buf};
}

struct WeylSuite {
  double worst_oracle = 0.0, worst_expansion = 0.0, worst_bound_ratio = 0.0;
  bool bound_ok = true;
};

// 4 and 5 share the suite of 20 random finite-range operators at z = E + 0.01 i.
WeylSuite weyl_suite() {
  static WeylSuite cached;
  static bool done = false;
  if (done) return cached;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> E(-1.5, 1.5);
  for (int i = 0; i < 20; ++i) {
    OperatorSpec op = random_finite_range(1 + i % 3, 4000 + i);
    cplx z(E(rng), 1e-2);
    StripSpec s = fold_to_strip(op);
    WeylData w = weyl_data(s, z, op.potential.theta);
    CMat G = m_matrix_oracle(op, z, 4001);
    const long m = s.m();
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q) {
        CMat a = w.M_z.block(p * m, q * m, m, m), b = G.block(p * m, q * m, m, m);
        cached.worst_oracle = std::max(cached.worst_oracle, (a - b).norm() / b.norm());
      }
    ImMTrace tr = im_m_trace(w);
    cached.worst_expansion = std::max(cached.worst_expansion, std::abs(tr.expansion - tr.direct) / std::max(1.0, tr.direct));
    cached.worst_bound_ratio = std::max(cached.worst_bound_ratio, tr.direct / tr.bound);
    cached.bound_ok = cached.bound_ok && tr.bound_holds;
  }
  done = true;
  return cached;
}

Outcome weyl_oracle() {
  WeylSuite s = weyl_suite();
  return {s.worst_oracle < 1e-2, fmt("max blockwise relative error %.2e over 20 operators", s.worst_oracle)};
}

Outcome im_m_identity() {
  WeylSuite s = weyl_suite();
  return {s.worst_expansion <= 1e-8 && s.bound_ok,
          fmt("max expansion mismatch %.2e", s.worst_expansion) + fmt(", max trace/bound %.3f", s.worst_bound_ratio)};
}

// 6: Thouless residual at 10 off-spectrum energies for two operators.
Outcome thouless() {
  struct Case {
    OperatorSpec op;
    StripSpec strip;
    std::vector<double> grid;
    int samples;
    std::vector<cplx> energies;
  };
  std::vector<Case> cases = {
      {OperatorSpec::free_laplacian(), StripSpec::free_laplacian(), linspace(-2.5, 2.5, 1001), 1,
       {3.0, -3.0, 4.0, -5.0, cplx(0, 1), cplx(0, 2), cplx(1, 0.5), cplx(-1, 0.5), cplx(2, 1), cplx(0.3, 3)}},
      {OperatorSpec::amo(2.0, kGolden, 0.0), StripSpec::amo(2.0, kGolden), linspace(-6.5, 6.5, 2601), 32,
       {7.0, -7.0, 8.0, -10.0, cplx(0, 1), cplx(0, 2), cplx(1, 1), cplx(-2, 1), cplx(3, 2), cplx(0.5, 4)}}};
  double worst = 0.0;
  for (const auto& c : cases) {
    IdsTable t = ids(c.op, c.grid, 2048, c.samples);
    std::vector<double> res(c.energies.size());
    for_each_index(static_cast<long>(c.energies.size()), Exec::Parallel, [&](long i) {
      double L = upper_lyapunov_sum(schrodinger_cocycle(c.strip, c.energies[i]), 1, 20000, 8, Exec::Serial).value;
      res[i] = thouless_residual(c.op, c.energies[i], t, L);
    });
    for (double r : res) worst = std::max(worst, r);
  }
  return {worst < 1e-2, fmt("max residual %.2e over 20 energies", worst)};
}

// 7: subcritical AMO.
Outcome subcritical_amo() {
  StripSpec s = StripSpec::amo(0.5, kGolden);
  auto E = amo_spectrum_sample(0.5, 20);
  std::vector<double> L(E.size());
  for_each_index(static_cast<long>(E.size()), Exec::Parallel, [&](long i) {
    L[i] = lyapunov_spectrum(schrodinger_cocycle(s, E[i]), 10000, 4, -1, Exec::Serial).exponents[0];
  });
  double Lmax = *std::max_element(L.begin(), L.end());

  // center growth along the orbit at a bulk spectrum energy
  const double Ec = E[E.size() / 2 - 1];
  Cocycle c = schrodinger_cocycle(s, Ec);
  Splitting sp = detect_splitting(c, Phase::Zero(1), 1000, 10000);
  double Cmax = center_growth(c, sp, 10000).back();

  std::vector<double> eps{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  SpectralBound jl = spectral_bound(s, Ec, Phase::Zero(1), eps, 1000);
  char buf[256];
  std::snprintf(buf, sizeof buf, "max L1 %.2e at 20 energies; C(n<=1e4) max %.3f at E=%.4f (d_c=%d); JL fit C=%.3g %s",
                Lmax, Cmax, Ec, sp.dims.c, jl.C, jl.holds ? "holds" : "violated");
  return {Lmax < 5e-3 && Cmax <= 50.0 && jl.holds, buf};
}

// 8: supercritical AMO.
Outcome supercritical_amo() {
  StripSpec s = StripSpec::amo(2.0, kGolden);
  auto E = amo_spectrum_sample(2.0, 10);
  std::vector<double> L(E.size());
  for_each_index(static_cast<long>(E.size()), Exec::Parallel, [&](long i) {
    L[i] = lyapunov_spectrum(schrodinger_cocycle(s, E[i]), 20000, 4, -1, Exec::Serial).exponents[0];
  });
  double devL = 0.0;
  for (double l : L) devL = std::max(devL, std::abs(l - std::log(2.0)));

  AccelerationEstimate acc = acceleration(s, E[E.size() / 2], {0.05, 0.1, 0.15, 0.2}, 20000, 4);

  // common-phase difference of the complexified exponent
  auto five = amo_spectrum_sample(2.0, 5);
  std::vector<double> eps{1e-2, 5e-3, 2e-3, 1e-3};
  std::vector<double> worst(five.size(), 1e300);
  for_each_index(static_cast<long>(five.size()), Exec::Parallel, [&](long i) {
    double L0 = lyapunov_spectrum(schrodinger_cocycle(s, five[i]), 100000, 8, -1, Exec::Serial).exponents[0];
    for (double e : eps) {
      double Le = lyapunov_spectrum(schrodinger_cocycle(s, cplx(five[i], e)), 100000, 8, -1, Exec::Serial).exponents[0];
      worst[i] = std::min(worst[i], (Le - L0) / e);
    }
  });
  double slope = *std::min_element(worst.begin(), worst.end());
  char buf[256];
  std::snprintf(buf, sizeof buf, "max |L - log 2| %.2e; omega %.4f; min (L(E+ie)-L(E))/e %.3f", devL, acc.omega, slope);
  return {devL <= 2e-2 && std::abs(acc.omega - 1.0) <= 0.05 && slope >= 0.1, buf};
}

// 9: monotonicity identity on random strips.
Outcome monotonicity() {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> E(-3, 3), T(0, 1);
  double worst = 0.0, worst_imag = 0.0;
  bool negative = true;
  for (int i = 0; i < 1000; ++i) {
    const int m = 1 + i % 3;
    StripSpec s = random_strip(m, 9000 + i);
    CVec v = gaussian(2 * m, 1, rng).col(0).normalized();
    double e = E(rng);
    Phase t = Phase::Constant(1, T(rng));
    cplx val = monotonicity_check(s, e, t, v);
    double ref = monotonicity_reference(s, e, t, v);
    worst = std::max(worst, std::abs(val - ref) / std::max(1.0, std::abs(ref)));
    worst_imag = std::max(worst_imag, std::abs(val.imag()) / std::max(1.0, std::abs(ref)));
    negative = negative && val.real() < 0;
  }
  return {worst <= 1e-10 && worst_imag <= 1e-10 && negative,
          fmt("max relative mismatch %.2e", worst) + fmt(", max imaginary part %.2e", worst_imag)};
}

// Chain f_t(n) = P U_n P^{-1} exp(t B_n) with U_n unitary symplectic and P a fixed symplectic change of frame.
MapChain random_family(int m, long n_max, unsigned seed) {
  std::mt19937_64 rng(seed);
  MapChain ch;
  ch.form = SympForm::standard(m);
  ch.n_max = n_max;
  ch.V.assign(n_max + 2, CMat::Identity(2 * m, 2 * m));
  const CMat& S = ch.form.S;
  CMat h = gaussian(2 * m, 2 * m, rng);
  CMat P = hsp_exp(ch.form, 0.15 * (h + h.adjoint()));
  CMat Pinv = P.inverse();
  std::vector<CMat> F, B;
  for (long n = 0; n <= n_max; ++n) {
    CMat x = gaussian(2 * m, 2 * m, rng);
    CMat H = x + x.adjoint();
    CMat Hc = 0.5 * (H + S * H * S.adjoint());
    F.push_back(P * hsp_exp(ch.form, 0.5 * Hc) * Pinv);
    B.push_back(gaussian(2 * m, 2 * m, rng));
  }
  ch.f = [F, B](long n, double t) -> CMat { return F[n] * CMat(t * B[n]).exp(); };
  return ch;
}

// 10: telescoping suite and the center-variation bound at the free Laplacian.
Outcome telescoping() {
  int fails = 0;
  double tightest = 0.0;
  std::vector<int> bad(100, 0);
  std::vector<double> tight(100, 0.0);
  for_each_index(100, Exec::Parallel, [&](long i) {
    std::mt19937_64 rng(10000 + i);
    std::uniform_real_distribution<double> U(0, 1);
    const long n = 1 + static_cast<long>(999 * U(rng));
    const double t = 0.01 * U(rng);
    MapChain ch = random_family(1 + i % 2, n, static_cast<unsigned>(100 + i));
    double L = sampled_lipschitz(ch, t > 0 ? t : 0.01, 2);
    TelescopingReport r = telescoping_check(ch, L, t, n);
    bad[i] = r.holds ? 0 : 1;
    tight[i] = std::max(r.lhs, r.lhs_inv) / r.rhs;
  });
  for (int i = 0; i < 100; ++i) {
    fails += bad[i];
    tightest = std::max(tightest, tight[i]);
  }
  CenterVariationReport cv =
      center_variation_check(StripSpec::free_laplacian(), 0.0, Phase::Zero(1), {1e-5, 1e-4, 1e-3}, 1000, 400);
  char buf[256];
  std::snprintf(buf, sizeof buf, "%d/100 families violate (max lhs/rhs %.3g); free center variation C2=%.3f", fails,
                tightest, cv.C2);
  return {fails == 0 && cv.holds && cv.C2 <= 10.0, buf};
}

// 11: subordinacy chain for the free Laplacian plus a 1/k^4 tail, with w_0 chosen so that cos(pi n / 2) solves at E = 0.
Outcome subordinacy() {
  OperatorSpec op = OperatorSpec::free_laplacian();
  op.hopping = HoppingSeq::with_power_tail(op.hopping, 1.0, 4.0, 1e-12);
  op.hopping.w[0] = -op.hopping.symbol(0.25).real();
  auto u = [](long n) { return cplx(std::cos(kPi * n / 2.0)); };
  WindowVec phi{0, CVec::Ones(1)};
  SubordinacyReport r = subordinacy_probe(op, 0.0, u, phi, {256, 512, 1024, 2048, 4096});
  double lo = 1e300, hi = 0.0;
  for (const auto& row : r.rows) {
    double q = row.proxy / r.rows.front().proxy;
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  char buf[256];
  std::snprintf(buf, sizeof buf, "hopping range %d, chain %s at all R, proxy ratio in [%.3f, %.3f]",
                op.hopping.range(), r.holds ? "holds" : "fails", lo, hi);
  return {r.holds && lo >= 0.25 && hi <= 4.0, buf};
}

// 12: Wronskian constancy and fold/unfold unitarity across the corpus.
Outcome corpus_invariants() {
  auto entries = run_corpus();
  int checked = 0, failed = 0;
  double worst = 0.0;
  for (const auto& e : entries)
    for (const auto& c : e.checks) {
      if (c.name.find("wronskian") == std::string::npos && c.name.find("fold") == std::string::npos) continue;
      ++checked;
      if (!c.pass) ++failed;
      worst = std::max(worst, c.value);
    }
  return {checked > 0 && failed == 0,
          std::to_string(checked) + " checks, " + std::to_string(failed) + " failed" + fmt(", max value %.2e", worst)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;  // 0 = no runtime limit
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all = {
      {1, "symplecticity", 5, symplecticity},
      {2, "Lyapunov pairing", 120, lyapunov_pairing},
      {3, "free Laplacian closed forms", 60, free_closed_forms},
      {4, "Weyl oracle equivalence", 300, weyl_oracle},
      {5, "Im M expansion identity and bound", 0, im_m_identity},
      {6, "Thouless residual", 0, thouless},
      {7, "subcritical AMO", 600, subcritical_amo},
      {8, "supercritical AMO", 0, supercritical_amo},
      {9, "monotonicity", 0, monotonicity},
      {10, "telescoping suite", 0, telescoping},
      {11, "infinite-range subordinacy", 600, subordinacy},
      {12, "Wronskian and fold invariants", 0, corpus_invariants},
  };
  int failures = 0;
  for (const auto& c : all) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = c.limit_s <= 0 || secs < c.limit_s;
    if (!in_time) o.detail += fmt("; runtime limit %.0f s exceeded", c.limit_s);
    bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("%s criterion %2d %s: %s (%.1f s)\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
