#include <doctest.h>

#include <random>

#include "qpstrip/longrange.hpp"

using namespace qps;

namespace {
WindowVec delta(long site, long lo, long hi) {
  WindowVec w{lo, CVec::Zero(hi - lo + 1)};
  w.v(site - lo) = 1.0;
  return w;
}
WindowVec random_window(long lo, long hi, long support, std::mt19937& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> U(-1, 1);
  WindowVec w{lo, CVec::Zero(hi - lo + 1)};
  for (long n = -support; n <= support; ++n) w.v(n - lo) = scale * cplx(U(rng), U(rng)) / std::sqrt(2.0);
  return w;
}
OperatorSpec tail_operator(double amplitude) {
  OperatorSpec op = OperatorSpec::free_laplacian();
  op.hopping = HoppingSeq::with_power_tail(op.hopping, amplitude, 4.0, 1e-6);
  return op;
}
}  // namespace

TEST_CASE("Lagrange form boundary bookkeeping") {
  OperatorSpec free = OperatorSpec::free_laplacian();
  for (long r = 1; r <= 4; ++r) CHECK(std::abs(lagrange_form(free, delta(0, -10, 10), delta(0, -10, 10), r)) < 1e-15);
  const long r = 5;
  WindowVec ones{-10, CVec::Ones(21)};
  CHECK(std::abs(lagrange_form(free, delta(r, -10, 10), ones, r) + 1.0) < 1e-15);

  std::mt19937 rng(3);
  OperatorSpec amo = OperatorSpec::amo(1.1, kGolden, 0.2);
  WindowVec f = random_window(-20, 20, 20, rng), g = random_window(-20, 20, 20, rng);
  CHECK(std::abs(lagrange_form(amo, f, g, 8) + std::conj(lagrange_form(amo, g, f, 8))) < 1e-12);
}

TEST_CASE("Lagrange sum bounds") {
  std::mt19937 rng(5);
  OperatorSpec amo = OperatorSpec::amo(0.7, kGolden, 0.1);
  const long R = 40;
  for (int i = 0; i < 10; ++i) {
    WindowVec f = random_window(-3 * R, 3 * R, R / 2, rng), g = random_window(-3 * R, 3 * R, R / 2, rng);
    LagrangeBounds b = lagrange_sum_bounds(amo, f, g, R);
    CHECK(b.finite_range);
    CHECK(b.holds);
  }
  OperatorSpec tail = tail_operator(1.0);
  const long K = tail.hopping.range();
  for (int i = 0; i < 5; ++i) {
    WindowVec f = random_window(-2 * R - K, 2 * R + K, 2 * R, rng), g = random_window(-2 * R - K, 2 * R + K, 2 * R, rng);
    LagrangeBounds b = lagrange_sum_bounds(tail, f, g, R);
    CHECK_FALSE(b.finite_range);
    CHECK(b.holds);
  }
  WindowVec zero{-3 * R, CVec::Zero(6 * R + 1)};
  LagrangeBounds z = lagrange_sum_bounds(amo, zero, zero, R);
  CHECK(z.lhs == 0.0);
  CHECK(z.finite_bound == 0.0);
  CHECK(z.infinite_bound == 0.0);
}

TEST_CASE("tail solver agrees with a dense solve") {
  OperatorSpec op = tail_operator(0.5);
  const long lo = -150, hi = 150;
  WindowVec phi = delta(0, -2, 2);
  cplx z(0.2, 0.05);
  TailSolve s = solve_window(op, z, phi, lo, hi);
  CMat h = assemble_window(op, lo, hi);
  CVec rhs = CVec::Zero(hi - lo + 1);
  rhs(-lo) = 1.0;
  CVec ref = solve_shifted(h, z, rhs);
  CHECK((s.v.v - ref).norm() < 1e-10 * ref.norm());
}

TEST_CASE("subordinacy probe on the free Laplacian") {
  OperatorSpec free = OperatorSpec::free_laplacian();
  auto u = [](long n) { return cplx(std::cos(kPi * n / 2.0)); };
  WindowVec phi = delta(0, 0, 0);
  SubordinacyReport r = subordinacy_probe(free, 0.0, u, phi, {256, 512, 1024, 2048, 4096});
  CHECK(r.holds);
  for (const auto& row : r.rows) {
    CHECK(row.proxy > 0);
    CHECK(row.proxy / r.rows.front().proxy < 4.0);
    CHECK(row.proxy / r.rows.front().proxy > 0.25);
    CHECK(row.identity_residual < 1e-8);
  }
  CHECK_THROWS_AS(subordinacy_probe(free, 3.0, u, phi, {256}), DomainError);
  CHECK_THROWS_AS(subordinacy_probe(free, 0.0, u, delta(1, 1, 1), {256}), DomainError);
}

TEST_CASE("duality transform") {
  OperatorSpec op = OperatorSpec::amo(1.0, kGolden, 0.3);
  op.potential.epsilon = 0.0;
  const double x = 0.17;
  DualVector d{1, 2, CVec::Zero(5)};
  d.values(2) = 1.0;
  DualityCheck c = duality_check(op, d, 2 * std::cos(kTwoPi * x), x, -50, 50);
  CHECK(c.residual < 1e-12);
  for (long n = -50; n <= 50; ++n) CHECK(std::abs(c.u(n) - std::exp(kI * kTwoPi * (x * n))) < 1e-12);

  std::mt19937 rng(8);
  std::normal_distribution<double> G;
  DualVector u{1, 5, CVec::NullaryExpr(11, [&]() { return cplx(G(rng), G(rng)); })};
  Phase th = Phase::Constant(1, 0.3), al = Phase::Constant(1, kGolden);
  WindowVec t = duality_transform(u, x, th, al, -200, 200);
  CMat V(401, 11);
  CVec y(401);
  for (long n = -200; n <= 200; ++n) {
    y(n + 200) = t(n) * std::exp(-kI * kTwoPi * (x * n));
    for (long m = -5; m <= 5; ++m) V(n + 200, m + 5) = std::exp(kI * kTwoPi * (m * (0.3 + n * kGolden)));
  }
  CVec back = V.colPivHouseholderQr().solve(y);
  CHECK((back - u.values).norm() < 1e-10);
}

TEST_CASE("dual of subcritical AMO gives a localized eigenvector") {
  OperatorSpec op = OperatorSpec::amo(0.5, kGolden, 0.0);
  DualEigen de = dual_localized_eigenvector(op, 0.1, 60);
  DualityCheck c = duality_check(op, de.vec, de.E, 0.1, -512, 512);
  CHECK(c.residual <= 1e-4);
  CHECK(c.holds);
  OperatorSpec odd = op;
  odd.potential.fourier = {{{1}, cplx(0, 1)}, {{-1}, cplx(0, -1)}};
  CHECK_THROWS_AS(duality_check(odd, de.vec, de.E, 0.1, -10, 10), DomainError);
}

TEST_CASE("solution growth proxy") {
  const long W = 2000;
  std::vector<long> R{100, 200, 400, 800, 1600};
  WindowVec c{-W, CVec(2 * W + 1)}, d = delta(0, -W, W), lin{-W, CVec(2 * W + 1)};
  for (long n = -W; n <= W; ++n) {
    c.v(n + W) = std::cos(0.7 * n);
    lin.v(n + W) = static_cast<double>(n);
  }
  GrowthProxy g = solution_growth(c, R, 1.0);
  CHECK(g.proxy > 0);
  CHECK(g.proxy <= 2.0 + 1e-12);
  CHECK(solution_growth(d, R, 1.0).values.back() < 1e-3);
  GrowthProxy l = solution_growth(lin, R, 3.0);
  for (double v : l.values) CHECK(v < 1.0);
}
