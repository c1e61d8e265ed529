#include <doctest.h>

#include <random>

#include "qpstrip/corpus.hpp"
#include "qpstrip/weyl.hpp"

using namespace qps;

namespace {
const Phase kT0 = Phase::Zero(1);
const StripSpec kFree = StripSpec::free_laplacian();
}  // namespace

TEST_CASE("free Weyl functions at z = i") {
  cplx mp = m_plus(kFree, kI, kT0)(0, 0);
  cplx mm = m_minus(kFree, kI, kT0)(0, 0);
  CHECK(std::abs(mp - cplx(0, (std::sqrt(5.0) - 1) / 2)) < 1e-6);
  CHECK(std::abs(mm - cplx(0, (std::sqrt(5.0) + 1) / 2)) < 1e-6);
  CHECK(std::abs(mp + mm - cplx(0, std::sqrt(5.0))) < 1e-6);
  CMat M = m_matrix(kFree, kI, kT0);
  CHECK(std::abs(M(0, 0) - kI / std::sqrt(5.0)) < 1e-4);
  CHECK(im_part(M).trace().real() > 0);
}

TEST_CASE("free M+ at real z outside the spectrum") {
  CHECK(std::abs(m_plus(kFree, 5.0, kT0)(0, 0) + (5 - std::sqrt(21.0)) / 2) < 1e-6);
}

TEST_CASE("Herglotz on random strips") {
  for (unsigned seed = 0; seed < 100; ++seed) {
    StripSpec s = random_strip(1 + seed % 3, seed);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(-2, 2);
    cplx z(U(rng), 0.1);
    Phase t = Phase::Constant(1, 0.5 + 0.25 * U(rng));
    Eigen::SelfAdjointEigenSolver<CMat> a(im_part(m_plus(s, z, t))), b(im_part(m_minus(s, z, t)));
    CHECK(a.eigenvalues()(0) > 0);
    CHECK(b.eigenvalues()(0) > 0);
  }
}

TEST_CASE("M_z against the truncated resolvent") {
  for (unsigned seed = 0; seed < 3; ++seed) {
    OperatorSpec op = random_finite_range(1 + seed, 100 + seed);
    cplx z(0.3, 1e-2);
    CMat M = m_matrix(fold_to_strip(op), z, op.potential.theta);
    CMat G = m_matrix_oracle(op, z, 4001);
    CHECK((M - G).norm() / G.norm() < 1e-2);
  }
}

TEST_CASE("Im M expansion and bound") {
  ImMTrace f = im_m_trace(weyl_data(kFree, kI, kT0));
  CHECK(std::abs(f.expansion - f.direct) < 1e-10);
  CHECK(f.kappa == doctest::Approx(1.0));
  CHECK(f.bound_holds);
  for (unsigned seed = 0; seed < 10; ++seed) {
    StripSpec s = random_strip(2 + seed % 2, 50 + seed);
    ImMTrace r = im_m_trace(weyl_data(s, cplx(0.2, 0.05), Phase::Constant(1, 0.3)));
    CHECK(r.agrees);
    CHECK(r.bound_holds);
  }
}

TEST_CASE("Green function identities") {
  OperatorSpec op = OperatorSpec::amo(1.2, kGolden, 0.1);
  auto band = assemble_band(op, -200, 200);
  std::mt19937 rng(4);
  std::normal_distribution<double> G;
  for (int i = 0; i < 5; ++i) {
    CVec phi = CVec::NullaryExpr(401, [&]() { return cplx(G(rng), G(rng)); });
    CHECK(op_s_residual(band, cplx(0.4, 0.3), phi) < 1e-10);
  }
  CHECK(std::abs(green_oracle(OperatorSpec::free_laplacian(), kI, 0, 0, 4001) - kI / std::sqrt(5.0)) < 1e-4);
  StripSpec s = random_strip(2, 8);
  cplx z(0.1, 0.2);
  Phase t = Phase::Constant(1, 0.4);
  CMat a = green_block(s, z, t, 0, 3, 400);
  CMat b = green_block(s, std::conj(z), t, 3, 0, 400);
  CHECK((a - b.adjoint()).norm() < 1e-10);
}

TEST_CASE("spectral bound and criterion fits") {
  SpectralBound b = spectral_bound(kFree, 0.0, kT0, {1e-1, 3e-2, 1e-2}, 400);
  CHECK(b.holds);
  for (size_t i = 0; i < b.eps.size(); ++i) {
    CHECK(b.mu_bound[i] / b.eps[i] <= 10.0);
    CHECK(std::abs(b.center_sup[i] - 1.0) < 1e-8);
  }
  double a1 = im_part(m_matrix(kFree, cplx(3, 1e-2), kT0)).trace().real();
  double a2 = im_part(m_matrix(kFree, cplx(3, 1e-3), kT0)).trace().real();
  CHECK(std::abs(a1 / a2 - 10.0) < 0.05);

  CriterionFit f = imm_criterion(kFree, 0.5, kT0, {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}, 400);
  CHECK(f.holds);
}
