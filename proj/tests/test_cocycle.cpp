#include <doctest.h>

#include <random>

#include "qpstrip/cocycle.hpp"
#include "qpstrip/corpus.hpp"

using namespace qps;

namespace {
const double kL3 = std::log((3.0 + std::sqrt(5.0)) / 2.0);
const Phase kT0 = Phase::Zero(1);
}  // namespace

TEST_CASE("scalar Schroedinger matrices") {
  StripSpec s = StripSpec::free_laplacian();
  CMat a0(2, 2), a3(2, 2);
  a0 << 0, -1, 1, 0;
  a3 << 3, -1, 1, 0;
  CHECK((schrodinger_cocycle(s, 0.0).at(kT0) - a0).norm() == 0.0);
  CHECK((schrodinger_cocycle(s, 3.0).at(kT0) - a3).norm() == 0.0);

  std::mt19937 rng(1);
  std::uniform_real_distribution<double> U(-4, 4);
  StripSpec amo = StripSpec::amo(1.3, kGolden);
  SympForm f = SympForm::from_C(amo.C);
  for (int i = 0; i < 100; ++i) CHECK(is_hsp(schrodinger_cocycle(amo, U(rng)).at(Phase::Constant(1, U(rng))), f));
}

TEST_CASE("finite-range companion cocycle") {
  OperatorSpec op = OperatorSpec::amo(1.0, kGolden, 0.0);
  CMat l = finite_range_cocycle(op, 0.4).at(Phase::Constant(1, 0.2));
  CMat s = schrodinger_cocycle(fold_to_strip(op), 0.4).at(Phase::Constant(1, 0.2));
  CHECK((l - s).norm() < 1e-14);

  OperatorSpec lr = random_finite_range(3, 7);
  const int K = 3;
  Cocycle L = finite_range_cocycle(lr, 0.3);
  Phase t = Phase::Constant(1, 0.17);
  CMat prod = CMat::Identity(2 * K, 2 * K);
  for (int j = 0; j < K; ++j) prod = L.at(L.shift(t, j)) * prod;
  CMat a = schrodinger_cocycle(fold_to_strip(lr), 0.3).at(t);
  CHECK((prod - a).norm() / a.norm() < 1e-10);
  CHECK(std::abs(std::abs(L.at(t).determinant()) - 1.0) < 1e-10);
}

TEST_CASE("iterates") {
  Cocycle c0 = schrodinger_cocycle(StripSpec::free_laplacian(), 0.0);
  CHECK((iterate(c0, kT0, 4).value() - CMat::Identity(2, 2)).norm() < 1e-14);
  Cocycle c3 = schrodinger_cocycle(StripSpec::free_laplacian(), 3.0);
  double r = iterate(c3, kT0, 50).log_norm() / 50;
  CHECK(r >= 0.95);
  CHECK(r <= 0.975);
  Cocycle amo = schrodinger_cocycle(StripSpec::amo(1.5, kGolden), 0.3);
  Phase t = Phase::Constant(1, 0.11);
  CMat fwd = iterate(amo, t, 7).value();
  CMat back = iterate(amo, amo.shift(t, 7), -7).value();
  CHECK((back * fwd - CMat::Identity(2, 2)).norm() < 1e-9 * fwd.norm() * back.norm());
}

TEST_CASE("Lyapunov spectra") {
  CMat d = CMat::Zero(2, 2);
  d(0, 0) = 2;
  d(1, 1) = 0.5;
  auto est = lyapunov_spectrum(constant_cocycle(d, Phase::Constant(1, kGolden)), 1000, 2);
  CHECK(std::abs(est.exponents[0] - std::log(2.0)) < 1e-12);
  CHECK(std::abs(est.exponents[1] + std::log(2.0)) < 1e-12);
  CHECK(std::abs(upper_lyapunov_sum(constant_cocycle(d, Phase::Constant(1, kGolden)), 2, 1000, 2).value) < 1e-12);

  auto free3 = lyapunov_spectrum(schrodinger_cocycle(StripSpec::free_laplacian(), 3.0), 10000, 2);
  CHECK(std::abs(free3.exponents[0] - kL3) < 5e-3);
  CHECK(std::abs(free3.exponents[0] + free3.exponents[1]) < 1e-6);
  auto sum = upper_lyapunov_sum(schrodinger_cocycle(StripSpec::free_laplacian(), 3.0), 2, 10000, 2);
  CHECK(std::abs(sum.value) < 1e-3);
}

TEST_CASE("supercritical AMO at an approximant eigenvalue") {
  auto E = amo_spectrum_sample(2.0, 3);
  for (double e : E) {
    auto est = lyapunov_spectrum(schrodinger_cocycle(StripSpec::amo(2.0, kGolden), e), 10000, 4);
    CHECK(std::abs(est.exponents[0] - std::log(2.0)) < 2e-2);
  }
}

TEST_CASE("acceleration") {
  std::vector<double> y{0.05, 0.1, 0.15, 0.2};
  CMat d = CMat::Zero(2, 2);
  d(0, 0) = 2;
  d(1, 1) = 0.5;
  CHECK(std::abs(acceleration(StripSpec::constant(CMat::Identity(1, 1), CMat::Constant(1, 1, 3.0), kGolden), 0.0, y,
                              4000, 2)
                     .omega) < 1e-6);
  CHECK(std::abs(acceleration(StripSpec::free_laplacian(), 0.0, y, 4000, 2).omega) < 1e-6);
  auto E = amo_spectrum_sample(2.0, 1);
  auto acc = acceleration(StripSpec::amo(2.0, kGolden), E[0], y, 10000, 4);
  CHECK(std::abs(acc.omega - 1.0) < 0.05);
  CHECK(acc.rounded == 1);
}

TEST_CASE("rotation number") {
  CHECK(std::abs(rotation_number(constant_cocycle(rotation(kTwoPi * 0.3), Phase::Constant(1, kGolden)), 2000, 2) -
                 0.3) < 1e-3);
  double r0 = rotation_number(schrodinger_cocycle(StripSpec::free_laplacian(), 0.0), 20000, 2);
  CHECK(std::abs(r0 - 0.25) < 1e-4);
  double rm = rotation_number(schrodinger_cocycle(StripSpec::free_laplacian(), -1.0), 20000, 2);
  double rp = rotation_number(schrodinger_cocycle(StripSpec::free_laplacian(), 1.0), 20000, 2);
  CHECK(rm >= r0);
  CHECK(r0 >= rp);
  // rho = (1 - N(E)) / 2 with N(E) = arccos(-E/2) / pi
  CHECK(std::abs(rm - (1.0 - 1.0 / 3.0) / 2.0) < 1e-3);
  CHECK(std::abs(rp - (1.0 - 2.0 / 3.0) / 2.0) < 1e-3);
}

TEST_CASE("monotonicity identity") {
  StripSpec s = StripSpec::free_laplacian();
  CVec e1(2), e2(2);
  e1 << 1, 0;
  e2 << 0, 1;
  CHECK(std::abs(monotonicity_check(s, 0.0, kT0, e1) + 1.0) < 1e-14);
  CHECK(std::abs(monotonicity_check(s, 0.0, kT0, e2) + 1.0) < 1e-14);

  std::mt19937 rng(2);
  std::uniform_real_distribution<double> U(-3, 3);
  std::normal_distribution<double> G;
  StripSpec r = random_strip(2, 4);
  for (int i = 0; i < 1000; ++i) {
    CVec v = CVec::NullaryExpr(4, [&]() { return cplx(G(rng), G(rng)); });
    double E = U(rng);
    Phase t = Phase::Constant(1, U(rng));
    cplx val = monotonicity_check(r, E, t, v);
    double ref = monotonicity_reference(r, E, t, v);
    CHECK(std::abs(val.imag()) < 1e-10 * std::abs(ref));
    CHECK(val.real() < 0);
    CHECK(std::abs(val - ref) < 1e-10 * std::max(1.0, std::abs(ref)));
  }
}
