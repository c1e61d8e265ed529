#include <doctest.h>

#include <random>

#include "qpstrip/operators.hpp"

using namespace qps;

TEST_CASE("free Laplacian truncation") {
  CMat h = assemble_truncated(OperatorSpec::free_laplacian(), 1);
  CMat ref(3, 3);
  ref << 0, 1, 0, 1, 0, 1, 0, 1, 0;
  CHECK((h - ref).norm() == 0.0);
}

TEST_CASE("AMO diagonal") {
  const double lambda = 0.7, alpha = kGolden, theta = 0.13;
  CMat h = assemble_truncated(OperatorSpec::amo(lambda, alpha, theta), 5);
  for (int n = -5; n <= 5; ++n)
    CHECK(std::abs(h(n + 5, n + 5).real() - 2 * lambda * std::cos(kTwoPi * (theta + n * alpha))) < 1e-13);
}

TEST_CASE("complex hopping gives an exactly Hermitian matrix") {
  OperatorSpec op = OperatorSpec::free_laplacian();
  op.hopping.w[2] = kI;
  op.hopping.w[-2] = -kI;
  CMat h = assemble_truncated(op, 6);
  CHECK((h - h.adjoint()).norm() == 0.0);
}

TEST_CASE("folding a range-1 operator recovers the scalar strip") {
  OperatorSpec op = OperatorSpec::amo(1.3, kGolden, 0.0);
  StripSpec s = fold_to_strip(op);
  REQUIRE(s.m() == 1);
  CHECK(std::abs(s.C(0, 0) - 1.0) < 1e-15);
  Phase t = Phase::Constant(1, 0.21);
  CHECK(std::abs(s.potential(t)(0, 0).real() - 2.6 * std::cos(kTwoPi * 0.21)) < 1e-12);
}

TEST_CASE("folding K = 2") {
  OperatorSpec op;
  const double a = 0.37;
  op.hopping = HoppingSeq::symmetric({{1, a}, {2, 1.0}});
  op.potential = PotentialSpec::zero();
  StripSpec s = fold_to_strip(op);
  CMat ref(2, 2);
  ref << 1, a, 0, 1;
  CHECK((s.C - ref).norm() < 1e-15);
}

TEST_CASE("folded spectrum equals line spectrum") {
  OperatorSpec op;
  op.hopping = HoppingSeq::symmetric({{1, 0.6}, {2, cplx(0.3, 0.2)}, {3, 0.4}}, 0.1);
  op.potential = PotentialSpec::cosine(kGolden, 0.3, 0.8);
  const int K = 3;
  const long blocks = 10;
  StripSpec s = fold_to_strip(op);
  CMat strip = assemble_strip(s, 0, blocks - 1, op.potential.theta);
  CMat line = assemble_window(op, 0, K * blocks - 1);
  Eigen::SelfAdjointEigenSolver<CMat> a(strip, Eigen::EigenvaluesOnly), b(line, Eigen::EigenvaluesOnly);
  CHECK((a.eigenvalues() - b.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("fold and unfold") {
  CVec u(4);
  u << 0, 1, 2, 3;
  auto b = fold_vector(u, 2);
  REQUIRE(b.size() == 2);
  CHECK(b[0](0) == cplx(1));
  CHECK(b[0](1) == cplx(0));
  CHECK(b[1](0) == cplx(3));
  CHECK(b[1](1) == cplx(2));

  std::mt19937 rng(9);
  std::normal_distribution<double> G;
  for (int trial = 0; trial < 100; ++trial) {
    CVec x = CVec::NullaryExpr(12, [&]() { return cplx(G(rng), G(rng)); });
    auto f = fold_vector(x, 3);
    double n2 = 0;
    for (const auto& v : f) n2 += v.squaredNorm();
    CHECK(std::abs(std::sqrt(n2) - x.norm()) < 1e-14 * x.norm() + 1e-15);
    CHECK((unfold_vector(f) - x).norm() == 0.0);
  }
  CHECK_THROWS_AS(fold_vector(CVec::Zero(5), 2), DomainError);
}

TEST_CASE("dual of the cosine potential") {
  OperatorSpec op = OperatorSpec::amo(1.0, kGolden, 0.0);
  LatticeOperator d = dual_operator(op, Phase::Constant(1, 0.1));
  REQUIRE(d.dim() == 1);
  for (const auto& [k, h] : d.hopping) {
    if (k[0] == 1 || k[0] == -1)
      CHECK(std::abs(h - 1.0) < 1e-15);
    else
      CHECK(std::abs(h) < 1e-15);
  }
  // self-duality at lambda = 1: the dual potential is again 2 cos
  OperatorSpec line = d.as_line();
  CHECK(std::abs(line.hopping.at(1) - 1.0) < 1e-15);
  CHECK(std::abs(line.potential.eval(Phase::Constant(1, 0.0)) - 2.0) < 1e-14);
}

TEST_CASE("apply: delta and plane waves") {
  OperatorSpec op = OperatorSpec::free_laplacian();
  WindowVec d{-2, CVec::Zero(5)};
  d.v(2) = 1;
  WindowVec r = apply_range(op, d, -2, 2);
  CHECK(r(1) == cplx(1));
  CHECK(r(-1) == cplx(1));
  CHECK(r(0) == cplx(0));

  OperatorSpec lr;
  lr.hopping = HoppingSeq::symmetric({{1, 0.5}, {2, cplx(0.1, 0.3)}, {5, 0.05}}, 0.2);
  lr.potential = PotentialSpec::zero();
  const double x = 0.137;
  WindowVec u{-30, CVec(61)};
  for (long n = -30; n <= 30; ++n) u.v(n + 30) = std::exp(kTwoPi * kI * (x * n));
  WindowVec lu = apply(lr, u);
  cplx sym = lr.hopping.symbol(x);
  for (long n = lu.lo; n <= lu.hi(); ++n) CHECK(std::abs(lu(n) - sym * u(n)) < 1e-12);

  OperatorSpec amo = OperatorSpec::amo(0.8, kGolden, 0.4);
  CMat h = assemble_window(amo, -30, 30);
  CVec hu = h * u.v;
  WindowVec au = apply(amo, u);
  for (long n = au.lo; n <= au.hi(); ++n) CHECK(std::abs(au(n) - hu(n + 30)) < 1e-12);
}
