#include "qpstrip/symplectic.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace qps {

SympForm SympForm::from_C(const CMat& C) {
  const long m = C.rows();
  if (C.cols() != m) throw DomainError("C must be square");
  SympForm f;
  f.S = CMat::Zero(2 * m, 2 * m);
  f.S.topRightCorner(m, m) = -C.adjoint();
  f.S.bottomLeftCorner(m, m) = C;
  return f;
}

SympForm SympForm::standard(int m) { return from_C(CMat::Identity(m, m)); }

cplx form_value(const SympForm& form, const CVec& x, const CVec& y) {
  if (x.size() != form.dim() || y.size() != form.dim()) throw DomainError("form_value: dimension mismatch");
  return x.dot(form.S * y);  // Eigen's dot conjugates the first argument
}

bool is_hsp(const CMat& a, const SympForm& form, double tol) {
  if (a.rows() != form.dim() || a.cols() != form.dim()) return false;
  return spectral_norm(a.adjoint() * form.S * a - form.S) <= tol;
}

cplx wronskian(const SympForm& form, const CVec& u_pair, const CVec& v_pair) { return form_value(form, u_pair, v_pair); }

WronskianTrace wronskian_orbit(const CMat& C, const std::vector<CVec>& u, const std::vector<CVec>& v, double tol) {
  if (u.size() != v.size() || u.size() < 2) throw DomainError("wronskian_orbit: need matching sequences of length >= 2");
  WronskianTrace t;
  double scale = 0.0;
  for (size_t n = 0; n + 1 < u.size(); ++n) {
    cplx w = u[n].dot(C * v[n + 1]) - u[n + 1].dot(C.adjoint() * v[n]);
    t.values.push_back(w);
    scale = std::max(scale, (u[n].norm() + u[n + 1].norm()) * (v[n].norm() + v[n + 1].norm()));
  }
  for (const cplx& w : t.values) t.max_deviation = std::max(t.max_deviation, std::abs(w - t.values[0]));
  t.tolerance = tol * std::max(1.0, scale * std::max(1.0, spectral_norm(C)));
  t.constant = t.max_deviation <= t.tolerance;
  return t;
}

CMat krein_matrix(const SympForm& form, const CMat& columns) {
  if (columns.rows() != form.dim()) throw DomainError("krein_matrix: dimension mismatch");
  CMat g = kI * (columns.adjoint() * form.S * columns);
  return 0.5 * (g + g.adjoint());
}

namespace {

struct Inertia {
  Eigen::SelfAdjointEigenSolver<CMat> es;
  int pos = 0, neg = 0;
};

Inertia inertia(const SympForm& form, const CMat& columns) {
  Inertia r;
  CMat g = krein_matrix(form, columns);
  r.es.compute(g);
  const RVec& ev = r.es.eigenvalues();
  for (long i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i)) < kKreinTol) throw InvariantError("degenerate subspace: singular Krein matrix");
    (ev(i) > 0 ? r.pos : r.neg)++;
  }
  return r;
}

}  // namespace

int signature(const SympForm& form, const CMat& columns) {
  Inertia r = inertia(form, columns);
  return r.pos - r.neg;
}

CMat krein_normal_form(int k) {
  CMat g = CMat::Zero(2 * k, 2 * k);
  g.topRightCorner(k, k) = -kI * CMat::Identity(k, k);
  g.bottomLeftCorner(k, k) = kI * CMat::Identity(k, k);
  return g;
}

CanonicalBasis canonical_symplectic_basis(const SympForm& form, const CMat& columns) {
  if (columns.cols() % 2 != 0) throw DomainError("canonical basis needs an even-dimensional subspace");
  const int k = static_cast<int>(columns.cols() / 2);
  Inertia r = inertia(form, columns);
  if (r.pos != r.neg) throw InvariantError("canonical basis needs signature zero");
  CanonicalBasis out;
  out.p = k;
  if ((krein_matrix(form, columns) - krein_normal_form(k)).cwiseAbs().maxCoeff() < 1e-14) {
    out.xi = columns;
    return out;
  }
  const RVec& ev = r.es.eigenvalues();  // ascending: negatives first
  const CMat& U = r.es.eigenvectors();
  CMat N(2 * k, 2 * k);
  for (int i = 0; i < k; ++i) {
    N.col(i) = U.col(k + i) / std::sqrt(ev(k + i));
    N.col(k + i) = U.col(i) / std::sqrt(-ev(i));
  }
  const double h = 1.0 / std::sqrt(2.0);
  CMat M(2 * k, 2 * k);
  CMat I = CMat::Identity(k, k);
  M << h * I, -kI * h * I, h * I, kI * h * I;
  out.xi = columns * N * M;
  return out;
}

double reverse_norm_constant(const SympForm& form, const CMat& columns) {
  CanonicalBasis b = canonical_symplectic_basis(form, columns);
  const int twok = static_cast<int>(b.xi.cols());
  const int p = b.p;
  auto nrm = [&](int i) { return b.xi.col(i - 1).norm(); };  // one-based as in the construction
  double s = 0.0;
  for (int i = 1; i <= p; ++i) s += nrm(i + twok - p) * nrm(i);
  for (int i = p + 1; i <= twok; ++i) s += nrm(i - p) * nrm(i);
  return spectral_norm(form.S) * s;
}

ReverseNormReport reverse_norm_check(const SympForm& form, const CMat& a, const CMat& columns) {
  ReverseNormReport r;
  SubspaceFrame V(columns);
  SubspaceFrame aV(a * V.basis());
  r.forward_norm = spectral_norm(a * V.basis());
  r.inverse_norm = spectral_norm(a.partialPivLu().solve(aV.basis()));
  r.c_est = std::max(reverse_norm_constant(form, V.basis()), reverse_norm_constant(form, aV.basis()));
  const double slack = 1e-12 * std::max(r.forward_norm, r.inverse_norm);
  r.holds = r.inverse_norm / r.c_est <= r.forward_norm + slack && r.forward_norm <= r.c_est * r.inverse_norm + slack;
  return r;
}

CMat direct_sum(const CMat& s1, const CMat& s2) {
  if (s1.rows() % 2 || s2.rows() % 2 || s1.rows() != s1.cols() || s2.rows() != s2.cols())
    throw DomainError("direct_sum: inputs must be square of even size");
  const int n1 = static_cast<int>(s1.rows() / 2), n2 = static_cast<int>(s2.rows() / 2);
  if (!is_hsp(s1, SympForm::standard(n1), 1e-10) || !is_hsp(s2, SympForm::standard(n2), 1e-10))
    throw DomainError("direct_sum: non-symplectic input");
  const int n = n1 + n2;
  // position of the i-th coordinate of each input inside the output
  auto pos1 = [&](int i) { return i < n1 ? i : n + (i - n1); };
  auto pos2 = [&](int i) { return i < n2 ? n1 + i : n + n1 + (i - n2); };
  CMat out = CMat::Zero(2 * n, 2 * n);
  for (int i = 0; i < 2 * n1; ++i)
    for (int j = 0; j < 2 * n1; ++j) out(pos1(i), pos1(j)) = s1(i, j);
  for (int i = 0; i < 2 * n2; ++i)
    for (int j = 0; j < 2 * n2; ++j) out(pos2(i), pos2(j)) = s2(i, j);
  return out;
}

CMat hsp_exp(const SympForm& form, const CMat& H) {
  CMat X = form.S.partialPivLu().solve(H);
  return X.exp();
}

}  // namespace qps
