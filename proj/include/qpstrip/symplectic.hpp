#pragma once

#include <vector>

#include "qpstrip/numerics.hpp"

namespace qps {

// psi(x, y) = x* S y with S = [[0, -C*], [C, 0]].
struct SympForm {
  CMat S;

  static SympForm from_C(const CMat& C);
  static SympForm standard(int m);
  int dim() const { return static_cast<int>(S.rows()); }
};

inline constexpr double kKreinTol = 1e-10;

cplx form_value(const SympForm& form, const CVec& x, const CVec& y);

bool is_hsp(const CMat& a, const SympForm& form, double tol = 1e-12);

// W = u*(n) C v(n+1) - u*(n+1) C* v(n) for the pairs (u(n+1), u(n)), (v(n+1), v(n)).
cplx wronskian(const SympForm& form, const CVec& u_pair, const CVec& v_pair);

struct WronskianTrace {
  std::vector<cplx> values;
  double max_deviation = 0.0;  // max |W(n) - W(0)|
  double tolerance = 0.0;
  bool constant = false;
};

// u[n], v[n] in C^m for n = 0..N; tolerance scaled by the accumulated solution norms.
WronskianTrace wronskian_orbit(const CMat& C, const std::vector<CVec>& u, const std::vector<CVec>& v, double tol = 1e-10);

// G = i (psi(v_i, v_j)) for the columns of the frame.
CMat krein_matrix(const SympForm& form, const CMat& columns);
// #positive - #negative eigenvalues; throws InvariantError on a degenerate subspace.
int signature(const SympForm& form, const CMat& columns);

struct CanonicalBasis {
  CMat xi;  // 2k columns with Krein matrix [[0, -iI], [iI, 0]]
  int p = 0;
};

// Normal form of a signature-zero symplectic subspace.
CMat krein_normal_form(int k);
CanonicalBasis canonical_symplectic_basis(const SympForm& form, const CMat& columns);

// c(V) from the norms of a canonical basis.
double reverse_norm_constant(const SympForm& form, const CMat& columns);

struct ReverseNormReport {
  double c_est = 0.0;
  double inverse_norm = 0.0;  // ||a^{-1}|_{aV}||
  double forward_norm = 0.0;  // ||a|_V||
  bool holds = false;
};

ReverseNormReport reverse_norm_check(const SympForm& form, const CMat& a, const CMat& columns);

// Interleaved direct sum of matrices in HSp(2 n1) and HSp(2 n2) (standard forms).
CMat direct_sum(const CMat& s1, const CMat& s2);

// exp(S^{-1} H) for Hermitian H lies in the group preserving the form.
CMat hsp_exp(const SympForm& form, const CMat& H);

}  // namespace qps
