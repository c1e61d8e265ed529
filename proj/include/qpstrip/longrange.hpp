#pragma once

#include <functional>
#include <vector>

#include <json.hpp>

#include "qpstrip/operators.hpp"

namespace qps {

// W_{[-r, r]}(f, g) = sum_{|n| <= r} (Hf)_n conj(g_n) - f_n conj((Hg)_n)
cplx lagrange_form(const OperatorSpec& spec, const WindowVec& f, const WindowVec& g, long r);

struct LagrangeBounds {
  double lhs = 0.0;             // |sum_{r=1}^R W_{[-r, r]}(f, g)|
  double finite_bound = 0.0;    // (sum_{j <= K} 4j|w_j|) ||f||_{R+K} ||g||_{R+K}; finite range only
  double infinite_bound = 0.0;  // 6 max(1, C) ||f|| + C_R ||f||_{2R} ||g||_{2R}
  bool finite_range = false;
  bool holds = false;
};
LagrangeBounds lagrange_sum_bounds(const OperatorSpec& spec, const WindowVec& f, const WindowVec& g, long R);

// Solves (H - z) v = phi on [lo, hi]: banded LU on |k| <= kBandLimit plus defect correction
// with the remaining hopping tail.
struct TailSolve {
  WindowVec v;
  int iterations = 0;
  double residual = 0.0;  // relative
};
TailSolve solve_window(const OperatorSpec& spec, cplx z, const WindowVec& phi, long lo, long hi, double tol = 1e-12,
                       int max_iter = 60);

struct SubordinacyRow {
  long R = 0;
  double eps = 0.0;
  double v_norm = 0.0, v_norm_2R = 0.0, u_norm_2R = 0.0;
  double pairing_sum = 0.0;  // |sum_{r=1}^R <phi, u>_r|
  double lower = 0.0;        // pairing_sum - eps R ||v||_{2R} ||u||_{2R}
  double w_sum = 0.0;        // |sum_{r=1}^R W_{[-r, r]}(v, u)|
  double upper = 0.0;        // 6 max(1, C) ||v|| + C_R ||v||_{2R} ||u||_{2R}
  double lower_margin = 0.0, upper_margin = 0.0;
  double growth_c = 0.0;     // ||v|| / R^{1 - alpha/2}
  double proxy = 0.0;        // eps^alpha ||v||^2
  double op_s_residual = 0.0;
  double identity_residual = 0.0;  // W_r - <phi, u>_r - i eps <v, u>_r
  int solver_iterations = 0;
  bool holds = false;
};

struct SubordinacyReport {
  double E = 0.0, alpha = 1.0;
  double decay_C = 0.0;
  double u_residual = 0.0;
  std::vector<SubordinacyRow> rows;
  bool holds = false;
};

using SiteFunction = std::function<cplx(long)>;

// u must solve (H - E) u = 0 to 1e-8 on [-2 R_max, 2 R_max]; phi must pair nontrivially with u.
SubordinacyReport subordinacy_probe(const OperatorSpec& spec, double E, const SiteFunction& u, const WindowVec& phi,
                                    const std::vector<long>& R_grid, double alpha = 1.0);

nlohmann::json to_json(const SubordinacyReport& r);

// Vector on the cube [-N, N]^d in lexicographic order (same order as LatticeOperator::assemble).
struct DualVector {
  int d = 1;
  long N = 0;
  CVec values;
  long side() const { return 2 * N + 1; }
  std::vector<long> site(long idx) const;
};

// u~(n) = e^{2 pi i n x} sum_m u_m e^{2 pi i <m, theta + n alpha>} on [lo, hi].
WindowVec duality_transform(const DualVector& u, double x, const Phase& theta, const Phase& alpha, long lo, long hi);

struct DualityCheck {
  WindowVec u;
  double residual = 0.0;  // sup norm of (L - E) u~ on [lo, hi]
  double shell_l1 = 0.0;  // l1 mass within the hopping range of the cube boundary
  double tail = 0.0;      // shell mass relative to the total l1 mass
  double bound = 0.0;     // |eps| sum|v_k| shell_l1 + ||(L^ - E) u|| inside the cube
  bool holds = false;
};

// Requires an even potential (v_{-k} = v_k) so that the transform intertwines L and its dual.
DualityCheck duality_check(const OperatorSpec& spec, const DualVector& u, double E, double x, long lo, long hi,
                           double tail_tol = 1e-2);

struct DualEigen {
  DualVector vec;
  double E = 0.0;
};
// Eigenvector of the truncated dual operator with the largest weight at the origin.
DualEigen dual_localized_eigenvector(const OperatorSpec& spec, double x, long N);
// Restriction to the sub-cube [-n, n]^d.
DualVector restrict_cube(const DualVector& u, long n);

struct GrowthProxy {
  double proxy = 0.0;  // min over the grid of R^{-alpha} sum_{|n| <= R} |u_n|^2
  std::vector<double> values;
  double slope = 0.0;  // log-log slope of values vs R
};
GrowthProxy solution_growth(const WindowVec& u, const std::vector<long>& R_grid, double alpha);

}  // namespace qps
