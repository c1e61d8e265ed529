#pragma once

#include <functional>
#include <vector>

#include "qpstrip/cocycle.hpp"

namespace qps {

struct Dims {
  int u = 0, c = 0, s = 0;
};

// Invariant splitting E^u + E^c + E^s along the orbit t_j = T^j t, j = 0..L.
struct Splitting {
  Dims dims;
  std::vector<Phase> orbit;
  std::vector<SubspaceFrame> Eu, Ec, Es;
  double gap = 0.0;  // per-step singular-value ratio across the weaker of the two cuts
  double invariance_residual = 0.0;
  double min_angle = 0.0;  // smallest principal angle between distinct bundles
  bool symplectic = false;
  long length() const { return static_cast<long>(orbit.size()) - 1; }
};

inline constexpr double kGapThreshold = 1.01;
inline constexpr double kAngleFloor = 1e-2;

// Bundles from N-step windows on both sides; E^c as the psi-complement for symplectic fibers,
// otherwise as the intersection of the center-unstable and center-stable bundles.
Splitting compute_splitting(const Cocycle& c, const Phase& t, Dims dims, long N, long orbit_len = 1);

// Tries d_c = 0, 2, ..., 2m in that order and returns the first splitting with a gap certificate.
Splitting detect_splitting(const Cocycle& c, const Phase& t, long N, long orbit_len = 1);

// Smallest principal angle between E^s(t_j) and the vertical bundle {0} x C^m.
double vertical_angle(const Splitting& s, long j = 0);
// Same for E^u(t_j) and the inverse vertical bundle C^m x {0}.
double inverse_vertical_angle(const Splitting& s, long j = 0);

enum class Bundle { Stable, Unstable };
bool critical_set_test(const Splitting& s, double floor = kAngleFloor, Bundle which = Bundle::Stable, long j = 0);

// Matrices of A(t_j) restricted to the center, in the orthonormal center frames and with the
// hyperbolic components projected out: x -> kappa_{j+1}(A(t_j) Q_c(j)).
std::vector<CMat> center_transport(const Cocycle& c, const Splitting& s);

// C(n) = max_{0 <= s <= n} ||A_s|_{E^c}||^2 for n = 0..n_max.
std::vector<double> center_growth(const Cocycle& c, const Splitting& s, long n_max);

// Chain of subspaces V_1, ..., V_{n+1} and maps f_t(n): V_n -> V_{n+1}.
struct MapChain {
  SympForm form;
  std::vector<CMat> V;  // V[n] spanning columns, n = 1..n_max+1 (V[0] unused)
  std::function<CMat(long n, double t)> f;
  long n_max = 0;
};

struct TelescopingReport {
  double lhs = 0.0;      // ||f_t(n)...f_t(1)|_{V_1}||
  double lhs_inv = 0.0;  // norm of the inverse on the image
  double rhs = 0.0;      // c C(n) exp(c C(n) L t n)
  double c = 0.0, Cn = 0.0, L = 0.0;
  bool holds = false;
};

// Empirical Lipschitz constant of t -> f_t(n)|_{V_n} (and its inverse) sampled on [0, t_max].
double sampled_lipschitz(const MapChain& chain, double t_max, int samples = 8);

TelescopingReport telescoping_check(const MapChain& chain, double L, double t, long n);

struct CenterVariationReport {
  Dims dims;
  double C2 = 0.0;  // fitted constant of the growth bound
  double C3 = 0.0;  // max Lipschitz ratio ||A~_{E+i eps} - A~_E|| / eps
  std::vector<double> eps, lipschitz_ratio, max_norm;
  std::vector<double> Cn;  // C(n) of the real-energy center
  std::vector<std::vector<double>> norms;  // norms[e][n] = ||A~_n|| at eps[e]
  bool holds = false;
};

CenterVariationReport center_variation_check(const StripSpec& strip, double E, const Phase& t,
                                             const std::vector<double>& eps_grid, long n_max, long N = 2000,
                                             double C2_max = 10.0);

}  // namespace qps
