#pragma once

#include <array>
#include <vector>

#include "qpstrip/cocycle.hpp"
#include "qpstrip/splitting.hpp"

namespace qps {

struct HalfLineOptions {
  long n_start = 64;
  long n_max = 2000000;
  double tol = 1e-12;  // subspace change between doublings
};

// M+ = -C F+(1) from the stable subspace at T t, M- = C F-(1) from the unstable one.
CMat m_plus(const StripSpec& strip, cplx z, const Phase& t, const HalfLineOptions& opt = {});
CMat m_minus(const StripSpec& strip, cplx z, const Phase& t, const HalfLineOptions& opt = {});

// Whole-line block matrix [[G(0,0), G(0,1)], [G(1,0), G(1,1)]] from M+ and M-.
CMat m_matrix(const CMat& C, const CMat& Mp, const CMat& Mm);
CMat m_matrix(const StripSpec& strip, cplx z, const Phase& t, const HalfLineOptions& opt = {});

struct WeylData {
  cplx z;
  CMat C, M_plus, M_minus, M_z;
};
WeylData weyl_data(const StripSpec& strip, cplx z, const Phase& t, const HalfLineOptions& opt = {});

// (A - A*) / 2i
CMat im_part(const CMat& a);
// ||N|| ||N^{-1}||
double conformal_coefficient(const CMat& a);

struct ImMTrace {
  double expansion = 0.0;  // four-term expansion
  double direct = 0.0;     // trace of Im M_z
  double bound = 0.0;      // conformal-coefficient upper bound
  std::array<double, 4> terms{};
  double kappa = 0.0;  // max conformal coefficient of Im M+, Im M-
  bool agrees = false;
  bool bound_holds = false;
};
// Throws DomainError when Im M+ or Im M- is not positive definite.
ImMTrace im_m_trace(const WeylData& w, double tol = 1e-8);

// Green matrix block G_z(p, q) of the strip truncated to blocks [-N/2, N/2]; the truncation
// is validated by doubling unless tol <= 0.
CMat green_block(const StripSpec& strip, cplx z, const Phase& t, long p, long q, long N, double tol = 1e-6);
// Entry G_z(p, q) of a finite-range line operator truncated to N sites centered at 0.
cplx green_oracle(const OperatorSpec& spec, cplx z, long p, long q, long N, double tol = 1e-6);
// M_z of the folded strip computed from the line resolvent (sites Kp + K - 1 - i).
CMat m_matrix_oracle(const OperatorSpec& spec, cplx z, long N, double tol = 1e-6);

// |Im <v, phi> - Im z ||v||^2| / (|Im z| ||v||^2) for v = (h - z)^{-1} phi.
double op_s_residual(const std::vector<CVec>& band, cplx z, const CVec& phi);

// Lower criterion Tr Im M+ >= C5^{-1} (m + Tr C^{-1} M+ M+* C^{-*}) with C5 = C4 C(3/eps)^3:
// C4 is fitted on the coarse half of the eps grid and checked on the fine half.
struct CriterionFit {
  std::vector<double> eps, ratio, growth;  // ratio = rhs-sum / Tr Im M+, growth = C(3/eps)^3
  double C4 = 0.0;
  double C5_max = 0.0;
  bool holds = false;
};
CriterionFit imm_criterion(const StripSpec& strip, double E, const Phase& t, const std::vector<double>& eps_grid,
                           long N = 2000);

// mu_bound = eps Tr Im M_{E+i eps}; jl_rhs = eps C sup_{|s| <= 3/eps} ||A_s|_{E^c}||^42.
struct SpectralBound {
  std::vector<double> eps, mu_bound, center_sup, jl_rhs;
  double C = 0.0;  // fitted on the coarse half of the grid
  Dims dims;
  double angle_s = 0.0, angle_u = 0.0;
  bool holds = false;
};
SpectralBound spectral_bound(const StripSpec& strip, double E, const Phase& t, const std::vector<double>& eps_grid,
                             long N = 2000, double floor = kAngleFloor);

// sup_{|s| <= S} ||A_s(t)|_{E^c}|| using a splitting along the orbit T^{-S} t .. T^{S} t.
double center_sup(const Cocycle& c, const Phase& t, long S, long N, Dims* dims_out = nullptr);

}  // namespace qps
