#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "qpstrip/operators.hpp"
#include "qpstrip/parallel.hpp"
#include "qpstrip/symplectic.hpp"

namespace qps {

// Linear cocycle over a rotation on T^d (or over an explicit orbit indexed by Z).
class Cocycle {
 public:
  using Fiber = std::function<CMat(const Phase&)>;

  Cocycle(Phase alpha, int dim, Fiber fiber, bool on_torus = true)
      : alpha_(std::move(alpha)), dim_(dim), fiber_(std::move(fiber)), torus_(on_torus) {}

  int dim() const { return dim_; }
  const Phase& alpha() const { return alpha_; }
  bool on_torus() const { return torus_; }
  CMat at(const Phase& t) const { return fiber_(t); }
  // T^n t
  Phase shift(const Phase& t, long n) const;

  std::optional<SympForm> form;  // preserved form, when known
  cplx energy{0.0};

 private:
  Phase alpha_;
  int dim_;
  Fiber fiber_;
  bool torus_;
};

// e^s Q with ||Q|| = 1
struct ScaledProduct {
  CMat Q;
  double s = 0.0;
  CMat value() const { return std::exp(s) * Q; }
  double log_norm() const { return s; }
};

// A_E(t) = [[C^{-1}(E - V(t + i y)), -C^{-1} C*], [I, 0]]
Cocycle schrodinger_cocycle(const StripSpec& strip, cplx E, double y = 0.0);
// derivative in E, [[C^{-1}, 0], [0, 0]]
CMat schrodinger_energy_derivative(const StripSpec& strip);
// Companion-form cocycle of a finite-range operator, state (u_{n+K-1}, ..., u_{n-K}).
Cocycle finite_range_cocycle(const OperatorSpec& spec, cplx E);
Cocycle constant_cocycle(const CMat& a, const Phase& alpha);

// Product order: A_n = A(T^{n-1} t) ... A(t), A_{-n}(t) = A_n(T^{-n} t)^{-1}.
ScaledProduct iterate(const Cocycle& c, const Phase& t, long n);

struct LyapunovEstimate {
  std::vector<double> exponents;  // descending
  double spread = 0.0;            // max deviation of a sample from the mean
  std::vector<std::vector<double>> per_sample;
};

// QR re-orthonormalization every step; the first `burn` steps align the frame and are not counted.
LyapunovEstimate lyapunov_spectrum(const Cocycle& c, long N, int samples, long burn = -1, Exec exec = Exec::Parallel,
                                   const Phase& shift = Phase());

struct LyapunovSum {
  double value = 0.0;
  double spread = 0.0;
};
LyapunovSum upper_lyapunov_sum(const Cocycle& c, int k, long N, int samples, Exec exec = Exec::Parallel);

struct AccelerationEstimate {
  double omega = 0.0;
  long rounded = 0;
  double fit_residual = 0.0;
  std::vector<double> y, L;
};

// Slope of y -> L_1(A_E(. + i y)) over the grid, divided by 2 pi.
AccelerationEstimate acceleration(const StripSpec& strip, cplx E, const std::vector<double>& y_grid, long N = 20000,
                                  int samples = 8, double max_residual = 1e-3);

// Fibered rotation number of an SL(2, R) cocycle, normalized so rotation by phi gives phi / 2 pi.
double rotation_number(const Cocycle& c, long N, int samples);

// Winding of t -> A(t) e_1 around the circle as t runs over one period (d = 1).
long cocycle_degree(const Cocycle& c, int grid = 4096);

// psi(dA2 v, A2 v) for the two-step cocycle A2 = A_E(t + alpha) A_E(t).
cplx monotonicity_check(const StripSpec& strip, double E, const Phase& t, const CVec& v);
// -|v_1|^2 - |w_1|^2 with w = A_E(t) v
double monotonicity_reference(const StripSpec& strip, double E, const Phase& t, const CVec& v);

// Rotation matrix by angle a.
CMat rotation(double a);

}  // namespace qps
