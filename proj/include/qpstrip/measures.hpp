#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qpstrip/operators.hpp"
#include "qpstrip/parallel.hpp"

namespace qps {

// Phase-averaged eigenvalue counting function on an energy grid.
struct IdsTable {
  std::vector<double> E, N;
  long size = 0;     // sites (or blocks for strips) per truncation
  int samples = 0;   // phase samples
  double mass = 1.0; // N(+inf); m for strips
  // piecewise-linear interpolation, clamped outside the grid
  double at(double e) const;
};

IdsTable ids(const OperatorSpec& spec, const std::vector<double>& E_grid, long N, int samples = 32,
             Exec exec = Exec::Parallel);
// Strip IDS k(E) = count / blocks, total mass m.
IdsTable ids_strip(const StripSpec& strip, const std::vector<double>& E_grid, long blocks, int samples = 32,
                   Exec exec = Exec::Parallel);

// Uniform grid with `points` nodes on [a, b].
std::vector<double> linspace(double a, double b, int points);

// int log|z - x| dN(x) with dN spread uniformly inside every grid cell.
double log_potential(const IdsTable& table, cplx z);

// |int log|E - x| dN - log|w_K| - sum_{j <= K} gamma_j|.
double thouless_residual(const OperatorSpec& spec, cplx E, const IdsTable& table, double lyap_sum);
// |int log|E - x| dk - log|det C| - sum_{j <= m} L_j|.
double thouless_residual(const StripSpec& strip, cplx E, const IdsTable& table, double lyap_sum);

// Finite measure given by point masses and/or a piecewise-linear density on a grid.
struct Measure {
  std::vector<double> x, w;             // point masses
  std::vector<double> grid, density;    // density nodes
  static Measure point(double x, double w = 1.0);
  static Measure uniform(double a, double b, double total = 1.0, int cells = 1);
};

cplx stieltjes(const Measure& mu, cplx z);

enum class Trend { Diverging, Saturating, Vanishing };
const char* trend_name(Trend t);

struct AlphaDerivative {
  double value = 0.0;  // max over the grid
  std::vector<double> eps, scaled;
  double slope = 0.0;  // log-log slope over the finest decade
  Trend trend = Trend::Saturating;
};
AlphaDerivative upper_alpha_derivative(const std::function<cplx(cplx)>& F, double E, double alpha,
                                       const std::vector<double>& eps_grid);
AlphaDerivative upper_alpha_derivative(const Measure& mu, double E, double alpha, const std::vector<double>& eps_grid);

struct HolderProbe {
  bool gap = false;
  double exponent = 0.0;
  double ci = 0.0;               // 95% half-width of the slope
  bool upper_check = false;      // increments <= eps^{1/2} on the grid
  double c_lower = 0.0;          // min increment / eps^{3/2}
  std::vector<double> eps, increment;
};
HolderProbe holder_probe(const IdsTable& table, double E, const std::vector<double>& eps_grid);

void write_ids_csv(const IdsTable& table, const std::string& path, const std::string& footer);

}  // namespace qps
