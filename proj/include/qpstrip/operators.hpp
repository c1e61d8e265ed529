#pragma once

#include <map>
#include <vector>

#include "qpstrip/numerics.hpp"

namespace qps {

// Hopping amplitudes w_k, (Lu)_n = sum_k w_k u_{n+k}.
struct HoppingSeq {
  std::map<int, cplx> w;  // nonzero amplitudes, both signs of k
  double decay_C = 0.0;   // declared |w_k| <= decay_C / |k|^3; 0 for finite range

  cplx at(int k) const;
  int range() const;
  // w(x) = sum_k w_k e^{2 pi i k x}; complex x allowed
  cplx symbol(cplx x) const;
  // sup_k |w_k| |k|^3 over the stored amplitudes
  double measured_decay() const;
  void validate() const;

  static HoppingSeq laplacian();
  // builds w_{-k} = conj(w_k) from the k > 0 entries
  static HoppingSeq symmetric(const std::map<int, cplx>& positive, double w0 = 0.0);
  // adds amplitude / |k|^power for every k != 0, cut where the discarded tail sum < tol
  static HoppingSeq with_power_tail(HoppingSeq base, double amplitude, double power, double tol = 1e-12);
};

struct FourierTerm {
  std::vector<int> k;
  cplx c;
};

struct PotentialSpec {
  enum class Kind { QuasiPeriodic, Explicit };
  Kind kind = Kind::QuasiPeriodic;
  std::vector<FourierTerm> fourier;  // v(t) = sum c_k e^{2 pi i <k, t>}
  Phase alpha = Phase::Zero(1);
  Phase theta = Phase::Zero(1);
  std::vector<double> sequence;  // explicit values v_n, n = first, first + 1, ...
  long first = 0;
  double epsilon = 1.0;

  int dim() const { return static_cast<int>(alpha.size()); }
  // v at the complex point t + i y (y applied to every coordinate)
  cplx eval(const Phase& t, double y = 0.0) const;
  // v_n without the coupling
  double site(long n) const;
  // v_n with the phase replaced
  double site(long n, const Phase& th) const;
  void validate() const;

  static PotentialSpec cosine(double alpha, double theta, double epsilon);
  static PotentialSpec zero();
};

struct OperatorSpec {
  HoppingSeq hopping;
  PotentialSpec potential;

  static OperatorSpec free_laplacian();
  // almost Mathieu: w_{+-1} = 1, v = 2 cos(2 pi (theta + n alpha)), coupling lambda
  static OperatorSpec amo(double lambda, double alpha, double theta);
};

struct MatrixTerm {
  std::vector<int> k;
  CMat c;
};

// Strip operator (Hu)_n = C u_{n+1} + V(theta + n alpha) u_n + C* u_{n-1}.
struct StripSpec {
  CMat C;
  std::vector<MatrixTerm> V;  // V(t) = sum c_k e^{2 pi i <k, t>}
  Phase alpha = Phase::Zero(1);

  int m() const { return static_cast<int>(C.rows()); }
  int dim() const { return static_cast<int>(alpha.size()); }
  CMat potential(const Phase& t, double y = 0.0) const;
  void validate() const;

  static StripSpec constant(const CMat& C, const CMat& V0, double alpha);
  static StripSpec free_laplacian();
  static StripSpec amo(double lambda, double alpha);
};

inline constexpr double kGolden = 0.61803398874989484820;

// Window vector: values on sites lo, lo + 1, ..., lo + v.size() - 1.
struct WindowVec {
  long lo = 0;
  CVec v;
  long hi() const { return lo + static_cast<long>(v.size()) - 1; }
  bool contains(long n) const { return n >= lo && n <= hi(); }
  cplx operator()(long n) const { return contains(n) ? v(n - lo) : cplx(0.0); }
  double norm(long a, long b) const;  // l2 norm over [a, b]
};

// Dirichlet truncation on [-N, N]: entry (i, j) = w_{j-i} + delta_ij eps v_i.
CMat assemble_truncated(const OperatorSpec& spec, long N);
CMat assemble_window(const OperatorSpec& spec, long lo, long hi);
// Upper band storage band[j](i) = h(i, i + j) for the window; requires finite range <= kBandLimit.
std::vector<CVec> assemble_band(const OperatorSpec& spec, long lo, long hi);
// Same for the phase-shifted operator
std::vector<CVec> assemble_band(const OperatorSpec& spec, long lo, long hi, const Phase& th);

// Block truncation of a strip on blocks [lo, hi] at phase th, as a band of width 2m - 1.
std::vector<CVec> assemble_strip_band(const StripSpec& s, long lo, long hi, const Phase& th);
CMat assemble_strip(const StripSpec& s, long lo, long hi, const Phase& th);

// Converts band storage to a dense Hermitian matrix.
CMat band_to_dense(const std::vector<CVec>& band);

StripSpec fold_to_strip(const OperatorSpec& spec);
// Block n = (u_{Kn+K-1}, ..., u_{Kn}); requires length divisible by K.
std::vector<CVec> fold_vector(const CVec& u, int K);
CVec unfold_vector(const std::vector<CVec>& blocks);

// Operator on Z^d with finitely many hoppings and potential m -> w(x + <m, alpha>).
struct LatticeOperator {
  std::map<std::vector<int>, cplx> hopping;  // (Lu)_m = sum_k h_k u_{m+k}
  HoppingSeq potential_symbol;               // the potential is the symbol of this sequence
  Phase alpha;
  Phase x;

  int dim() const { return static_cast<int>(alpha.size()); }
  // Dirichlet truncation on the cube [-N, N]^d, sites in lexicographic order
  CMat assemble(long N) const;
  // d = 1 view as a line operator
  OperatorSpec as_line() const;
};

LatticeOperator dual_operator(const OperatorSpec& spec, const Phase& x);

// (Lu)_n on the interior sub-window where every hopping term is available.
WindowVec apply(const OperatorSpec& spec, const WindowVec& u);
// (Lu)_n for n in [a, b]; u is read as zero outside its window
WindowVec apply_range(const OperatorSpec& spec, const WindowVec& u, long a, long b);

}  // namespace qps
