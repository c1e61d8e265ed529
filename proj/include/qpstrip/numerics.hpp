#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qps {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using Phase = Eigen::VectorXd;

// Error classes map onto CLI exit codes: DomainError -> 1, ConvergenceError -> 2,
// InvariantError -> 3.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : Error {
  using Error::Error;
};
struct ConvergenceError : Error {
  using Error::Error;
};
struct InvariantError : Error {
  using Error::Error;
};

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline const cplx kI{0.0, 1.0};

// relative rank tolerance for frames
inline constexpr double kRankTol = 1e-10;
// bandwidth up to which the banded kernels are used
inline constexpr int kBandLimit = 64;

// Orthonormal column frame of a subspace of C^n.
class SubspaceFrame {
 public:
  SubspaceFrame() = default;
  // Orthonormalizes the columns; throws DomainError if they are dependent.
  explicit SubspaceFrame(const CMat& spanning);
  static SubspaceFrame empty(int ambient);
  static SubspaceFrame from_orthonormal(CMat q);

  int ambient() const { return n_; }
  int rank() const { return static_cast<int>(q_.cols()); }
  const CMat& basis() const { return q_; }
  CMat projector() const { return q_ * q_.adjoint(); }

 private:
  CMat q_;
  int n_ = 0;
};

// Angles in [0, pi/2], ascending, count = min(rank a, rank b).
std::vector<double> principal_angles(const SubspaceFrame& a, const SubspaceFrame& b);

// Spectral norm of the difference of orthogonal projectors.
double subspace_distance(const SubspaceFrame& a, const SubspaceFrame& b);

// Intersection of two subspaces; columns of the result span a ∩ b.
SubspaceFrame intersect(const SubspaceFrame& a, const SubspaceFrame& b, double tol = 1e-8);

double spectral_norm(const CMat& a);
double smallest_singular(const CMat& a);

// Number of nonzero off-diagonals on the widest side (entries with |h_ij| > tol).
int bandwidth(const CMat& h, double tol = 0.0);

bool is_hermitian(const CMat& h, double tol = 1e-12);

// Banded complex matrix with LU factorization by partial pivoting.
class BandedLU {
 public:
  // a is n x n with lower/upper bandwidths kl, ku; entries outside the band are ignored.
  BandedLU(const CMat& a, int kl, int ku);
  // Direct band construction: fill(i, j) gives entry a_ij for |i - j| within the band.
  template <class F>
  BandedLU(int n, int kl, int ku, F&& fill) : n_(n), kl_(kl), ku_(ku), w_(2 * kl + ku + 1) {
    data_.assign(static_cast<size_t>(n_) * w_, cplx(0.0));
    for (int i = 0; i < n_; ++i)
      for (int j = std::max(0, i - kl_); j <= std::min(n_ - 1, i + ku_); ++j) at(i, j) = fill(i, j);
    factor();
  }
  CVec solve(const CVec& b) const;
  CMat solve(const CMat& b) const;
  int size() const { return n_; }

 private:
  cplx& at(int i, int j) { return data_[static_cast<size_t>(i) * w_ + (j - i + kl_)]; }
  const cplx& at(int i, int j) const { return data_[static_cast<size_t>(i) * w_ + (j - i + kl_)]; }
  void factor();

  int n_, kl_, ku_, w_;
  std::vector<cplx> data_;
  std::vector<int> piv_;
};

// Solves (h - z) x = rhs. Banded LU when bandwidth <= kBandLimit, dense LU otherwise.
CVec solve_shifted(const CMat& h, cplx z, const CVec& rhs);
CMat solve_shifted(const CMat& h, cplx z, const CMat& rhs);

// Solves (h - z) x = rhs for a Hermitian band in upper storage band[j](i) = h(i, i + j).
CMat band_solve_shifted(const std::vector<CVec>& band, cplx z, const CMat& rhs);

// Number of eigenvalues of Hermitian h strictly below E (Sylvester inertia).
int eig_count_below(const CMat& h, double E);

// Inertia count for a Hermitian band given by its diagonal and the first k superdiagonals:
// band(j, i) = h(i, i + j), j = 0..k. Used by the IDS kernels without forming dense matrices.
int band_count_below(const std::vector<CVec>& band, double E);

// Deterministic low-discrepancy phases on T^d (Kronecker sequence).
std::vector<Phase> qmc_phases(int d, int count, const Phase& shift);

}  // namespace qps
