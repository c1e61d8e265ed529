#include <algorithm>
#include <cmath>

#include "qpstrip/numerics.hpp"

namespace qps {

BandedLU::BandedLU(const CMat& a, int kl, int ku)
    : BandedLU(static_cast<int>(a.rows()), kl, ku, [&a](int i, int j) { return a(i, j); }) {}

void BandedLU::factor() {
  piv_.assign(n_, 0);
  double scale = 0.0;
  for (const cplx& v : data_) scale = std::max(scale, std::abs(v));
  const double tiny = 1e-15 * std::max(scale, 1e-300);
  const int uw = kl_ + ku_;  // upper bandwidth after fill-in
  for (int k = 0; k < n_; ++k) {
    const int last = std::min(n_ - 1, k + kl_);
    int p = k;
    double best = std::abs(at(k, k));
    for (int i = k + 1; i <= last; ++i)
      if (std::abs(at(i, k)) > best) {
        best = std::abs(at(i, k));
        p = i;
      }
    if (!(best > tiny)) throw DomainError("singular shift");
    piv_[k] = p;
    const int jend = std::min(n_ - 1, k + uw);
    if (p != k)
      for (int j = k; j <= jend; ++j) std::swap(at(k, j), at(p, j));
    const cplx inv = 1.0 / at(k, k);
    for (int i = k + 1; i <= last; ++i) {
      cplx l = at(i, k) * inv;
      at(i, k) = l;
      if (l == cplx(0.0)) continue;
      for (int j = k + 1; j <= jend; ++j) at(i, j) -= l * at(k, j);
    }
  }
}

CVec BandedLU::solve(const CVec& b) const {
  CMat m = b;
  return solve(m).col(0);
}

CMat BandedLU::solve(const CMat& b) const {
  if (b.rows() != n_) throw DomainError("BandedLU: dimension mismatch");
  CMat x = b;
  const int uw = kl_ + ku_;
  for (int k = 0; k < n_; ++k) {
    if (piv_[k] != k) x.row(k).swap(x.row(piv_[k]));
    for (int i = k + 1; i <= std::min(n_ - 1, k + kl_); ++i) x.row(i) -= at(i, k) * x.row(k);
  }
  for (int k = n_ - 1; k >= 0; --k) {
    for (int j = k + 1; j <= std::min(n_ - 1, k + uw); ++j) x.row(k) -= at(k, j) * x.row(j);
    x.row(k) /= at(k, k);
  }
  return x;
}

}  // namespace qps

namespace qps {

CMat band_solve_shifted(const std::vector<CVec>& band, cplx z, const CMat& rhs) {
  const int n = static_cast<int>(band[0].size());
  const int k = static_cast<int>(band.size()) - 1;
  if (rhs.rows() != n) throw DomainError("band_solve_shifted: dimension mismatch");
  BandedLU lu(n, k, k, [&](int i, int j) -> cplx {
    if (i == j) return band[0](i) - z;
    return j > i ? band[j - i](i) : std::conj(band[i - j](j));
  });
  CMat x = lu.solve(rhs);
  if (!x.allFinite()) throw DomainError("singular shift");
  return x;
}

}  // namespace qps
