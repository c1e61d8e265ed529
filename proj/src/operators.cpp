#include "qpstrip/operators.hpp"

#include <cmath>

namespace qps {

namespace {

cplx fourier_phase(const std::vector<int>& k, const Phase& t, double y) {
  double arg = 0.0, damp = 0.0;
  for (size_t j = 0; j < k.size(); ++j) {
    arg += k[j] * t(static_cast<long>(j));
    damp += k[j] * y;
  }
  return std::exp(cplx(-kTwoPi * damp, kTwoPi * arg));
}

double dot(const std::vector<int>& k, const Phase& a) {
  double s = 0.0;
  for (size_t j = 0; j < k.size(); ++j) s += k[j] * a(static_cast<long>(j));
  return s;
}

}  // namespace

cplx HoppingSeq::at(int k) const {
  auto it = w.find(k);
  return it == w.end() ? cplx(0.0) : it->second;
}

int HoppingSeq::range() const {
  int r = 0;
  for (const auto& [k, v] : w)
    if (v != cplx(0.0)) r = std::max(r, std::abs(k));
  return r;
}

cplx HoppingSeq::symbol(cplx x) const {
  cplx s = 0.0;
  for (const auto& [k, v] : w) s += v * std::exp(kI * kTwoPi * static_cast<double>(k) * x);
  return s;
}

double HoppingSeq::measured_decay() const {
  double c = 0.0;
  for (const auto& [k, v] : w)
    if (k != 0) c = std::max(c, std::abs(v) * std::pow(std::abs(k), 3.0));
  return c;
}

void HoppingSeq::validate() const {
  for (const auto& [k, v] : w) {
    double tol = 1e-14 * std::max(1.0, std::abs(v));
    if (k == 0 && std::abs(v.imag()) > tol) throw DomainError("hopping w_0 must be real");
    if (std::abs(at(-k) - std::conj(v)) > tol) throw DomainError("non-Hermitian hopping: w_{-k} != conj(w_k)");
  }
}

HoppingSeq HoppingSeq::laplacian() { return symmetric({{1, 1.0}}); }

HoppingSeq HoppingSeq::symmetric(const std::map<int, cplx>& positive, double w0) {
  HoppingSeq h;
  if (w0 != 0.0) h.w[0] = w0;
  for (const auto& [k, v] : positive) {
    if (k <= 0) throw DomainError("symmetric hopping expects k > 0");
    h.w[k] = v;
    h.w[-k] = std::conj(v);
  }
  return h;
}

HoppingSeq HoppingSeq::with_power_tail(HoppingSeq base, double amplitude, double power, double tol) {
  if (power <= 1.0) throw DomainError("power tail must be summable");
  // tail beyond K is bounded by 2 amplitude K^{1-power} / (power - 1)
  long K = 1;
  while (2.0 * std::abs(amplitude) * std::pow(static_cast<double>(K), 1.0 - power) / (power - 1.0) >= tol) K *= 2;
  long lo = K / 2, hi = K;
  while (hi - lo > 1) {
    long mid = (lo + hi) / 2;
    if (2.0 * std::abs(amplitude) * std::pow(static_cast<double>(mid), 1.0 - power) / (power - 1.0) < tol)
      hi = mid;
    else
      lo = mid;
  }
  K = hi;
  for (long k = 1; k <= K; ++k) {
    double a = amplitude / std::pow(static_cast<double>(k), power);
    base.w[static_cast<int>(k)] += a;
    base.w[static_cast<int>(-k)] += a;
  }
  base.decay_C = std::max(base.decay_C, base.measured_decay());
  return base;
}

cplx PotentialSpec::eval(const Phase& t, double y) const {
  if (kind != Kind::QuasiPeriodic) throw DomainError("potential is not quasi-periodic");
  cplx s = 0.0;
  for (const auto& term : fourier) {
    double kn = 0.0;
    for (int kj : term.k) kn += std::abs(kj);
    if (std::abs(term.c) < 1e-14 * std::exp(-kTwoPi * std::abs(y) * kn)) continue;
    s += term.c * fourier_phase(term.k, t, y);
  }
  return s;
}

double PotentialSpec::site(long n) const { return site(n, theta); }

double PotentialSpec::site(long n, const Phase& th) const {
  if (kind == Kind::Explicit) {
    long i = n - first;
    if (i < 0 || i >= static_cast<long>(sequence.size())) throw DomainError("explicit potential: site outside the given sequence");
    return sequence[static_cast<size_t>(i)];
  }
  Phase t = th + static_cast<double>(n) * alpha;
  return eval(t).real();
}

void PotentialSpec::validate() const {
  if (kind == Kind::Explicit) {
    for (double v : sequence)
      if (!std::isfinite(v)) throw DomainError("explicit potential has non-finite values");
    return;
  }
  if (theta.size() != alpha.size()) throw DomainError("theta and alpha dimensions differ");
  for (const auto& t : fourier) {
    if (static_cast<long>(t.k.size()) != alpha.size()) throw DomainError("Fourier index dimension mismatch");
    std::vector<int> mk(t.k.size());
    for (size_t j = 0; j < t.k.size(); ++j) mk[j] = -t.k[j];
    cplx partner = 0.0;
    for (const auto& u : fourier)
      if (u.k == mk) partner += u.c;
    if (std::abs(partner - std::conj(t.c)) > 1e-14 * std::max(1.0, std::abs(t.c)))
      throw DomainError("potential is not real-valued: c_{-k} != conj(c_k)");
  }
}

PotentialSpec PotentialSpec::cosine(double alpha, double theta, double epsilon) {
  PotentialSpec p;
  p.fourier = {{{1}, 1.0}, {{-1}, 1.0}};
  p.alpha = Phase::Constant(1, alpha);
  p.theta = Phase::Constant(1, theta);
  p.epsilon = epsilon;
  return p;
}

PotentialSpec PotentialSpec::zero() {
  PotentialSpec p;
  p.alpha = Phase::Constant(1, kGolden);
  p.epsilon = 0.0;
  return p;
}

OperatorSpec OperatorSpec::free_laplacian() { return {HoppingSeq::laplacian(), PotentialSpec::zero()}; }

OperatorSpec OperatorSpec::amo(double lambda, double alpha, double theta) {
  return {HoppingSeq::laplacian(), PotentialSpec::cosine(alpha, theta, lambda)};
}

CMat StripSpec::potential(const Phase& t, double y) const {
  CMat v = CMat::Zero(m(), m());
  for (const auto& term : V) {
    double kn = 0.0;
    for (int kj : term.k) kn += std::abs(kj);
    if (term.k.size() && kn > 0 && term.c.cwiseAbs().maxCoeff() < 1e-14 * std::exp(-kTwoPi * std::abs(y) * kn)) continue;
    v += term.c * fourier_phase(term.k, t, y);
  }
  return v;
}

void StripSpec::validate() const {
  if (C.rows() != C.cols() || C.rows() == 0) throw DomainError("C must be square and nonempty");
  Eigen::FullPivLU<CMat> lu(C);
  if (!lu.isInvertible()) throw DomainError("C is singular");
  for (const auto& t : V) {
    if (t.c.rows() != m() || t.c.cols() != m()) throw DomainError("V coefficient has wrong size");
    if (static_cast<long>(t.k.size()) != alpha.size()) throw DomainError("V Fourier index dimension mismatch");
  }
  // Hermitian at a few sample phases
  for (int s = 0; s < 4; ++s) {
    Phase t = Phase::Constant(dim(), 0.137 + 0.25 * s);
    CMat v = potential(t);
    if (!is_hermitian(v, 1e-12)) throw DomainError("V(theta) is not Hermitian");
  }
}

StripSpec StripSpec::constant(const CMat& C, const CMat& V0, double alpha) {
  StripSpec s;
  s.C = C;
  s.V = {{{0}, V0}};
  s.alpha = Phase::Constant(1, alpha);
  return s;
}

StripSpec StripSpec::free_laplacian() { return constant(CMat::Identity(1, 1), CMat::Zero(1, 1), kGolden); }

StripSpec StripSpec::amo(double lambda, double alpha) {
  StripSpec s;
  s.C = CMat::Identity(1, 1);
  s.V = {{{1}, CMat::Constant(1, 1, lambda)}, {{-1}, CMat::Constant(1, 1, lambda)}};
  s.alpha = Phase::Constant(1, alpha);
  return s;
}

double WindowVec::norm(long a, long b) const {
  double s = 0.0;
  for (long n = std::max(a, lo); n <= std::min(b, hi()); ++n) s += std::norm(v(n - lo));
  return std::sqrt(s);
}

CMat assemble_window(const OperatorSpec& spec, long lo, long hi) {
  spec.hopping.validate();
  const long n = hi - lo + 1;
  if (n <= 0) throw DomainError("empty window");
  CMat h = CMat::Zero(n, n);
  for (const auto& [k, w] : spec.hopping.w) {
    if (std::abs(k) >= n) continue;
    for (long i = 0; i < n; ++i) {
      long j = i + k;
      if (j >= 0 && j < n) h(i, j) += w;
    }
  }
  if (spec.potential.epsilon != 0.0)
    for (long i = 0; i < n; ++i) h(i, i) += spec.potential.epsilon * spec.potential.site(lo + i);
  return h;
}

CMat assemble_truncated(const OperatorSpec& spec, long N) { return assemble_window(spec, -N, N); }

std::vector<CVec> assemble_band(const OperatorSpec& spec, long lo, long hi) {
  return assemble_band(spec, lo, hi, spec.potential.theta);
}

std::vector<CVec> assemble_band(const OperatorSpec& spec, long lo, long hi, const Phase& th) {
  spec.hopping.validate();
  const long n = hi - lo + 1;
  if (n <= 0) throw DomainError("empty window");
  const int K = spec.hopping.range();
  if (K > kBandLimit) throw DomainError("hopping range exceeds the band limit");
  std::vector<CVec> band(K + 1, CVec::Zero(n));
  for (int j = 0; j <= K; ++j) {
    cplx w = spec.hopping.at(j);
    for (long i = 0; i + j < n; ++i) band[j](i) = w;
  }
  if (spec.potential.epsilon != 0.0)
    for (long i = 0; i < n; ++i) band[0](i) += spec.potential.epsilon * spec.potential.site(lo + i, th);
  return band;
}

std::vector<CVec> assemble_strip_band(const StripSpec& s, long lo, long hi, const Phase& th) {
  const int m = s.m();
  const long nb = hi - lo + 1;
  const long n = nb * m;
  const int bw = 2 * m - 1;
  std::vector<CVec> band(bw + 1, CVec::Zero(n));
  for (long b = 0; b < nb; ++b) {
    Phase t = th + static_cast<double>(lo + b) * s.alpha;
    CMat v = s.potential(t);
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) band[j - i](b * m + i) = v(i, j);
    if (b + 1 < nb)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          // entry (b*m+i, (b+1)*m+j) = C(i, j)
          int off = m + j - i;
          if (off <= bw) band[off](b * m + i) = s.C(i, j);
        }
  }
  return band;
}

CMat band_to_dense(const std::vector<CVec>& band) {
  const long n = band[0].size();
  CMat h = CMat::Zero(n, n);
  for (size_t j = 0; j < band.size(); ++j)
    for (long i = 0; i + static_cast<long>(j) < n; ++i) {
      h(i, i + j) = band[j](i);
      if (j) h(i + j, i) = std::conj(band[j](i));
    }
  return h;
}

CMat assemble_strip(const StripSpec& s, long lo, long hi, const Phase& th) {
  return band_to_dense(assemble_strip_band(s, lo, hi, th));
}

StripSpec fold_to_strip(const OperatorSpec& spec) {
  spec.hopping.validate();
  if (spec.potential.kind != PotentialSpec::Kind::QuasiPeriodic) throw DomainError("fold_to_strip needs a quasi-periodic potential");
  const int K = spec.hopping.range();
  if (K == 0 || spec.hopping.at(K) == cplx(0.0)) throw DomainError("hopping range misdeclared (w_K = 0)");
  StripSpec s;
  s.C = CMat::Zero(K, K);
  for (int i = 0; i < K; ++i)
    for (int j = i; j < K; ++j) s.C(i, j) = spec.hopping.at(K - (j - i));
  CMat v0 = CMat::Zero(K, K);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j) v0(i, j) = spec.hopping.at(i - j);
  const int d = spec.potential.dim();
  s.V.push_back({std::vector<int>(d, 0), v0});
  const double eps = spec.potential.epsilon;
  for (const auto& term : spec.potential.fourier) {
    CMat c = CMat::Zero(K, K);
    double ka = dot(term.k, spec.potential.alpha);
    // component i sits at site offset K - 1 - i inside the block
    for (int i = 0; i < K; ++i) c(i, i) = eps * term.c * std::exp(kI * kTwoPi * ka * static_cast<double>(K - 1 - i));
    s.V.push_back({term.k, c});
  }
  s.alpha = static_cast<double>(K) * spec.potential.alpha;
  return s;
}

std::vector<CVec> fold_vector(const CVec& u, int K) {
  if (K <= 0 || u.size() % K != 0) throw DomainError("fold_vector: length not divisible by K");
  std::vector<CVec> blocks(u.size() / K, CVec(K));
  for (size_t n = 0; n < blocks.size(); ++n)
    for (int i = 0; i < K; ++i) blocks[n](i) = u(static_cast<long>(n) * K + K - 1 - i);
  return blocks;
}

CVec unfold_vector(const std::vector<CVec>& blocks) {
  if (blocks.empty()) return CVec(0);
  const long K = blocks[0].size();
  CVec u(static_cast<long>(blocks.size()) * K);
  for (size_t n = 0; n < blocks.size(); ++n) {
    if (blocks[n].size() != K) throw DomainError("unfold_vector: ragged blocks");
    for (long i = 0; i < K; ++i) u(static_cast<long>(n) * K + K - 1 - i) = blocks[n](i);
  }
  return u;
}

LatticeOperator dual_operator(const OperatorSpec& spec, const Phase& x) {
  if (spec.potential.kind != PotentialSpec::Kind::QuasiPeriodic) throw DomainError("dual_operator: potential not quasi-periodic");
  spec.hopping.validate();
  LatticeOperator d;
  for (const auto& t : spec.potential.fourier) d.hopping[t.k] += spec.potential.epsilon * t.c;
  d.potential_symbol = spec.hopping;
  d.alpha = spec.potential.alpha;
  d.x = x.size() ? x : Phase::Zero(1);
  return d;
}

CMat LatticeOperator::assemble(long N) const {
  const int dd = dim();
  const long side = 2 * N + 1;
  long total = 1;
  for (int j = 0; j < dd; ++j) total *= side;
  auto index_of = [&](const std::vector<long>& m) {
    long idx = 0;
    for (int j = 0; j < dd; ++j) idx = idx * side + (m[j] + N);
    return idx;
  };
  CMat h = CMat::Zero(total, total);
  std::vector<long> m(dd, -N);
  for (long idx = 0; idx < total; ++idx) {
    long rem = idx;
    for (int j = dd - 1; j >= 0; --j) {
      m[j] = rem % side - N;
      rem /= side;
    }
    // the potential symbol has the one-dimensional argument x + <m, alpha>
    double arg = x(0);
    for (int j = 0; j < dd; ++j) arg += m[j] * alpha(j);
    h(idx, idx) += potential_symbol.symbol(arg).real();
    for (const auto& [k, c] : hopping) {
      std::vector<long> t(dd);
      bool inside = true;
      for (int j = 0; j < dd; ++j) {
        t[j] = m[j] + k[j];
        if (std::abs(t[j]) > N) inside = false;
      }
      if (inside) h(idx, index_of(t)) += c;
    }
  }
  return h;
}

OperatorSpec LatticeOperator::as_line() const {
  if (dim() != 1) throw DomainError("as_line needs a one-dimensional dual lattice");
  OperatorSpec s;
  for (const auto& [k, c] : hopping) s.hopping.w[k[0]] += c;
  s.potential.kind = PotentialSpec::Kind::QuasiPeriodic;
  for (const auto& [k, w] : potential_symbol.w) s.potential.fourier.push_back({{k}, w});
  s.potential.alpha = alpha;
  s.potential.theta = x;
  s.potential.epsilon = 1.0;
  return s;
}

WindowVec apply_range(const OperatorSpec& spec, const WindowVec& u, long a, long b) {
  WindowVec out{a, CVec::Zero(std::max(0L, b - a + 1))};
  const double eps = spec.potential.epsilon;
  const long K = spec.hopping.range();
  // flat kernel ker[k + K] = w_k keeps the inner loop contiguous for long tails
  std::vector<cplx> ker(2 * K + 1, cplx(0.0));
  for (const auto& [k, w] : spec.hopping.w) ker[k + K] = w;
  for (long n = a; n <= b; ++n) {
    cplx s = 0.0;
    long k0 = std::max(-K, u.lo - n), k1 = std::min(K, u.hi() - n);
    const cplx* up = u.v.data() + (n - u.lo);
    for (long k = k0; k <= k1; ++k) s += ker[k + K] * up[k];
    if (eps != 0.0 && u.contains(n)) s += eps * spec.potential.site(n) * u.v(n - u.lo);
    out.v(n - a) = s;
  }
  return out;
}

WindowVec apply(const OperatorSpec& spec, const WindowVec& u) {
  const int K = spec.hopping.range();
  long a = u.lo + K, b = u.hi() - K;
  if (b < a) throw DomainError("apply: window too small for the hopping range");
  return apply_range(spec, u, a, b);
}

}  // namespace qps
