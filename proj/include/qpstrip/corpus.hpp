#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "qpstrip/cocycle.hpp"

namespace qps {

struct CorpusCheck {
  std::string name;
  double value = 0.0, expected = 0.0, tol = 0.0;
  std::string source;  // where the expected value comes from
  bool upper_only = false;  // value <= expected + tol instead of |value - expected| <= tol
  bool pass = false;
  double margin = 0.0;  // tol - deviation
  std::string error;
};

struct CorpusEntry {
  std::string name;
  std::vector<CorpusCheck> checks;
  bool pass() const;
};

// Spectrum proxies: eigenvalues of the 987-site periodic approximant (alpha = 610/987) of the
// almost Mathieu operator, `count` of them at evenly spaced indices.
std::vector<double> amo_spectrum_sample(double lambda, int count, double theta = 0.0);

// Solution sequence u(0..n) of the strip equation started from (u(0), u(-1)).
std::vector<CVec> strip_solution(const StripSpec& strip, cplx E, const Phase& t, const CVec& state, long n);

// Max deviation of unfold(fold(u)) from u, of norms, and of the folded window operator from
// the permuted line operator.
double fold_unitarity_defect(const OperatorSpec& spec, long blocks, unsigned seed);

// Random Hermitian strip: C with singular values in [0.5, 2], V Hermitian with one Fourier mode.
StripSpec random_strip(int m, unsigned seed);
// Random finite-range operator with range K and a cosine potential.
OperatorSpec random_finite_range(int K, unsigned seed);

// Entries: free, amo_subcritical, amo_supercritical, random_strip, long_range.
std::vector<CorpusEntry> run_corpus(const std::string& filter = "", Exec exec = Exec::Parallel);
nlohmann::json corpus_manifest(const std::vector<CorpusEntry>& entries);

}  // namespace qps
