#include <doctest.h>

#include "qpstrip/corpus.hpp"

using namespace qps;

TEST_CASE("free corpus entry passes") {
  auto entries = run_corpus("free");
  REQUIRE(entries.size() == 1);
  for (const auto& c : entries[0].checks) {
    INFO(c.name << " value " << c.value << " expected " << c.expected << " " << c.error);
    CHECK(c.pass);
  }
  auto m = corpus_manifest(entries);
  CHECK(m["pass"].get<bool>());
}

TEST_CASE("unknown corpus filter") { CHECK_THROWS_AS(run_corpus("no_such_entry"), DomainError); }

TEST_CASE("approximant spectrum sample lies in the spectrum") {
  auto E = amo_spectrum_sample(2.0, 5);
  CHECK(E.size() == 5);
  for (size_t i = 1; i < E.size(); ++i) CHECK(E[i] > E[i - 1]);
  for (double e : E) CHECK(std::abs(e) <= 6.0);
}

TEST_CASE("fold defect is at rounding level") {
  for (int K = 1; K <= 3; ++K) CHECK(fold_unitarity_defect(random_finite_range(K, 20 + K), 12, 3) < 1e-10);
}
