#include <doctest.h>

#include <cmath>
#include <numeric>

#include "doccit2vec/sampler.hpp"

using namespace dc2v;

TEST_CASE("sampler probabilities follow count^0.75") {
  const std::vector<std::uint64_t> counts{0, 1, 16, 81, 0};
  const NegativeSampler s(counts);
  const double total = 1.0 + 8.0 + 27.0;
  CHECK(s.probability(0) == 0.0);
  CHECK(s.probability(4) == 0.0);
  CHECK(s.probability(1) == doctest::Approx(1.0 / total));
  CHECK(s.probability(2) == doctest::Approx(8.0 / total));
  CHECK(s.probability(3) == doctest::Approx(27.0 / total));
  double sum = 0.0;
  for (Index i = 0; i < counts.size(); ++i) sum += s.probability(i);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sampler never draws zero-count items") {
  const std::vector<std::uint64_t> counts{0, 3, 0, 0, 5, 0};
  const NegativeSampler s(counts);
  Rng rng(4);
  for (int i = 0; i < 20000; ++i) {
    const auto d = s.draw(rng);
    CHECK((d == 1 || d == 4));
  }
}

TEST_CASE("negatives avoid the target") {
  const std::vector<std::uint64_t> counts{5, 5, 5};
  const NegativeSampler s(counts);
  Rng rng(9);
  std::vector<Index> out;
  s.draw_negatives(rng, 1, 5000, out);
  CHECK(out.size() == 5000);
  for (auto d : out) CHECK(d != 1);
}

TEST_CASE("negatives are skipped when only the target has mass") {
  const std::vector<std::uint64_t> counts{0, 7, 0};
  const NegativeSampler s(counts);
  Rng rng(1);
  std::vector<Index> out;
  s.draw_negatives(rng, 1, 5, out);
  CHECK(out.empty());
}

TEST_CASE("empty sampler has no mass") {
  const NegativeSampler s(std::vector<std::uint64_t>{0, 0});
  CHECK_FALSE(s.has_mass());
  Rng rng(1);
  std::vector<Index> out;
  s.draw_negatives(rng, 0, 3, out);
  CHECK(out.empty());
}
