#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "doccit2vec/error.hpp"
#include "doccit2vec/eval.hpp"
#include "fixture.hpp"
#include "oracles.hpp"

using namespace dc2v;

namespace {

std::vector<unsigned> as_unsigned(const std::vector<Index>& v) { return {v.begin(), v.end()}; }

// n docs d0..d(n-1) and words w0..w(n-1); w_i and d_i^O are the i-th unit
// vector, so the context {w_i} ranks d_i first.
Model oracle_model(std::size_t n) {
  Vocabulary v;
  for (std::size_t i = 0; i < n; ++i) {
    v.add_doc("d" + std::to_string(i), 1);
    v.add_word("w" + std::to_string(i), 1);
  }
  EmbeddingConfig c;
  c.dim = n;
  auto m = make_model(std::move(v), c);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(m.matrices.word_in.row(i).begin(), m.matrices.word_in.row(i).end(), 0.0);
    std::fill(m.matrices.doc_in.row(i).begin(), m.matrices.doc_in.row(i).end(), 0.0);
    m.matrices.word_in.row(i)[i] = 1.0;
    m.matrices.doc_in.row(i)[i] = 1.0;
    m.matrices.doc_out.row(i)[i] = 1.0;
  }
  return m;
}

bool same(const MetricReport& a, const MetricReport& b) {
  return a.kase == b.kase && a.k == b.k && a.n_relations == b.n_relations &&
         a.recall == b.recall && a.map == b.map && a.ndcg == b.ndcg;
}

}  // namespace

TEST_CASE("metric hand examples") {
  const std::vector<Index> ranked{10, 99, 11};
  const std::vector<Index> rel{10, 11};
  CHECK(average_precision(ranked, rel, 10) == doctest::Approx(0.8333333333333334).epsilon(1e-15));
  CHECK(recall_at_k(ranked, rel, 10) == 1.0);
  CHECK(recall_at_k(ranked, rel, 2) == 0.5);

  const std::vector<Index> second{99, 10};
  const std::vector<Index> one{10};
  CHECK(ndcg_at_k(second, one, 10) == doctest::Approx(0.6309297535714575).epsilon(1e-15));
  CHECK(ndcg_at_k(one, one, 10) == 1.0);
  CHECK(average_precision(second, one, 10) == 0.5);
  CHECK(recall_at_k(second, one, 1) == 0.0);

  CHECK(recall_at_k({}, one, 5) == 0.0);
  CHECK_THROWS_AS(recall_at_k(ranked, {}, 5), ConfigError);
  CHECK_THROWS_AS(ndcg_at_k(ranked, rel, 0), ConfigError);
}

TEST_CASE("metrics match naive implementations") {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = rng.below(25), universe = 1 + rng.below(40);
    std::vector<Index> pool(universe);
    for (Index i = 0; i < universe; ++i) pool[i] = i;
    rng.shuffle(std::span<Index>(pool));
    std::vector<Index> ranked(pool.begin(), pool.begin() + std::min(n, pool.size()));
    rng.shuffle(std::span<Index>(pool));
    const std::size_t n_rel = 1 + rng.below(std::min<std::size_t>(6, universe));
    std::vector<Index> rel(pool.begin(), pool.begin() + n_rel);
    const std::size_t k = 1 + rng.below(30);

    const auto r = as_unsigned(ranked), g = as_unsigned(rel);
    CHECK(std::abs(recall_at_k(ranked, rel, k) - oracle::naive_recall(r, g, k)) <= 1e-12);
    CHECK(std::abs(average_precision(ranked, rel, k) - oracle::naive_ap(r, g, k)) <= 1e-12);
    CHECK(std::abs(ndcg_at_k(ranked, rel, k) - oracle::naive_ndcg(r, g, k)) <= 1e-12);
  }
}

TEST_CASE("resolve_ground_truth") {
  const auto c = parse_corpus_string("a\tx y [[b]] z\nb\tx y z\n");
  std::vector<RawRelation> raw{
      {"q", "b", {"a", "ghost"}, {"x", "nope"}},
      {"q", "ghost", {}, {"x"}},
      {"q", "a", {}, {"nope"}},
  };
  const auto truth = resolve_ground_truth(raw, c.vocab);
  REQUIRE(truth.relations.size() == 1);
  CHECK(truth.dropped == 2);
  const auto& r = truth.relations[0];
  CHECK_FALSE(r.source.has_value());
  CHECK(r.target == *c.vocab.docs.find("b"));
  CHECK(r.structural == std::vector<Index>{*c.vocab.docs.find("a")});
  CHECK(r.context == std::vector<Index>{*c.vocab.words.find("x")});
}

TEST_CASE("a perfect model scores 1 everywhere") {
  const auto m = oracle_model(6);
  GroundTruth truth;
  for (Index i = 0; i < 6; ++i) truth.relations.push_back({"src", std::nullopt, i, {}, {i}});
  for (auto kase : {QueryCase::Case1, QueryCase::Case2, QueryCase::Case3}) {
    for (std::size_t k : {1, 10}) {
      const auto r = evaluate(m, truth, kase, k, 1);
      CHECK(r.recall == 1.0);
      CHECK(r.map == 1.0);
      CHECK(r.ndcg == 1.0);
      CHECK(r.n_relations == 6);
    }
  }
}

TEST_CASE("evaluate excludes known citations") {
  auto m = oracle_model(3);
  // d1's OUT vector also answers w0, more strongly than d0.
  m.matrices.doc_out.row(1)[0] = 5.0;
  GroundTruth truth;
  truth.relations.push_back({"d2", Index{2}, 0, {1}, {0}});
  EvalOptions keep;
  keep.exclude_known = false;
  CHECK(evaluate(m, truth, QueryCase::Case3, 1, 1, keep).recall == 0.0);
  CHECK(evaluate(m, truth, QueryCase::Case3, 1, 1).recall == 1.0);
}

TEST_CASE("Case 2 with keep 1 equals Case 1") {
  const auto trained = fixture::held_out(fixture::config());
  EvalOptions o;
  o.keep_prob = 1.0;
  auto c1 = evaluate(trained.trained.model, trained.truth, QueryCase::Case1, 10, 3, o);
  auto c2 = evaluate(trained.trained.model, trained.truth, QueryCase::Case2, 10, 3, o);
  c2.kase = QueryCase::Case1;
  CHECK(same(c1, c2));

  o.keep_prob = 0.0;
  auto c3 = evaluate(trained.trained.model, trained.truth, QueryCase::Case3, 10, 3, o);
  auto c2z = evaluate(trained.trained.model, trained.truth, QueryCase::Case2, 10, 3, o);
  c2z.kase = QueryCase::Case3;
  CHECK(same(c3, c2z));
}

TEST_CASE("evaluate on the fixture") {
  const auto h = fixture::held_out(fixture::config(Variant::Avg, 100));
  const auto& model = h.trained.model;
  const auto c1 = evaluate(model, h.truth, QueryCase::Case1, 10, fixture::kSeed);
  const auto c3 = evaluate(model, h.truth, QueryCase::Case3, 10, fixture::kSeed);
  MESSAGE("case1 recall=" << c1.recall << " case3 recall=" << c3.recall);
  CHECK(c1.recall >= c3.recall);
  CHECK(h.truth.relations.size() == c1.n_relations);

  SUBCASE("relation order does not matter") {
    auto shuffled = h.truth;
    Rng rng(4);
    rng.shuffle(std::span<TestRelation>(shuffled.relations));
    for (auto kase : {QueryCase::Case1, QueryCase::Case2, QueryCase::Case3}) {
      CHECK(same(evaluate(model, h.truth, kase, 10, 9), evaluate(model, shuffled, kase, 10, 9)));
    }
  }

  SUBCASE("errors") {
    CHECK_THROWS_AS(evaluate(model, GroundTruth{}, QueryCase::Case1, 10, 1), ConfigError);
    CHECK_THROWS_AS(evaluate(model, h.truth, QueryCase::Case1, 0, 1), ConfigError);
    auto bad = h.truth;
    bad.relations[0].target = 100000;
    CHECK_THROWS_AS(evaluate(model, bad, QueryCase::Case1, 10, 1), Error);
  }
}

TEST_CASE("ablation_report") {
  const auto h = fixture::held_out(fixture::config(Variant::Avg, 10));
  const auto& m = h.trained.model;
  const auto rows = ablation_report(m, m, m, h.truth, 10, 5);
  REQUIRE(rows.size() == 9);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(same(rows[i].report, rows[3 + i].report));
    CHECK(same(rows[i].report, rows[6 + i].report));
  }
  CHECK(rows[0].model == "avg");
  CHECK(rows[4].model == "att");
  CHECK(rows[8].model == "no-struct");
  CHECK(rows[8].report.kase == QueryCase::Case3);

  const auto table = format_ablation(rows);
  CHECK(std::count(table.begin(), table.end(), '\n') == 10);
  CHECK(table.rfind("model\tcase\tk\tn\trecall\tmap\tndcg\n", 0) == 0);

  auto other = m;
  other.vocab.add_word("extra-word");
  CHECK_THROWS_AS(ablation_report(m, other, m, h.truth, 10, 5), ConfigError);
}

TEST_CASE("report formatting") {
  MetricReport r;
  r.kase = QueryCase::Case2;
  r.k = 10;
  r.n_relations = 4;
  r.recall = 0.75;
  r.map = 0.5;
  r.ndcg = 0.1;
  CHECK(format_report_records(r) ==
        "case=2 metric=recall value=0.75 n=4\n"
        "case=2 metric=map value=0.5 n=4\n"
        "case=2 metric=ndcg value=0.1 n=4\n");
  const auto t = format_report_table({r});
  CHECK(t.find("0.7500") != std::string::npos);
}
