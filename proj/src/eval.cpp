#include "doccit2vec/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "doccit2vec/error.hpp"
#include "doccit2vec/random.hpp"

namespace dc2v {

namespace {

void check_metric_args(std::span<const Index> relevant, std::size_t k) {
  if (relevant.empty()) throw ConfigError("relevant set is empty");
  if (k < 1) throw ConfigError("k must be >= 1");
}

bool contains(std::span<const Index> set, Index d) {
  return std::find(set.begin(), set.end(), d) != set.end();
}

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Sum that does not depend on the order of `values`.
double order_free_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return std::accumulate(values.begin(), values.end(), 0.0);
}

std::uint64_t relation_seed(std::uint64_t seed, const TestRelation& r) {
  std::uint64_t h = mix_seed(seed, r.target);
  for (unsigned char c : r.source_id) h = mix_seed(h, c);
  for (Index d : r.structural) h = mix_seed(h, d);
  for (Index w : r.context) h = mix_seed(h, w);
  return h;
}

}  // namespace

double recall_at_k(std::span<const Index> ranked,
                   std::span<const Index> relevant, std::size_t k) {
  check_metric_args(relevant, k);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) {
    if (contains(relevant, ranked[i])) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

double average_precision(std::span<const Index> ranked,
                         std::span<const Index> relevant, std::size_t k) {
  check_metric_args(relevant, k);
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) {
    if (contains(relevant, ranked[i])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(std::min(relevant.size(), k));
}

double ndcg_at_k(std::span<const Index> ranked, std::span<const Index> relevant,
                 std::size_t k) {
  check_metric_args(relevant, k);
  double dcg = 0.0;
  for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) {
    if (contains(relevant, ranked[i])) dcg += 1.0 / std::log2(i + 2.0);
  }
  double ideal = 0.0;
  for (std::size_t i = 0; i < std::min(k, relevant.size()); ++i) {
    ideal += 1.0 / std::log2(i + 2.0);
  }
  return dcg / ideal;
}

GroundTruth resolve_ground_truth(const std::vector<RawRelation>& raw,
                                 const Vocabulary& vocab) {
  GroundTruth truth;
  for (const auto& r : raw) {
    auto target = vocab.docs.find(r.target);
    if (!target) {
      ++truth.dropped;
      continue;
    }
    TestRelation t;
    t.source_id = r.source;
    t.source = vocab.docs.find(r.source);
    t.target = *target;
    for (const auto& d : r.structural) {
      if (auto i = vocab.docs.find(d)) t.structural.push_back(*i);
    }
    for (const auto& w : r.context) {
      if (auto i = vocab.words.find(w)) t.context.push_back(*i);
    }
    if (t.context.empty()) {
      ++truth.dropped;
      continue;
    }
    truth.relations.push_back(std::move(t));
  }
  return truth;
}

MetricReport evaluate(const Model& model, const GroundTruth& truth,
                      QueryCase kase, std::size_t k, std::uint64_t seed,
                      const EvalOptions& opts) {
  if (truth.relations.empty()) throw ConfigError("ground truth is empty");
  if (k < 1) throw ConfigError("k must be >= 1");
  const std::size_t n = truth.relations.size();
  std::vector<double> recall(n), ap(n), ndcg(n);
  const auto n_docs = model.vocab.n_docs();

  for (const auto& r : truth.relations) {
    bool ok = r.target < n_docs && (!r.source || *r.source < n_docs);
    for (Index d : r.structural) ok = ok && d < n_docs;
    for (Index w : r.context) ok = ok && w < model.vocab.n_words();
    if (!ok) throw Error("ground truth does not match the model vocabulary");
  }

  const std::vector<Index> uncited = opts.candidates == Candidates::Cited
                                         ? uncited_docs(model.vocab)
                                         : std::vector<Index>{};
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto& r = truth.relations[i];
    Query q;
    q.kase = kase;
    q.context_words = r.context;
    q.structural_docs = r.structural;
    q.keep_prob = opts.keep_prob;
    q.seed = relation_seed(seed, r);
    const auto qvec = build_query_vector(model, q);

    std::vector<Index> exclude;
    if (opts.exclude_known) {
      exclude = r.structural;
      if (r.source && *r.source != r.target) exclude.push_back(*r.source);
    }
    exclude.insert(exclude.end(), uncited.begin(), uncited.end());
    const auto list = rank_i4o(model, qvec, exclude, k);
    std::vector<Index> ranked;
    for (const auto& s : list.ranked) ranked.push_back(s.doc);
    const Index relevant[] = {r.target};
    recall[i] = recall_at_k(ranked, relevant, k);
    ap[i] = average_precision(ranked, relevant, k);
    ndcg[i] = ndcg_at_k(ranked, relevant, k);
  }

  MetricReport rep;
  rep.kase = kase;
  rep.k = k;
  rep.n_relations = n;
  rep.recall = order_free_sum(std::move(recall)) / static_cast<double>(n);
  rep.map = order_free_sum(std::move(ap)) / static_cast<double>(n);
  rep.ndcg = order_free_sum(std::move(ndcg)) / static_cast<double>(n);
  return rep;
}

std::string format_report_records(const MetricReport& r) {
  std::string out;
  const auto c = std::to_string(static_cast<int>(r.kase));
  const auto n = std::to_string(r.n_relations);
  const std::pair<const char*, double> metrics[] = {
      {"recall", r.recall}, {"map", r.map}, {"ndcg", r.ndcg}};
  for (const auto& [name, value] : metrics) {
    out += "case=" + c + " metric=" + name + " value=" + shortest(value) + " n=" + n + "\n";
  }
  return out;
}

std::string format_report_table(const std::vector<MetricReport>& reports) {
  std::string out = "case    k      n   recall      map     ndcg\n";
  char buf[128];
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, "%4d %4zu %6zu %8.4f %8.4f %8.4f\n",
                  static_cast<int>(r.kase), r.k, r.n_relations, r.recall,
                  r.map, r.ndcg);
    out += buf;
  }
  return out;
}

std::vector<AblationRow> ablation_report(const Model& avg, const Model& att,
                                         const Model& no_struct,
                                         const GroundTruth& truth,
                                         std::size_t k, std::uint64_t seed,
                                         const EvalOptions& opts) {
  for (const Model* m : {&att, &no_struct}) {
    if (m->vocab.docs.names() != avg.vocab.docs.names() ||
        m->vocab.words.names() != avg.vocab.words.names()) {
      throw ConfigError("ablation models do not share a vocabulary");
    }
  }
  std::vector<AblationRow> rows;
  const std::pair<const char*, const Model*> models[] = {
      {"avg", &avg}, {"att", &att}, {"no-struct", &no_struct}};
  for (const auto& [name, model] : models) {
    for (auto kase : {QueryCase::Case1, QueryCase::Case2, QueryCase::Case3}) {
      rows.push_back({name, evaluate(*model, truth, kase, k, seed, opts)});
    }
  }
  return rows;
}

std::string format_ablation(const std::vector<AblationRow>& rows) {
  std::string out = "model\tcase\tk\tn\trecall\tmap\tndcg\n";
  for (const auto& row : rows) {
    const auto& r = row.report;
    out += row.model + "\t" + std::to_string(static_cast<int>(r.kase)) + "\t" +
           std::to_string(r.k) + "\t" + std::to_string(r.n_relations) + "\t" +
           shortest(r.recall) + "\t" + shortest(r.map) + "\t" +
           shortest(r.ndcg) + "\n";
  }
  return out;
}

}  // namespace dc2v
