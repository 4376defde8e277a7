#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "doccit2vec/corpus.hpp"
#include "doccit2vec/model.hpp"
#include "doccit2vec/recommend.hpp"

namespace dc2v {

// Ranking metrics over a ranked list of doc indices. `relevant` must be
// non-empty; k >= 1.
double recall_at_k(std::span<const Index> ranked,
                   std::span<const Index> relevant, std::size_t k);
/// Precision at each relevant hit within the top k, summed and divided by
/// min(|relevant|, k).
double average_precision(std::span<const Index> ranked,
                         std::span<const Index> relevant, std::size_t k);
/// Binary-relevance nDCG with a log2(rank + 1) discount.
double ndcg_at_k(std::span<const Index> ranked, std::span<const Index> relevant,
                 std::size_t k);

/// A held-out citation resolved against a model vocabulary.
struct TestRelation {
  std::string source_id;
  std::optional<Index> source;  // absent when the citing doc is unknown
  Index target = 0;
  std::vector<Index> structural;
  std::vector<Index> context;
};

struct GroundTruth {
  std::vector<TestRelation> relations;
  /// Relations dropped because the target, or every context word, is unknown.
  std::size_t dropped = 0;
};

/// Maps raw relations into `vocab`; unknown structural docs and context words
/// are skipped.
GroundTruth resolve_ground_truth(const std::vector<RawRelation>& raw,
                                 const Vocabulary& vocab);

struct MetricReport {
  QueryCase kase = QueryCase::Case1;
  std::size_t k = 10;
  std::size_t n_relations = 0;
  double recall = 0.0;
  double map = 0.0;
  double ndcg = 0.0;
};

struct EvalOptions {
  double keep_prob = kDefaultKeepProb;
  /// Remove the structural docs and the citing doc from the candidates.
  bool exclude_known = true;
  Candidates candidates = Candidates::Cited;
};

/// Runs the case's query for every test relation, ranks with I4O and
/// averages the metrics. The result does not depend on relation order.
MetricReport evaluate(const Model& model, const GroundTruth& truth,
                      QueryCase kase, std::size_t k, std::uint64_t seed,
                      const EvalOptions& opts = {});

/// `case=<c> metric=<m> value=<f> n=<n>`, one line per metric.
std::string format_report_records(const MetricReport& r);
std::string format_report_table(const std::vector<MetricReport>& reports);

struct AblationRow {
  std::string model;
  MetricReport report;
};

/// Evaluates the three models on all three cases (9 rows). The models must
/// share a vocabulary.
std::vector<AblationRow> ablation_report(const Model& avg, const Model& att,
                                         const Model& no_struct,
                                         const GroundTruth& truth,
                                         std::size_t k, std::uint64_t seed,
                                         const EvalOptions& opts = {});

/// Tab-separated: model, case, k, n, recall, map, ndcg with a header row.
std::string format_ablation(const std::vector<AblationRow>& rows);

}  // namespace dc2v
