#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "doccit2vec/model.hpp"

namespace dc2v {

/// Case 1 pools the context words and every structural doc, Case 2 keeps
/// each structural doc with probability keep_prob, Case 3 uses words only.
enum class QueryCase : std::uint8_t { Case1 = 1, Case2 = 2, Case3 = 3 };

QueryCase parse_case(int n);

inline constexpr double kDefaultKeepProb = 0.5;

struct Query {
  QueryCase kase = QueryCase::Case1;
  std::vector<Index> context_words;
  std::vector<Index> structural_docs;
  double keep_prob = kDefaultKeepProb;  // Case 2 only
  std::uint64_t seed = 0;               // Case 2 only
};

/// Structural docs that take part in the query, in ascending index order.
std::vector<Index> query_structural_docs(const Query& q);

/// Arithmetic mean of the IN vectors of the query participants, for both
/// model variants. Throws ConfigError when nothing is left to pool.
std::vector<double> build_query_vector(const Model& model, const Query& q);

struct ScoredDoc {
  Index doc = 0;
  std::string id;
  double score = 0.0;
  friend bool operator==(const ScoredDoc&, const ScoredDoc&) = default;
};

/// Scores nonincreasing; equal scores ordered by ascending doc id.
struct RecommendationList {
  std::vector<ScoredDoc> ranked;
  std::size_t k = 0;
};

/// Top-k of `scores` over documents not in `exclude`.
RecommendationList top_k(std::span<const double> scores, const IdTable& docs,
                         std::span<const Index> exclude, std::size_t k);

/// IN-for-OUT: dot product of the query against every OUT doc vector.
RecommendationList rank_i4o(const Model& model, std::span<const double> qvec,
                            std::span<const Index> exclude, std::size_t k);

/// IN-for-IN: infers a doc vector from the context words, then ranks IN doc
/// vectors by cosine similarity.
RecommendationList rank_i4i(const Model& model,
                            std::span<const Index> context_words,
                            std::span<const Index> exclude, std::size_t k,
                            std::size_t steps, double lr);

/// Which documents may be recommended. Documents never cited in training
/// keep their all-zero OUT vector and would always score exactly 0.
enum class Candidates : std::uint8_t { Cited, All };

/// Documents with no training citations, for use as an exclusion list.
std::vector<Index> uncited_docs(const Vocabulary& vocab);

struct RecommendOptions {
  double keep_prob = kDefaultKeepProb;
  std::uint64_t seed = 0;
  /// Leave the documents cited in the text out of the results.
  bool exclude_cited = true;
  Candidates candidates = Candidates::Cited;
};

struct Recommendation {
  RecommendationList list;
  std::size_t unknown_words = 0;
  std::size_t unknown_docs = 0;
};

/// Tokenizes `text` with the corpus rules, pools known words and (for Cases
/// 1 and 2) the cited documents, and ranks with I4O.
Recommendation recommend(const Model& model, std::string_view text,
                         QueryCase kase, std::size_t k,
                         const RecommendOptions& opts = {});

}  // namespace dc2v
