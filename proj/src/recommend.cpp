#include "doccit2vec/recommend.hpp"

#include <algorithm>
#include <numeric>

#include "doccit2vec/error.hpp"
#include "doccit2vec/kernels.hpp"
#include "doccit2vec/random.hpp"

namespace dc2v {

QueryCase parse_case(int n) {
  if (n < 1 || n > 3) throw ConfigError("case must be 1, 2 or 3");
  return static_cast<QueryCase>(n);
}

std::vector<Index> query_structural_docs(const Query& q) {
  if (!(q.keep_prob >= 0.0 && q.keep_prob <= 1.0)) {
    throw ConfigError("keep_prob must lie in [0, 1]");
  }
  std::vector<Index> docs;
  if (q.kase == QueryCase::Case3) return docs;
  docs = q.structural_docs;
  std::sort(docs.begin(), docs.end());
  docs.erase(std::unique(docs.begin(), docs.end()), docs.end());
  if (q.kase == QueryCase::Case2) {
    Rng rng(q.seed);
    std::vector<Index> kept;
    for (Index d : docs) {
      if (rng.bernoulli(q.keep_prob)) kept.push_back(d);
    }
    docs = std::move(kept);
  }
  return docs;
}

std::vector<double> build_query_vector(const Model& model, const Query& q) {
  const auto& m = model.matrices;
  std::vector<std::span<const double>> rows;
  for (Index w : q.context_words) {
    if (w >= m.word_in.rows()) throw Error("word index out of range");
    rows.push_back(m.word_in.row(w));
  }
  for (Index d : query_structural_docs(q)) {
    if (d >= m.doc_in.rows()) throw Error("document index out of range");
    rows.push_back(m.doc_in.row(d));
  }
  if (rows.empty()) throw ConfigError("query has no participants");
  std::vector<double> x(model.config.dim);
  kernels::hidden_avg(rows, x);
  return x;
}

std::vector<Index> uncited_docs(const Vocabulary& vocab) {
  std::vector<Index> out;
  for (Index d = 0; d < vocab.n_docs(); ++d) {
    if (vocab.doc_cited_counts[d] == 0) out.push_back(d);
  }
  return out;
}

RecommendationList top_k(std::span<const double> scores, const IdTable& docs,
                         std::span<const Index> exclude, std::size_t k) {
  if (k < 1) throw ConfigError("k must be >= 1");
  std::vector<char> excluded(scores.size(), 0);
  for (Index d : exclude) {
    if (d < excluded.size()) excluded[d] = 1;
  }
  std::vector<Index> cand;
  cand.reserve(scores.size());
  for (Index d = 0; d < scores.size(); ++d) {
    if (!excluded[d]) cand.push_back(d);
  }
  auto better = [&](Index a, Index b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return docs.name(a) < docs.name(b);
  };
  const std::size_t n = std::min(k, cand.size());
  std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(n),
                    cand.end(), better);
  RecommendationList out;
  out.k = k;
  for (std::size_t i = 0; i < n; ++i) {
    out.ranked.push_back({cand[i], docs.name(cand[i]), scores[cand[i]]});
  }
  return out;
}

RecommendationList rank_i4o(const Model& model, std::span<const double> qvec,
                            std::span<const Index> exclude, std::size_t k) {
  if (k < 1) throw ConfigError("k must be >= 1");
  std::vector<double> scores(model.matrices.doc_out.rows());
  kernels::score_dot(model.matrices.doc_out, qvec, scores);
  return top_k(scores, model.vocab.docs, exclude, k);
}

RecommendationList rank_i4i(const Model& model,
                            std::span<const Index> context_words,
                            std::span<const Index> exclude, std::size_t k,
                            std::size_t steps, double lr) {
  if (k < 1) throw ConfigError("k must be >= 1");
  const auto vec = infer_doc_vector(model, context_words, steps, lr);
  std::vector<double> scores(model.matrices.doc_in.rows());
  kernels::score_cosine(model.matrices.doc_in, vec, scores);
  return top_k(scores, model.vocab.docs, exclude, k);
}

Recommendation recommend(const Model& model, std::string_view text,
                         QueryCase kase, std::size_t k,
                         const RecommendOptions& opts) {
  if (k < 1) throw ConfigError("k must be >= 1");
  Recommendation rec;
  Query q;
  q.kase = kase;
  q.keep_prob = opts.keep_prob;
  q.seed = opts.seed;
  std::vector<Index> cited;
  for (const auto& tok : tokenize(text)) {
    if (tok.is_cite()) {
      if (auto d = model.vocab.docs.find(tok.text)) {
        cited.push_back(*d);
      } else {
        ++rec.unknown_docs;
      }
    } else if (auto w = model.vocab.words.find(tok.text)) {
      q.context_words.push_back(*w);
    } else {
      ++rec.unknown_words;
    }
  }
  std::sort(cited.begin(), cited.end());
  cited.erase(std::unique(cited.begin(), cited.end()), cited.end());
  q.structural_docs = cited;

  const bool usable = !q.context_words.empty() ||
                      (kase != QueryCase::Case3 && !cited.empty());
  if (!usable) throw UnknownTokensError(rec.unknown_words + rec.unknown_docs);

  const auto qvec = build_query_vector(model, q);
  std::vector<Index> exclude;
  if (opts.exclude_cited) exclude = cited;
  if (opts.candidates == Candidates::Cited) {
    const auto uncited = uncited_docs(model.vocab);
    exclude.insert(exclude.end(), uncited.begin(), uncited.end());
  }
  rec.list = rank_i4o(model, qvec, exclude, k);
  return rec;
}

}  // namespace dc2v
