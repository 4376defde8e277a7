#pragma once

// Finite-difference checks of the citation-step and pv-dm gradients on small
// random instances. Analytic gradients are read back from one update with
// lr = 1 (the update is exactly -gradient); numeric gradients come from
// central differences of the forward-only loss.

#include <algorithm>
#include <vector>

#include "doccit2vec/model.hpp"
#include "doccit2vec/random.hpp"
#include "doccit2vec/train.hpp"
#include "oracles.hpp"

namespace gradcheck {

using namespace dc2v;

struct Instance {
  ModelMatrices m;
  CitationRelation rel;
  std::vector<Index> negatives;
};

inline void fill(Rng& rng, Matrix& m, double scale) {
  for (double& v : m.data()) v = rng.uniform(-scale, scale);
}

/// k <= 8, at most 5 participants, at most 5 negatives.
inline Instance random_instance(std::uint64_t seed, Variant variant) {
  Rng rng(seed);
  const std::size_t k = 1 + rng.below(8);
  const std::size_t n_docs = 8, n_words = 6;
  Instance in;
  in.m.doc_in = Matrix(n_docs, k);
  in.m.doc_out = Matrix(n_docs, k);
  in.m.word_in = Matrix(n_words, k);
  in.m.word_out = Matrix(n_words, k);
  fill(rng, in.m.doc_in, 1.0);
  fill(rng, in.m.doc_out, 1.0);
  fill(rng, in.m.word_in, 1.0);
  fill(rng, in.m.word_out, 1.0);
  if (variant == Variant::Att) {
    in.m.attention.resize(n_docs + n_words);
    for (double& v : in.m.attention) v = rng.uniform(-1.5, 1.5);
  }

  in.rel.source = static_cast<Index>(rng.below(n_docs));
  in.rel.target = static_cast<Index>(rng.below(n_docs));
  const std::size_t participants = 1 + rng.below(5);
  const std::size_t n_struct = rng.below(participants);
  std::vector<Index> pool;
  for (Index d = 0; d < n_docs; ++d) {
    if (d != in.rel.source && d != in.rel.target) pool.push_back(d);
  }
  rng.shuffle(std::span<Index>(pool));
  for (std::size_t i = 0; i < n_struct && i < pool.size(); ++i) {
    in.rel.structural.push_back(pool[i]);
  }
  std::sort(in.rel.structural.begin(), in.rel.structural.end());
  const std::size_t n_ctx = participants - 1 - in.rel.structural.size();
  for (std::size_t i = 0; i < n_ctx; ++i) {
    in.rel.context.push_back(static_cast<Index>(rng.below(n_words)));
  }
  const std::size_t n_neg = 1 + rng.below(5);
  while (in.negatives.size() < n_neg) {
    const auto d = static_cast<Index>(rng.below(n_docs));
    if (d != in.rel.target) in.negatives.push_back(d);
  }
  return in;
}

inline std::vector<double> row_of(const Matrix& m, Index r) {
  auto s = m.row(r);
  return {s.begin(), s.end()};
}

/// Worst relative errors per parameter group.
struct Errors {
  double doc_in = 0, word_in = 0, doc_out = 0, attention = 0;
  double max() const { return std::max({doc_in, word_in, doc_out, attention}); }
};

inline Errors check(const Instance& in, Variant variant) {
  const bool structural = true;
  ModelMatrices updated = in.m;
  TrainScratch scratch;
  if (variant == Variant::Att) {
    backprop_att(updated, in.rel, in.negatives, 1.0, structural, scratch);
  } else {
    backprop_avg(updated, in.rel, in.negatives, 1.0, structural, scratch);
  }

  Errors err;
  auto analytic = [](const Matrix& before, const Matrix& after, Index r) {
    std::vector<double> g(before.cols());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = before.row(r)[i] - after.row(r)[i];
    return g;
  };
  auto numeric = [&](Matrix ModelMatrices::*table, Index r) {
    return oracle::numeric_gradient(
        [&](const std::vector<double>& v) {
          ModelMatrices probe = in.m;
          std::copy(v.begin(), v.end(), (probe.*table).row(r).begin());
          return relation_loss(probe, in.rel, in.negatives, variant, structural);
        },
        row_of(in.m.*table, r));
  };

  std::vector<Index> docs{in.rel.source};
  docs.insert(docs.end(), in.rel.structural.begin(), in.rel.structural.end());
  for (Index d : docs) {
    err.doc_in = std::max(err.doc_in, oracle::relative_error(
        analytic(in.m.doc_in, updated.doc_in, d), numeric(&ModelMatrices::doc_in, d)));
  }
  for (Index w : in.rel.context) {
    err.word_in = std::max(err.word_in, oracle::relative_error(
        analytic(in.m.word_in, updated.word_in, w), numeric(&ModelMatrices::word_in, w)));
  }
  std::vector<Index> outs{in.rel.target};
  outs.insert(outs.end(), in.negatives.begin(), in.negatives.end());
  for (Index d : outs) {
    err.doc_out = std::max(err.doc_out, oracle::relative_error(
        analytic(in.m.doc_out, updated.doc_out, d), numeric(&ModelMatrices::doc_out, d)));
  }

  if (variant == Variant::Att) {
    std::vector<double> a, n;
    std::vector<std::size_t> slots{in.rel.source};
    for (Index d : in.rel.structural) slots.push_back(d);
    for (Index w : in.rel.context) slots.push_back(in.m.word_slot(w));
    std::sort(slots.begin(), slots.end());
    slots.erase(std::unique(slots.begin(), slots.end()), slots.end());
    for (auto slot : slots) {
      a.push_back(in.m.attention[slot] - updated.attention[slot]);
      const double h = 1e-6;
      ModelMatrices probe = in.m;
      probe.attention[slot] += h;
      const double up = relation_loss(probe, in.rel, in.negatives, variant, structural);
      probe.attention[slot] -= 2 * h;
      const double down = relation_loss(probe, in.rel, in.negatives, variant, structural);
      n.push_back((up - down) / (2 * h));
    }
    err.attention = oracle::relative_error(a, n);
  }
  return err;
}

/// pv-dm: gradient of the loss w.r.t. the doc vector and each context word.
inline double check_pvdm(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t k = 4, n_words = 7;
  ModelMatrices m;
  m.word_in = Matrix(n_words, k);
  m.word_out = Matrix(n_words, k);
  fill(rng, m.word_in, 1.0);
  fill(rng, m.word_out, 1.0);
  std::vector<double> doc(k);
  for (double& v : doc) v = rng.uniform(-1, 1);
  std::vector<Index> context;
  const std::size_t n_ctx = rng.below(4);
  for (std::size_t i = 0; i < n_ctx; ++i) context.push_back(static_cast<Index>(rng.below(n_words)));
  const auto target = static_cast<Index>(rng.below(n_words));
  std::vector<Index> negs;
  while (negs.size() < 3) {
    const auto w = static_cast<Index>(rng.below(n_words));
    if (w != target) negs.push_back(w);
  }

  ModelMatrices updated = m;
  std::vector<double> doc_after = doc;
  TrainScratch scratch;
  pvdm_update(updated, doc_after, context, target, negs, 1.0, true, scratch);

  std::vector<double> a(k);
  for (std::size_t i = 0; i < k; ++i) a[i] = doc[i] - doc_after[i];
  const auto n = oracle::numeric_gradient(
      [&](const std::vector<double>& v) { return pvdm_loss(m, v, context, target, negs); }, doc);
  double worst = oracle::relative_error(a, n);

  std::vector<Index> uniq = context;
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  for (Index w : uniq) {
    std::vector<double> aw(k);
    for (std::size_t i = 0; i < k; ++i) aw[i] = m.word_in.row(w)[i] - updated.word_in.row(w)[i];
    const auto nw = oracle::numeric_gradient(
        [&](const std::vector<double>& v) {
          ModelMatrices probe = m;
          std::copy(v.begin(), v.end(), probe.word_in.row(w).begin());
          return pvdm_loss(probe, doc, context, target, negs);
        },
        row_of(m.word_in, w));
    worst = std::max(worst, oracle::relative_error(aw, nw));
  }
  return worst;
}

}  // namespace gradcheck
