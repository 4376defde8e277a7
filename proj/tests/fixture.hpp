#pragma once

// The pinned synthetic fixture shared by the unit, CLI and acceptance tests.

#include <string>
#include <vector>

#include "doccit2vec/corpus.hpp"
#include "doccit2vec/eval.hpp"
#include "doccit2vec/synthetic.hpp"
#include "doccit2vec/train.hpp"

namespace fixture {

using namespace dc2v;

inline constexpr std::uint64_t kSeed = 20240517;

inline SyntheticSpec spec() {
  SyntheticSpec s;
  s.n_topics = 2;
  s.docs_per_topic = 20;
  s.clique_size = 4;
  s.vocab_per_topic = 30;
  s.noise_rate = 0.3;
  s.words_per_doc = 60;
  s.seed = kSeed;
  return s;
}

inline Corpus corpus() { return parse_corpus_string(generate_synthetic_corpus(spec())); }

inline EmbeddingConfig config(Variant variant = Variant::Avg, std::size_t iterations = 80) {
  EmbeddingConfig c;
  c.dim = 16;
  c.window = 5;
  c.negative = 5;
  c.iterations = iterations;
  c.retrofit_epochs = 5;
  c.learning_rate = 0.1;
  c.variant = variant;
  c.seed = kSeed;
  c.workers = 1;
  return c;
}

struct Trained {
  Model model;
  TrainReport report;
};

inline Trained train_on(const std::vector<HyperDocument>& docs, const EmbeddingConfig& c) {
  auto vocab = build_vocabulary(docs);
  auto relations = extract_relations(docs, vocab, c.window);
  Trained t{make_model(std::move(vocab), c), {}};
  t.report = train(t.model, relations, docs);
  return t;
}

struct HeldOut {
  TrainTestSplit split;
  Trained trained;
  GroundTruth truth;
};

inline TrainTestSplit split(const Corpus& c, std::size_t window) {
  SplitOptions o;
  o.fraction = 0.2;
  o.window = window;
  o.seed = kSeed;
  return split_train_test(c.docs, o);
}

inline HeldOut held_out(const EmbeddingConfig& c) {
  const auto all = corpus();
  HeldOut h{split(all, c.window), {}, {}};
  h.trained = train_on(h.split.train_docs, c);
  h.truth = resolve_ground_truth(h.split.test_relations, h.trained.model.vocab);
  return h;
}

}  // namespace fixture
