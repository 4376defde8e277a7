// Serial reference kernels against their OpenMP versions, plus training
// throughput by worker count.

#include <benchmark/benchmark.h>

#include "doccit2vec/corpus.hpp"
#include "doccit2vec/kernels.hpp"
#include "doccit2vec/random.hpp"
#include "doccit2vec/synthetic.hpp"
#include "doccit2vec/train.hpp"

using namespace dc2v;

namespace {

struct ScoreInput {
  Matrix table;
  std::vector<double> query;
  std::vector<double> out;

  ScoreInput(std::size_t rows, std::size_t dim) : table(rows, dim), query(dim), out(rows) {
    Rng rng(1);
    for (double& v : table.data()) v = rng.uniform(-1, 1);
    for (double& v : query) v = rng.uniform(-1, 1);
  }
};

template <void (*Kernel)(const Matrix&, std::span<const double>, std::span<double>)>
void BM_score(benchmark::State& state) {
  ScoreInput in(static_cast<std::size_t>(state.range(0)), 100);
  for (auto _ : state) {
    Kernel(in.table, in.query, in.out);
    benchmark::DoNotOptimize(in.out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK(BM_score<kernels::score_dot_serial>)->Name("score_dot/serial")->Arg(1000)->Arg(100000);
BENCHMARK(BM_score<kernels::score_dot>)->Name("score_dot/omp")->Arg(1000)->Arg(100000);
BENCHMARK(BM_score<kernels::score_cosine_serial>)->Name("score_cosine/serial")->Arg(1000)->Arg(100000);
BENCHMARK(BM_score<kernels::score_cosine>)->Name("score_cosine/omp")->Arg(1000)->Arg(100000);

void BM_train(benchmark::State& state) {
  SyntheticSpec spec;
  spec.n_topics = 10;
  spec.docs_per_topic = 50;
  spec.clique_size = 5;
  spec.vocab_per_topic = 200;
  spec.words_per_doc = 200;
  const auto corpus = parse_corpus_string(generate_synthetic_corpus(spec));
  EmbeddingConfig c;
  c.dim = 100;
  c.negative = 5;
  c.retrofit_epochs = 0;
  c.iterations = 1;
  c.workers = static_cast<std::size_t>(state.range(0));
  const auto relations = extract_relations(corpus.docs, corpus.vocab, c.window);
  for (auto _ : state) {
    state.PauseTiming();
    auto model = make_model(corpus.vocab, c);
    state.ResumeTiming();
    train(model, relations, corpus.docs);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(relations.size()));
}

BENCHMARK(BM_train)->Name("train/workers")->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
