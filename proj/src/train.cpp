#include "doccit2vec/train.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <numeric>

#include <omp.h>

#include "doccit2vec/error.hpp"
#include "doccit2vec/kernels.hpp"

namespace dc2v {

std::string format_progress(const TrainProgress& p) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "epoch=%llu seen=%llu lr=%.6g loss=%.6f",
                static_cast<unsigned long long>(p.epoch),
                static_cast<unsigned long long>(p.relations_seen),
                p.current_lr, p.running_loss);
  return buf;
}

namespace {

double decayed_lr(const EmbeddingConfig& c, std::uint64_t done,
                  std::uint64_t total) {
  if (total == 0) return c.learning_rate;
  const double frac =
      std::min(1.0, static_cast<double>(done) / static_cast<double>(total));
  return c.learning_rate - (c.learning_rate - c.min_lr) * frac;
}

void resize_scratch(TrainScratch& s, std::size_t dim, std::size_t n_out) {
  s.hidden.resize(dim);
  s.grad_x.resize(dim);
  s.coefs.resize(n_out);
}

// Gathers the citation-step participants into scratch.rows and
// scratch.slots (attention slots), in the order source, structural, context.
void gather_participants(const ModelMatrices& m, const CitationRelation& rel,
                         bool structural, TrainScratch& s) {
  s.rows.clear();
  s.slots.clear();
  s.rows.push_back(m.doc_in.row(rel.source));
  s.slots.push_back(rel.source);
  if (structural) {
    for (Index d : rel.structural) {
      s.rows.push_back(m.doc_in.row(d));
      s.slots.push_back(d);
    }
  }
  for (Index w : rel.context) {
    s.rows.push_back(m.word_in.row(w));
    s.slots.push_back(m.word_slot(w));
  }
}

std::vector<std::span<const double>> output_rows(
    const Matrix& out, std::span<const Index> negatives) {
  std::vector<std::span<const double>> rows;
  rows.reserve(negatives.size());
  for (Index d : negatives) rows.push_back(out.row(d));
  return rows;
}

std::span<const std::span<const double>> output_rows(
    const Matrix& out, std::span<const Index> negatives, TrainScratch& s) {
  s.out_rows.clear();
  for (Index d : negatives) s.out_rows.push_back(out.row(d));
  return s.out_rows;
}

void update_outputs(Matrix& out, Index target, std::span<const Index> negatives,
                    std::span<const double> coefs, std::span<const double> x,
                    double lr) {
  kernels::axpy(-lr * coefs[0], x, out.row(target));
  for (std::size_t i = 0; i < negatives.size(); ++i) {
    kernels::axpy(-lr * coefs[1 + i], x, out.row(negatives[i]));
  }
}

// Applies `update(row)` to each citation-step IN row in participant order.
template <class F>
void for_each_in_row(ModelMatrices& m, const CitationRelation& rel,
                     bool structural, F&& update) {
  std::size_t j = 0;
  update(j++, m.doc_in.row(rel.source));
  if (structural) {
    for (Index d : rel.structural) update(j++, m.doc_in.row(d));
  }
  for (Index w : rel.context) update(j++, m.word_in.row(w));
}

void check_indices(const ModelMatrices& m, const CitationRelation& rel,
                   std::span<const Index> negatives) {
  const auto nd = m.doc_in.rows();
  const auto nw = m.word_in.rows();
  bool ok = rel.source < nd && rel.target < nd;
  for (Index d : rel.structural) ok = ok && d < nd;
  for (Index w : rel.context) ok = ok && w < nw;
  for (Index d : negatives) ok = ok && d < nd;
  if (!ok) throw Error("relation index out of range");
}

}  // namespace

// ---------------------------------------------------------------------------
// pv-dm

void pvdm_context(std::span<const Index> words, std::size_t pos,
                  std::size_t window, std::vector<Index>& out) {
  out.clear();
  const std::size_t lo = pos >= window ? pos - window : 0;
  const std::size_t hi = std::min(words.size(), pos + window + 1);
  for (std::size_t i = lo; i < hi; ++i) {
    if (i != pos) out.push_back(words[i]);
  }
}

double pvdm_loss(const ModelMatrices& m, std::span<const double> doc_vec,
                 std::span<const Index> context, Index target,
                 std::span<const Index> negatives) {
  std::vector<std::span<const double>> rows{doc_vec};
  for (Index w : context) rows.push_back(m.word_in.row(w));
  std::vector<double> hidden(doc_vec.size());
  kernels::hidden_avg(rows, hidden);
  const auto outs = output_rows(m.word_out, negatives);
  return kernels::ns_loss_and_grads(hidden, m.word_out.row(target), outs).loss;
}

double pvdm_gradient(const ModelMatrices& m, std::span<const double> doc_vec,
                     std::span<const Index> context, Index target,
                     std::span<const Index> negatives, TrainScratch& s) {
  resize_scratch(s, doc_vec.size(), 1 + negatives.size());
  s.rows.clear();
  s.rows.push_back(doc_vec);
  for (Index w : context) s.rows.push_back(m.word_in.row(w));
  kernels::hidden_avg(s.rows, s.hidden);
  const auto outs = output_rows(m.word_out, negatives, s);
  return kernels::ns_loss_and_grads(s.hidden, m.word_out.row(target), outs,
                                    s.grad_x, s.coefs);
}

double pvdm_update(ModelMatrices& m, std::span<double> doc_vec,
                   std::span<const Index> context, Index target,
                   std::span<const Index> negatives, double lr,
                   bool update_words, TrainScratch& s) {
  const double loss = pvdm_gradient(m, doc_vec, context, target, negatives, s);
  const double step = -lr / static_cast<double>(s.rows.size());
  if (update_words) {
    update_outputs(m.word_out, target, negatives, s.coefs, s.hidden, lr);
    for (Index w : context) kernels::axpy(step, s.grad_x, m.word_in.row(w));
  }
  kernels::axpy(step, s.grad_x, doc_vec);
  return loss;
}

std::vector<double> retrofit_pvdm(const std::vector<HyperDocument>& docs,
                                  const Vocabulary& vocab,
                                  const EmbeddingConfig& config,
                                  ModelMatrices& m) {
  config.validate();
  std::vector<double> epoch_losses;
  if (config.retrofit_epochs == 0) return epoch_losses;

  struct DocWords {
    Index doc;
    std::vector<Index> words;
  };
  std::vector<DocWords> items;
  std::uint64_t positions = 0;
  for (const auto& doc : docs) {
    DocWords dw;
    auto id = vocab.docs.find(doc.id);
    if (!id) throw Error("document '" + doc.id + "' not in vocabulary");
    dw.doc = *id;
    for (const auto& tok : doc.tokens) {
      if (tok.is_cite()) continue;
      auto w = vocab.words.find(tok.text);
      if (!w) throw Error("word '" + tok.text + "' not in vocabulary");
      dw.words.push_back(*w);
    }
    positions += dw.words.size();
    if (!dw.words.empty()) items.push_back(std::move(dw));
  }
  if (positions == 0) return epoch_losses;

  const NegativeSampler sampler(vocab.word_counts);
  const std::uint64_t total = positions * config.retrofit_epochs;
  std::atomic<std::uint64_t> done{0};
  const auto n_items = static_cast<std::ptrdiff_t>(items.size());
  const int workers = static_cast<int>(config.workers);

  for (std::size_t epoch = 0; epoch < config.retrofit_epochs; ++epoch) {
    std::vector<double> partial(config.workers, 0.0);
#pragma omp parallel num_threads(workers)
    {
      const int tid = omp_get_thread_num();
      Rng rng(mix_seed(config.seed, 0x5e70000 + epoch * 4096 + tid));
      TrainScratch scratch;
      std::vector<Index> context;
      double local = 0.0;
#pragma omp for schedule(static)
      for (std::ptrdiff_t i = 0; i < n_items; ++i) {
        const auto& item = items[i];
        auto doc_vec = m.doc_in.row(item.doc);
        for (std::size_t pos = 0; pos < item.words.size(); ++pos) {
          pvdm_context(item.words, pos, config.window, context);
          scratch.negatives.clear();
          sampler.draw_negatives(rng, item.words[pos], config.negative,
                                 scratch.negatives);
          const double lr = decayed_lr(
              config, done.fetch_add(1, std::memory_order_relaxed), total);
          local += pvdm_update(m, doc_vec, context, item.words[pos],
                               scratch.negatives, lr, true, scratch);
        }
      }
      partial[tid] = local;
    }
    epoch_losses.push_back(std::accumulate(partial.begin(), partial.end(), 0.0) /
                           static_cast<double>(positions));
  }
  return epoch_losses;
}

// ---------------------------------------------------------------------------
// citation step

double relation_loss(const ModelMatrices& m, const CitationRelation& rel,
                     std::span<const Index> negatives, Variant variant,
                     bool structural_context) {
  check_indices(m, rel, negatives);
  TrainScratch s;
  gather_participants(m, rel, structural_context, s);
  std::vector<double> hidden(m.doc_in.cols());
  if (variant == Variant::Att) {
    std::vector<double> scores, ratios(s.slots.size());
    for (auto slot : s.slots) scores.push_back(m.attention.at(slot));
    kernels::attention_ratios(scores, ratios);
    kernels::hidden_att(ratios, s.rows, hidden);
  } else {
    kernels::hidden_avg(s.rows, hidden);
  }
  const auto outs = output_rows(m.doc_out, negatives);
  return kernels::ns_loss_and_grads(hidden, m.doc_out.row(rel.target), outs)
      .loss;
}

double backprop_avg(ModelMatrices& m, const CitationRelation& rel,
                    std::span<const Index> negatives, double lr,
                    bool structural_context, TrainScratch& s) {
  check_indices(m, rel, negatives);
  resize_scratch(s, m.doc_in.cols(), 1 + negatives.size());
  gather_participants(m, rel, structural_context, s);
  kernels::hidden_avg(s.rows, s.hidden);

  const auto outs = output_rows(m.doc_out, negatives, s);
  const double loss = kernels::ns_loss_and_grads(
      s.hidden, m.doc_out.row(rel.target), outs, s.grad_x, s.coefs);

  update_outputs(m.doc_out, rel.target, negatives, s.coefs, s.hidden, lr);
  const double weight = 1.0 / static_cast<double>(s.rows.size());
  for_each_in_row(m, rel, structural_context, [&](std::size_t, auto row) {
    kernels::axpy(-lr * weight, s.grad_x, row);
  });
  return loss;
}

double backprop_att(ModelMatrices& m, const CitationRelation& rel,
                    std::span<const Index> negatives, double lr,
                    bool structural_context, TrainScratch& s) {
  check_indices(m, rel, negatives);
  if (m.attention.size() != m.doc_in.rows() + m.word_in.rows()) {
    throw Error("attention scores are not allocated");
  }
  resize_scratch(s, m.doc_in.cols(), 1 + negatives.size());
  gather_participants(m, rel, structural_context, s);
  const std::size_t n = s.rows.size();
  s.scores.resize(n);
  s.ratios.resize(n);
  s.slot_grads.resize(n);
  for (std::size_t j = 0; j < n; ++j) s.scores[j] = m.attention[s.slots[j]];
  kernels::attention_ratios(s.scores, s.ratios);
  kernels::hidden_att(s.ratios, s.rows, s.hidden);

  const auto outs = output_rows(m.doc_out, negatives, s);
  const double loss = kernels::ns_loss_and_grads(
      s.hidden, m.doc_out.row(rel.target), outs, s.grad_x, s.coefs);

  // dL/dk_j = a_j * (g.v_j - sum_m a_m g.v_m), using pre-update vectors.
  double mean_proj = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    s.slot_grads[j] = kernels::dot(s.grad_x, s.rows[j]);
    mean_proj += s.ratios[j] * s.slot_grads[j];
  }
  for (std::size_t j = 0; j < n; ++j) {
    s.slot_grads[j] = s.ratios[j] * (s.slot_grads[j] - mean_proj);
  }

  update_outputs(m.doc_out, rel.target, negatives, s.coefs, s.hidden, lr);
  for_each_in_row(m, rel, structural_context, [&](std::size_t j, auto row) {
    kernels::axpy(-lr * s.ratios[j], s.grad_x, row);
  });
  for (std::size_t j = 0; j < n; ++j) {
    m.attention[s.slots[j]] -= lr * s.slot_grads[j];
  }
  return loss;
}

double train_relation(ModelMatrices& m, const CitationRelation& rel,
                      const NegativeSampler& sampler, Rng& rng,
                      const EmbeddingConfig& config, double lr,
                      TrainScratch& scratch) {
  scratch.negatives.clear();
  sampler.draw_negatives(rng, rel.target, config.negative, scratch.negatives);
  const std::span<const Index> negatives(scratch.negatives);
  if (config.variant == Variant::Att) {
    return backprop_att(m, rel, negatives, lr, config.structural_context,
                        scratch);
  }
  return backprop_avg(m, rel, negatives, lr, config.structural_context,
                      scratch);
}

Model make_model(Vocabulary vocab, const EmbeddingConfig& config) {
  config.validate();
  Model model;
  model.config = config;
  model.matrices = init_matrices(vocab, config);
  model.vocab = std::move(vocab);
  return model;
}

TrainReport train(Model& model, const std::vector<CitationRelation>& relations,
                  const std::vector<HyperDocument>& docs,
                  const ProgressCallback& on_epoch) {
  const EmbeddingConfig& config = model.config;
  config.validate();
  if (relations.empty()) throw ConfigError("no citation relations to train on");

  TrainReport report;
  report.retrofit_losses =
      retrofit_pvdm(docs, model.vocab, config, model.matrices);

  const NegativeSampler sampler(model.vocab.doc_cited_counts);
  std::vector<std::size_t> order(relations.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle_rng(mix_seed(config.seed, 0xc17e));

  const std::uint64_t total =
      static_cast<std::uint64_t>(relations.size()) * config.iterations;
  std::atomic<std::uint64_t> done{0};
  const auto n_rel = static_cast<std::ptrdiff_t>(relations.size());
  const int workers = static_cast<int>(config.workers);
  ModelMatrices& m = model.matrices;

  for (std::size_t epoch = 0; epoch < config.iterations; ++epoch) {
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    std::vector<double> partial(config.workers, 0.0);
#pragma omp parallel num_threads(workers)
    {
      const int tid = omp_get_thread_num();
      Rng rng(mix_seed(config.seed, 0xd0c0000 + epoch * 4096 + tid));
      TrainScratch scratch;
      double local = 0.0;
#pragma omp for schedule(static)
      for (std::ptrdiff_t i = 0; i < n_rel; ++i) {
        const double lr = decayed_lr(
            config, done.fetch_add(1, std::memory_order_relaxed), total);
        local += train_relation(m, relations[order[i]], sampler, rng, config,
                                lr, scratch);
      }
      partial[tid] = local;
    }
    if (!m.all_finite()) {
      throw Error("non-finite parameters after epoch " +
                  std::to_string(epoch + 1));
    }
    ++model.trained_epochs;
    TrainProgress p;
    p.epoch = epoch + 1;
    p.relations_seen = done.load();
    p.current_lr = decayed_lr(config, p.relations_seen, total);
    p.running_loss = std::accumulate(partial.begin(), partial.end(), 0.0) /
                     static_cast<double>(relations.size());
    report.epochs.push_back(p);
    if (on_epoch) on_epoch(p);
  }
  return report;
}

}  // namespace dc2v
