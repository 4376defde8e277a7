#pragma once

// Two-step training: a pv-dm retrofit that learns content vectors, then
// citation training that predicts each cited document's OUT vector from the
// pooled IN vectors of the citing document, its structural context and the
// local context words.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "doccit2vec/config.hpp"
#include "doccit2vec/corpus.hpp"
#include "doccit2vec/model.hpp"
#include "doccit2vec/random.hpp"
#include "doccit2vec/sampler.hpp"

namespace dc2v {

struct TrainProgress {
  std::uint64_t epoch = 0;
  std::uint64_t relations_seen = 0;
  double current_lr = 0.0;
  double running_loss = 0.0;  // mean loss over the epoch
};

/// `epoch=<e> seen=<n> lr=<f> loss=<f>`
std::string format_progress(const TrainProgress& p);

using ProgressCallback = std::function<void(const TrainProgress&)>;

/// Reusable buffers for one worker.
struct TrainScratch {
  std::vector<std::span<const double>> rows;
  std::vector<std::span<const double>> out_rows;
  std::vector<std::size_t> slots;
  std::vector<double> hidden;
  std::vector<double> grad_x;
  std::vector<double> coefs;
  std::vector<double> ratios;
  std::vector<double> scores;
  std::vector<double> slot_grads;
  std::vector<Index> negatives;
};

// ---------------------------------------------------------------------------
// Step one: pv-dm retrofit

/// Loss of predicting word `target` from the mean of `doc_vec` and the IN
/// vectors of `context`, against the given negative words.
double pvdm_loss(const ModelMatrices& m, std::span<const double> doc_vec,
                 std::span<const Index> context, Index target,
                 std::span<const Index> negatives);

/// Forward and backward pass of one pv-dm example without updating anything.
/// Leaves the hidden layer in scratch.hidden, dL/dhidden in scratch.grad_x,
/// output coefficients in scratch.coefs and the participants in scratch.rows.
double pvdm_gradient(const ModelMatrices& m, std::span<const double> doc_vec,
                     std::span<const Index> context, Index target,
                     std::span<const Index> negatives, TrainScratch& scratch);

/// One pv-dm gradient step. `doc_vec` is always updated; the word tables are
/// updated only when `update_words` is set. Returns the pre-update loss.
double pvdm_update(ModelMatrices& m, std::span<double> doc_vec,
                   std::span<const Index> context, Index target,
                   std::span<const Index> negatives, double lr,
                   bool update_words, TrainScratch& scratch);

/// Word positions of `words` around `pos` within `window` on each side.
void pvdm_context(std::span<const Index> words, std::size_t pos,
                  std::size_t window, std::vector<Index>& out);

/// Runs config.retrofit_epochs pv-dm passes over the documents, updating
/// word_in, word_out and doc_in. Returns the mean loss of each epoch.
std::vector<double> retrofit_pvdm(const std::vector<HyperDocument>& docs,
                                  const Vocabulary& vocab,
                                  const EmbeddingConfig& config,
                                  ModelMatrices& m);

// ---------------------------------------------------------------------------
// Step two: citation training

/// Forward pass only: loss of one relation under the given negatives.
double relation_loss(const ModelMatrices& m, const CitationRelation& rel,
                     std::span<const Index> negatives, Variant variant,
                     bool structural_context);

/// One SGD step through the average hidden layer. Returns the pre-update
/// loss. With structural_context false the structural docs are ignored.
double backprop_avg(ModelMatrices& m, const CitationRelation& rel,
                    std::span<const Index> negatives, double lr,
                    bool structural_context, TrainScratch& scratch);

/// One SGD step through the attention hidden layer; also updates the
/// attention scores of every participant.
double backprop_att(ModelMatrices& m, const CitationRelation& rel,
                    std::span<const Index> negatives, double lr,
                    bool structural_context, TrainScratch& scratch);

/// Draws `config.negative` documents (never rel.target) and applies the
/// configured variant's step.
double train_relation(ModelMatrices& m, const CitationRelation& rel,
                      const NegativeSampler& sampler, Rng& rng,
                      const EmbeddingConfig& config, double lr,
                      TrainScratch& scratch);

/// Fresh model with initialised matrices.
Model make_model(Vocabulary vocab, const EmbeddingConfig& config);

struct TrainReport {
  std::vector<double> retrofit_losses;
  std::vector<TrainProgress> epochs;
};

/// Retrofits on `docs`, then runs config.iterations shuffled passes over
/// `relations`. The learning rate decays linearly over all scheduled
/// citation updates. With workers > 1 the passes run lock-free on shared
/// rows; only workers == 1 is reproducible.
TrainReport train(Model& model, const std::vector<CitationRelation>& relations,
                  const std::vector<HyperDocument>& docs,
                  const ProgressCallback& on_epoch = {});

}  // namespace dc2v
