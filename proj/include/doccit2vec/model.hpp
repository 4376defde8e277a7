#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "doccit2vec/config.hpp"
#include "doccit2vec/corpus.hpp"
#include "doccit2vec/matrix.hpp"

namespace dc2v {

class NegativeSampler;

/// Embedding parameters. Document rows follow Vocabulary::docs, word rows
/// follow Vocabulary::words. `attention` has one slot per document followed
/// by one per word and is empty for the average variant.
struct ModelMatrices {
  Matrix doc_in;    // citing-role vectors
  Matrix doc_out;   // cited-role vectors
  Matrix word_in;
  Matrix word_out;  // used by the pv-dm retrofit and inference only
  std::vector<double> attention;

  std::size_t word_slot(Index w) const { return doc_in.rows() + w; }
  bool all_finite() const;
  friend bool operator==(const ModelMatrices&, const ModelMatrices&) = default;
};

struct Model {
  EmbeddingConfig config;
  Vocabulary vocab;
  ModelMatrices matrices;
  std::uint64_t trained_epochs = 0;
};

/// IN matrices uniform in [-0.5/k, 0.5/k]; OUT matrices and attention scores
/// zero. Deterministic in config.seed.
ModelMatrices init_matrices(const Vocabulary& vocab,
                            const EmbeddingConfig& config);

inline constexpr char kModelMagic[4] = {'D', 'C', 'V', '2'};
inline constexpr std::uint32_t kModelVersion = 1;

/// Binary little-endian model file: magic, version, config, vocabulary,
/// matrices, then a CRC-32 of everything before it.
void save_model(const Model& model, std::ostream& out);
Model load_model(std::istream& in);
void save_model_file(const Model& model, const std::string& path);
Model load_model_file(const std::string& path);

enum class ExportTable { DocIn, DocOut, WordIn };
ExportTable parse_export_table(std::string_view s);

/// word2vec text format: `<count> <dim>` header, then `<token> <v1> ... <vk>`
/// per row. Document tokens carry a `doc:` prefix. Values are written in
/// shortest round-trip decimal form.
void export_word2vec_text(const Model& model, ExportTable which,
                          std::ostream& out);

/// Fits a fresh document vector to `words` with pv-dm steps against the
/// frozen word tables, starting from the mean IN vector of `words`. The
/// learning rate decays linearly from `lr` to config.min_lr.
std::vector<double> infer_doc_vector(const Model& model,
                                     std::span<const Index> words,
                                     std::size_t steps, double lr);
std::vector<double> infer_doc_vector(const Model& model,
                                     const NegativeSampler& word_sampler,
                                     std::span<const Index> words,
                                     std::size_t steps, double lr);

}  // namespace dc2v
