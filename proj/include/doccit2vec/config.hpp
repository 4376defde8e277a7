#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace dc2v {

enum class Variant : std::uint8_t { Avg = 0, Att = 1 };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view s);

/// Training hyperparameters. The learning-rate pair follows the word2vec
/// family.
struct EmbeddingConfig {
  std::size_t dim = 100;
  std::size_t window = 50;
  std::size_t negative = 1000;
  std::size_t iterations = 100;
  std::size_t retrofit_epochs = 5;
  double learning_rate = 0.025;
  double min_lr = 0.0001;
  Variant variant = Variant::Avg;
  /// false pools only the citing doc and context words (HyperDoc2Vec mode).
  bool structural_context = true;
  std::uint64_t seed = 1;
  std::size_t workers = 1;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
  friend bool operator==(const EmbeddingConfig&,
                         const EmbeddingConfig&) = default;
};

}  // namespace dc2v
