#include "doccit2vec/config.hpp"

#include "doccit2vec/error.hpp"

namespace dc2v {

std::string_view to_string(Variant v) {
  return v == Variant::Att ? "att" : "avg";
}

Variant parse_variant(std::string_view s) {
  if (s == "avg") return Variant::Avg;
  if (s == "att") return Variant::Att;
  throw ConfigError("unknown variant '" + std::string(s) + "'");
}

void EmbeddingConfig::validate() const {
  if (dim < 1) throw ConfigError("dim must be >= 1");
  if (window < 1) throw ConfigError("window must be >= 1");
  if (negative < 1) throw ConfigError("negative must be >= 1");
  if (!(min_lr >= 0.0)) throw ConfigError("min_lr must be >= 0");
  if (!(learning_rate > min_lr)) {
    throw ConfigError("learning_rate must exceed min_lr");
  }
  if (workers < 1) throw ConfigError("workers must be >= 1");
}

}  // namespace dc2v
