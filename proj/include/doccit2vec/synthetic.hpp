#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace dc2v {

/// Planted co-citation corpus. Each topic owns `docs_per_topic` documents;
/// the first `clique_size` of them form the topic's clique and contain text
/// only. Every other document cites `cites_per_doc` distinct clique members
/// of its own topic, so clique members are "frequently cited together".
struct SyntheticSpec {
  std::size_t n_topics = 2;
  std::size_t docs_per_topic = 20;
  std::size_t clique_size = 4;
  std::size_t vocab_per_topic = 30;
  /// Fraction of words drawn from the union of all topic vocabularies, and
  /// of citations sent to a uniformly random document.
  double noise_rate = 0.1;
  std::uint64_t seed = 1;
  std::size_t words_per_doc = 60;
  /// 0 means `clique_size`.
  std::size_t cites_per_doc = 0;
};

/// Document ids are `t<topic>d<i>`, words `t<topic>w<j>`.
std::string generate_synthetic_corpus(const SyntheticSpec& spec);

}  // namespace dc2v
