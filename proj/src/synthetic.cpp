#include "doccit2vec/synthetic.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "doccit2vec/error.hpp"
#include "doccit2vec/random.hpp"

namespace dc2v {

namespace {

std::string doc_id(std::size_t topic, std::size_t i) {
  return "t" + std::to_string(topic) + "d" + std::to_string(i);
}

std::string word(std::size_t topic, std::size_t j) {
  return "t" + std::to_string(topic) + "w" + std::to_string(j);
}

}  // namespace

std::string generate_synthetic_corpus(const SyntheticSpec& spec) {
  if (spec.n_topics < 1 || spec.docs_per_topic < 1 || spec.clique_size < 1 ||
      spec.vocab_per_topic < 1 || spec.words_per_doc < 1) {
    throw ConfigError("synthetic corpus counts must be >= 1");
  }
  if (!(spec.noise_rate >= 0.0 && spec.noise_rate < 1.0)) {
    throw ConfigError("noise_rate must lie in [0, 1)");
  }
  if (spec.clique_size > spec.docs_per_topic) {
    throw ConfigError("clique_size exceeds docs_per_topic");
  }
  const std::size_t cites =
      spec.cites_per_doc == 0 ? spec.clique_size : spec.cites_per_doc;
  if (cites > spec.clique_size) {
    throw ConfigError("cites_per_doc exceeds clique_size");
  }

  Rng rng(spec.seed);
  auto draw_word = [&](std::size_t topic) {
    if (rng.bernoulli(spec.noise_rate)) {
      return word(rng.below(spec.n_topics), rng.below(spec.vocab_per_topic));
    }
    return word(topic, rng.below(spec.vocab_per_topic));
  };

  std::string out;
  std::vector<std::size_t> clique(spec.clique_size);
  for (std::size_t t = 0; t < spec.n_topics; ++t) {
    for (std::size_t i = 0; i < spec.docs_per_topic; ++i) {
      std::vector<std::string> tokens;
      tokens.reserve(spec.words_per_doc + cites);
      for (std::size_t w = 0; w < spec.words_per_doc; ++w) {
        tokens.push_back(draw_word(t));
      }
      if (i >= spec.clique_size) {
        std::iota(clique.begin(), clique.end(), std::size_t{0});
        rng.shuffle(std::span<std::size_t>(clique));
        std::vector<std::string> targets;
        for (std::size_t c = 0; c < cites; ++c) {
          targets.push_back(doc_id(t, clique[c]));
        }
        // A noisy slot cites a random document instead.
        const std::size_t n_docs = spec.n_topics * spec.docs_per_topic;
        for (auto& target : targets) {
          if (n_docs <= cites + 1 || !rng.bernoulli(spec.noise_rate)) continue;
          std::string pick;
          do {
            const std::size_t d = rng.below(n_docs);
            pick = doc_id(d / spec.docs_per_topic, d % spec.docs_per_topic);
          } while (pick == doc_id(t, i) ||
                   std::find(targets.begin(), targets.end(), pick) != targets.end());
          target = pick;
        }
        // Citations are spread evenly through the text.
        for (std::size_t c = 0; c < cites; ++c) {
          const std::size_t slot = (c + 1) * spec.words_per_doc / (cites + 1);
          tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(slot + c),
                        "[[" + targets[c] + "]]");
        }
      }
      out += doc_id(t, i);
      out += '\t';
      for (std::size_t k = 0; k < tokens.size(); ++k) {
        if (k) out += ' ';
        out += tokens[k];
      }
      out += '\n';
    }
  }
  return out;
}

}  // namespace dc2v
