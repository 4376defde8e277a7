#include "doccit2vec/sampler.hpp"

#include <algorithm>
#include <cmath>

namespace dc2v {

NegativeSampler::NegativeSampler(std::span<const std::uint64_t> counts,
                                 double power) {
  cumulative_.reserve(counts.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] > 0) {
      acc += std::pow(static_cast<double>(counts[i]), power);
      last_positive_ = static_cast<Index>(i);
    }
    cumulative_.push_back(acc);
  }
  total_ = acc;
}

double NegativeSampler::probability(Index i) const {
  if (!has_mass() || i >= cumulative_.size()) return 0.0;
  const double lo = i == 0 ? 0.0 : cumulative_[i - 1];
  return (cumulative_[i] - lo) / total_;
}

Index NegativeSampler::draw(Rng& rng) const {
  const double u = rng.uniform() * total_;
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) return last_positive_;
  return static_cast<Index>(it - cumulative_.begin());
}

void NegativeSampler::draw_negatives(Rng& rng, Index avoid, std::size_t n,
                                     std::vector<Index>& out) const {
  if (!has_mass()) return;
  for (std::size_t k = 0; k < n; ++k) {
    for (int attempt = 0; attempt < kMaxCollisionRetries; ++attempt) {
      const Index d = draw(rng);
      if (d != avoid) {
        out.push_back(d);
        break;
      }
    }
  }
}

}  // namespace dc2v
