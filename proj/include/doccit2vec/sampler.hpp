#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "doccit2vec/corpus.hpp"
#include "doccit2vec/random.hpp"

namespace dc2v {

/// Noise distribution proportional to count^power, drawn by inverting the
/// cumulative table. Items with zero count are never drawn.
class NegativeSampler {
public:
  static constexpr double kDefaultPower = 0.75;
  static constexpr int kMaxCollisionRetries = 100;

  NegativeSampler() = default;
  explicit NegativeSampler(std::span<const std::uint64_t> counts,
                           double power = kDefaultPower);

  /// False when every count is zero.
  bool has_mass() const noexcept { return total_ > 0.0; }
  std::size_t size() const noexcept { return cumulative_.size(); }

  /// Probability of drawing item i.
  double probability(Index i) const;

  Index draw(Rng& rng) const;

  /// Appends up to `n` draws to `out`, resampling any draw equal to `avoid`.
  /// A slot that collides kMaxCollisionRetries times in a row is skipped.
  void draw_negatives(Rng& rng, Index avoid, std::size_t n,
                      std::vector<Index>& out) const;

private:
  std::vector<double> cumulative_;
  double total_ = 0.0;
  Index last_positive_ = 0;
};

}  // namespace dc2v
