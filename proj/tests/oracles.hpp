#pragma once

// Test-only reference computations, written from the definitions and kept
// independent of the library's implementation paths.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

namespace oracle {

/// Central finite-difference gradient of f at x.
inline std::vector<double> numeric_gradient(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x, double h = 1e-6) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

/// ||a - b|| / max(||a||, ||b||); 0 when both vanish.
inline double relative_error(const std::vector<double>& a,
                             const std::vector<double>& b) {
  double diff = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double scale = std::sqrt(std::max(na, nb));
  return scale == 0 ? 0.0 : std::sqrt(diff) / scale;
}

/// Negative-sampling loss straight from its definition.
inline double ns_loss(const std::vector<double>& x, const std::vector<double>& t,
                      const std::vector<std::vector<double>>& negs) {
  auto dotp = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };
  auto sig = [](double z) { return 1.0 / (1.0 + std::exp(-z)); };
  double loss = -std::log(sig(dotp(x, t)));
  for (const auto& n : negs) loss -= std::log(sig(-dotp(x, n)));
  return loss;
}

/// Full softmax over output rows: exp(x.d_o) / sum exp(x.d).
inline std::vector<double> full_softmax(const std::vector<double>& x,
                                        const std::vector<std::vector<double>>& outs) {
  std::vector<double> logits;
  for (const auto& o : outs) {
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * o[i];
    logits.push_back(s);
  }
  const double hi = *std::max_element(logits.begin(), logits.end());
  double z = 0;
  for (double& l : logits) z += (l = std::exp(l - hi));
  for (double& l : logits) l /= z;
  return logits;
}

/// Sort of (score, id) pairs: score descending, id ascending.
inline std::vector<std::string> brute_force_ranking(
    std::vector<std::pair<double, std::string>> scored, std::size_t k) {
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(k, scored.size()); ++i) {
    out.push_back(scored[i].second);
  }
  return out;
}

// Metrics written from their textbook definitions over string-free ids.
inline double naive_recall(const std::vector<unsigned>& ranked,
                           const std::vector<unsigned>& relevant, std::size_t k) {
  std::size_t hit = 0;
  for (unsigned r : relevant) {
    for (std::size_t i = 0; i < ranked.size() && i < k; ++i) {
      if (ranked[i] == r) {
        ++hit;
        break;
      }
    }
  }
  return static_cast<double>(hit) / relevant.size();
}

inline double naive_ap(const std::vector<unsigned>& ranked,
                       const std::vector<unsigned>& relevant, std::size_t k) {
  double total = 0;
  const std::size_t n = std::min(k, ranked.size());
  for (std::size_t pos = 0; pos < n; ++pos) {
    if (std::find(relevant.begin(), relevant.end(), ranked[pos]) == relevant.end()) {
      continue;
    }
    // precision at this cutoff
    std::size_t rel_upto = 0;
    for (std::size_t j = 0; j <= pos; ++j) {
      rel_upto += std::count(relevant.begin(), relevant.end(), ranked[j]) > 0;
    }
    total += static_cast<double>(rel_upto) / (pos + 1);
  }
  return total / std::min(relevant.size(), k);
}

inline double naive_ndcg(const std::vector<unsigned>& ranked,
                         const std::vector<unsigned>& relevant, std::size_t k) {
  std::vector<double> gains;
  for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) {
    gains.push_back(std::count(relevant.begin(), relevant.end(), ranked[i]) ? 1.0 : 0.0);
  }
  double dcg = 0;
  for (std::size_t i = 0; i < gains.size(); ++i) dcg += gains[i] / std::log2(i + 2.0);
  std::vector<double> ideal(std::min(k, relevant.size()), 1.0);
  double idcg = 0;
  for (std::size_t i = 0; i < ideal.size(); ++i) idcg += ideal[i] / std::log2(i + 2.0);
  return dcg / idcg;
}

}  // namespace oracle
