#include "doccit2vec/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "doccit2vec/error.hpp"

namespace dc2v::kernels {

namespace {
// Below this many rows the parallel region costs more than it saves.
constexpr std::size_t kParallelRows = 2048;
}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double log_sigmoid(double z) {
  if (z >= 0) return -std::log1p(std::exp(-z));
  return z - std::log1p(std::exp(z));
}

void hidden_avg(Rows participants, std::span<double> out) {
  if (participants.empty()) throw ConfigError("hidden layer needs a participant");
  const double w = 1.0 / static_cast<double>(participants.size());
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& v : participants) axpy(w, v, out);
}

void attention_ratios(std::span<const double> scores,
                      std::span<double> ratios) {
  if (scores.empty()) return;
  const double hi = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    ratios[i] = std::exp(scores[i] - hi);
    sum += ratios[i];
  }
  for (std::size_t i = 0; i < scores.size(); ++i) ratios[i] /= sum;
}

void hidden_att(std::span<const double> ratios, Rows participants,
                std::span<double> out) {
  if (participants.empty()) throw ConfigError("hidden layer needs a participant");
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t j = 0; j < participants.size(); ++j) {
    axpy(ratios[j], participants[j], out);
  }
}

double ns_loss_and_grads(std::span<const double> x,
                         std::span<const double> target_out, Rows negatives_out,
                         std::span<double> grad_x,
                         std::span<double> out_coefs) {
  std::fill(grad_x.begin(), grad_x.end(), 0.0);
  const double zt = dot(x, target_out);
  double loss = -log_sigmoid(zt);
  out_coefs[0] = sigmoid(zt) - 1.0;
  axpy(out_coefs[0], target_out, grad_x);
  for (std::size_t i = 0; i < negatives_out.size(); ++i) {
    const double zn = dot(x, negatives_out[i]);
    loss -= log_sigmoid(-zn);
    out_coefs[1 + i] = sigmoid(zn);
    axpy(out_coefs[1 + i], negatives_out[i], grad_x);
  }
  return loss;
}

NsResult ns_loss_and_grads(std::span<const double> x,
                           std::span<const double> target_out,
                           Rows negatives_out) {
  NsResult r;
  r.grad_x.assign(x.size(), 0.0);
  r.out_coefs.assign(1 + negatives_out.size(), 0.0);
  r.loss = ns_loss_and_grads(x, target_out, negatives_out, r.grad_x,
                             r.out_coefs);
  return r;
}

void score_dot(const Matrix& rows, std::span<const double> q,
               std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(rows.rows());
#pragma omp parallel for schedule(static) if (rows.rows() >= kParallelRows)
  for (std::ptrdiff_t r = 0; r < n; ++r) out[r] = dot(rows.row(r), q);
}

void score_dot_serial(const Matrix& rows, std::span<const double> q,
                      std::span<double> out) {
  for (std::size_t r = 0; r < rows.rows(); ++r) out[r] = dot(rows.row(r), q);
}

namespace {
double cosine_with(std::span<const double> row, std::span<const double> q,
                   double qnorm) {
  const double rn = norm(row);
  if (rn == 0.0 || qnorm == 0.0) return 0.0;
  return dot(row, q) / (rn * qnorm);
}
}  // namespace

void score_cosine(const Matrix& rows, std::span<const double> q,
                  std::span<double> out) {
  const double qn = norm(q);
  const auto n = static_cast<std::ptrdiff_t>(rows.rows());
#pragma omp parallel for schedule(static) if (rows.rows() >= kParallelRows)
  for (std::ptrdiff_t r = 0; r < n; ++r) out[r] = cosine_with(rows.row(r), q, qn);
}

void score_cosine_serial(const Matrix& rows, std::span<const double> q,
                         std::span<double> out) {
  const double qn = norm(q);
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    out[r] = cosine_with(rows.row(r), q, qn);
  }
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

}  // namespace dc2v::kernels
