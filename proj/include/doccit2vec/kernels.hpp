#pragma once

// Numeric building blocks shared by training and ranking. The row-scoring
// kernels come in an OpenMP version and a serial reference; both must give
// identical results.

#include <span>
#include <vector>

#include "doccit2vec/matrix.hpp"

namespace dc2v::kernels {

using Rows = std::span<const std::span<const double>>;

double dot(std::span<const double> a, std::span<const double> b);
/// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);
double norm(std::span<const double> a);

double sigmoid(double z);
/// log(sigmoid(z)) without overflow for large |z|.
double log_sigmoid(double z);

/// Mean of the participant vectors, computed as the weighted sum with
/// uniform weight 1/m. Throws ConfigError when there are no participants.
void hidden_avg(Rows participants, std::span<double> out);

/// Softmax of the attention scores with max subtraction.
void attention_ratios(std::span<const double> scores, std::span<double> ratios);

/// Weighted sum of participants with the given ratios, accumulated in
/// participant order. Throws ConfigError when there are no participants.
void hidden_att(std::span<const double> ratios, Rows participants,
                std::span<double> out);

/// Negative-sampling loss -log s(x.t) - sum log s(-x.n_i) and its gradients.
/// grad_x receives dL/dx. out_coefs[0] is the coefficient for the target and
/// out_coefs[1 + i] for negative i: dL/d(out_j) = out_coefs[j] * x.
double ns_loss_and_grads(std::span<const double> x,
                         std::span<const double> target_out, Rows negatives_out,
                         std::span<double> grad_x,
                         std::span<double> out_coefs);

struct NsResult {
  double loss = 0.0;
  std::vector<double> grad_x;
  std::vector<double> out_coefs;
};
NsResult ns_loss_and_grads(std::span<const double> x,
                           std::span<const double> target_out,
                           Rows negatives_out);

/// out[r] = dot(rows.row(r), q)
void score_dot(const Matrix& rows, std::span<const double> q,
               std::span<double> out);
void score_dot_serial(const Matrix& rows, std::span<const double> q,
                      std::span<double> out);

/// out[r] = cosine(rows.row(r), q); 0 when either vector has zero norm.
void score_cosine(const Matrix& rows, std::span<const double> q,
                  std::span<double> out);
void score_cosine_serial(const Matrix& rows, std::span<const double> q,
                         std::span<double> out);

/// True when every entry is finite.
bool all_finite(std::span<const double> v);

}  // namespace dc2v::kernels
