#pragma once

#include <Eigen/Dense>

#include "ntp/corpus.hpp"

namespace ntp {

/// The reparameterized one-layer transformer
///   T(X) = softmax(w_ov X softmax(X^T w_kq x_L)).
struct ModelParams {
  Eigen::MatrixXd w_ov;  // |V| x d
  Eigen::MatrixXd w_kq;  // d x d
};

ModelParams zero_params(const Vocabulary& vocab);

/// Max-shifted softmax; entries positive and summing to one.
Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

/// log sum_i exp(v_i), max-shifted.
double logsumexp(const Eigen::VectorXd& v);

/// Attention weights over sentence positions, scoring each token against the
/// final one: phi_l proportional to exp(x_l^T w_kq x_L).
Eigen::VectorXd attention_weights(const Eigen::MatrixXd& w_kq, const Eigen::MatrixXd& X);

/// Predictive distribution over the vocabulary.
Eigen::VectorXd forward(const ModelParams& params, const Sentence& s, const Vocabulary& vocab);

/// Frequency-weighted cross-entropy of the corpus. Never exponentiates raw
/// logits; attention scores grow linearly during training.
double loss(const ModelParams& params, const Corpus& corpus);

/// Pre-processing loss over the collocation pairs. A sum over the
/// vocabulary, not a mean.
double loss0(const Eigen::MatrixXd& w_ov, const Collocation& colloc, const Vocabulary& vocab);

/// Argmax decode; ties break toward the lowest token id.
TokenId predict(const ModelParams& params, const Sentence& s, const Vocabulary& vocab);

}  // namespace ntp
