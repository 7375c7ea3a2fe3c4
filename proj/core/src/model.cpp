#include "ntp/model.hpp"

namespace ntp {

ModelParams zero_params(const Vocabulary& vocab) {
  return {Eigen::MatrixXd::Zero(vocab.size, vocab.dim), Eigen::MatrixXd::Zero(vocab.dim, vocab.dim)};
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const double shift = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - shift).exp();
  return e / e.sum();
}

double logsumexp(const Eigen::VectorXd& v) {
  const double shift = v.maxCoeff();
  return shift + std::log((v.array() - shift).exp().sum());
}

Eigen::VectorXd attention_weights(const Eigen::MatrixXd& w_kq, const Eigen::MatrixXd& X) {
  if (X.cols() == 0) throw EmptySentence();
  if (w_kq.rows() != X.rows() || w_kq.cols() != X.rows())
    throw ShapeError("w_kq must be d x d for d-dimensional embeddings");
  const Eigen::VectorXd scores = X.transpose() * (w_kq * X.col(X.cols() - 1));
  return softmax(scores);
}

namespace {

Eigen::VectorXd output_logits(const ModelParams& params, const Eigen::MatrixXd& X) {
  const Eigen::VectorXd phi = attention_weights(params.w_kq, X);
  return params.w_ov * (X * phi);
}

}  // namespace

Eigen::VectorXd forward(const ModelParams& params, const Sentence& s, const Vocabulary& vocab) {
  if (s.tokens.empty()) throw EmptySentence();
  if (params.w_ov.rows() != vocab.size || params.w_ov.cols() != vocab.dim)
    throw ShapeError("w_ov must be |V| x d");
  return softmax(output_logits(params, sentence_matrix(vocab, s.tokens)));
}

double loss(const ModelParams& params, const Corpus& corpus) {
  if (params.w_ov.rows() != corpus.vocab.size || params.w_ov.cols() != corpus.vocab.dim)
    throw ShapeError("w_ov must be |V| x d");
  const auto pi = corpus.frequencies();
  double total = 0.0;
  for (std::size_t n = 0; n < corpus.samples.size(); ++n) {
    const Sentence& s = corpus.samples[n].sentence;
    const Eigen::VectorXd logits = output_logits(params, sentence_matrix(corpus.vocab, s.tokens));
    total += pi[n] * (logsumexp(logits) - logits(s.next));
  }
  return total;
}

double loss0(const Eigen::MatrixXd& w_ov, const Collocation& colloc, const Vocabulary& vocab) {
  if (w_ov.rows() != vocab.size || w_ov.cols() != vocab.dim) throw ShapeError("w_ov must be |V| x d");
  double total = 0.0;
  for (TokenId x = 0; x < vocab.size; ++x) {
    const Eigen::VectorXd logits = w_ov * vocab.embeddings.col(x);
    total += logsumexp(logits) - logits(colloc.successor[x]);
  }
  return total;
}

TokenId predict(const ModelParams& params, const Sentence& s, const Vocabulary& vocab) {
  const Eigen::VectorXd p = forward(params, s, vocab);
  TokenId best = 0;
  for (TokenId v = 1; v < vocab.size; ++v)
    if (p(v) > p(best)) best = v;
  return best;
}

}  // namespace ntp
