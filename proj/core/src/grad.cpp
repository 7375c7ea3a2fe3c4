#include "ntp/grad.hpp"

#include <cmath>

#include "internal_rng.hpp"

namespace ntp {

Eigen::MatrixXd grad_ov(const Eigen::MatrixXd& w_ov, const Collocation& colloc,
                        const Vocabulary& vocab) {
  if (w_ov.rows() != vocab.size || w_ov.cols() != vocab.dim) throw ShapeError("w_ov must be |V| x d");
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(vocab.size, vocab.dim);
  for (TokenId x = 0; x < vocab.size; ++x) {
    const Eigen::VectorXd emb = vocab.embeddings.col(x);
    Eigen::VectorXd residual = softmax(w_ov * emb);
    residual(colloc.successor[x]) -= 1.0;
    g.noalias() += residual * emb.transpose();
  }
  return g;
}

Eigen::MatrixXd grad_kq(const ModelParams& params, const Corpus& corpus) {
  const Vocabulary& vocab = corpus.vocab;
  if (params.w_ov.rows() != vocab.size || params.w_ov.cols() != vocab.dim)
    throw ShapeError("w_ov must be |V| x d");
  if (params.w_kq.rows() != vocab.dim || params.w_kq.cols() != vocab.dim)
    throw ShapeError("w_kq must be d x d");

  const auto pi = corpus.frequencies();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(vocab.dim, vocab.dim);
  for (std::size_t n = 0; n < corpus.samples.size(); ++n) {
    const Sentence& s = corpus.samples[n].sentence;
    const Eigen::MatrixXd x = sentence_matrix(vocab, s.tokens);
    const Eigen::VectorXd phi = attention_weights(params.w_kq, x);
    Eigen::VectorXd residual = softmax(params.w_ov * (x * phi));
    residual(s.next) -= 1.0;
    // (diag(phi) - phi phi^T) v applied without forming the L x L matrix.
    const Eigen::VectorXd v = x.transpose() * (params.w_ov.transpose() * residual);
    const Eigen::VectorXd u = phi.cwiseProduct(v) - phi * phi.dot(v);
    g.noalias() += pi[n] * (x * u) * x.col(x.cols() - 1).transpose();
  }
  return g;
}

GradCheckReport fd_check(const std::function<double(const Eigen::MatrixXd&)>& loss_fn,
                         const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& point,
                         double epsilon, int probes, std::uint64_t seed) {
  if (epsilon <= 0.0) throw ShapeError("epsilon must be positive");
  if (analytic.rows() != point.rows() || analytic.cols() != point.cols())
    throw ShapeError("analytic gradient shape differs from the probe point");

  std::mt19937_64 rng(seed);
  GradCheckReport report;
  report.epsilon = epsilon;

  Eigen::MatrixXd probe = point;
  for (int k = 0; k < probes; ++k) {
    const int i = static_cast<int>(internal::uniform_below(rng, static_cast<std::uint64_t>(point.rows())));
    const int j = static_cast<int>(internal::uniform_below(rng, static_cast<std::uint64_t>(point.cols())));

    const double saved = probe(i, j);
    probe(i, j) = saved + epsilon;
    const double f_plus = loss_fn(probe);
    probe(i, j) = saved - epsilon;
    const double f_minus = loss_fn(probe);
    probe(i, j) = saved;

    const double fd = (f_plus - f_minus) / (2.0 * epsilon);
    const double rel = std::abs(analytic(i, j) - fd) / std::max(1.0, std::abs(analytic(i, j)));
    if (rel > report.max_rel_error) {
      report.max_rel_error = rel;
      report.worst_row = i;
      report.worst_col = j;
    }
  }
  return report;
}

}  // namespace ntp
