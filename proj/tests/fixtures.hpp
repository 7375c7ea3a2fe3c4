#pragma once

#include <random>
#include <vector>

#include "ntp/corpus.hpp"
#include "ntp/model.hpp"

// The four-token word-order system S,V,O,P used across the suites: raw
// sentences {SVOP, VOP, OPP, PSV}, collocation S->V->O->P->S.
namespace fixtures {

inline constexpr ntp::TokenId S = 0;
inline constexpr ntp::TokenId V = 1;
inline constexpr ntp::TokenId O = 2;
inline constexpr ntp::TokenId P = 3;

inline std::vector<ntp::RawSentence> word_order_raw() {
  return {{S, V, O, P}, {V, O, P}, {O, P, P}, {P, S, V}};
}

inline ntp::Corpus word_order_corpus() {
  return ntp::prefix_close(ntp::build_vocab(4, 4), word_order_raw());
}

inline Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = u(rng);
  return m;
}

// Corpus loss evaluated the unguarded way; only valid while raw logits
// stay well inside double range.
inline double naive_loss(const ntp::ModelParams& params, const ntp::Corpus& corpus) {
  const auto pi = corpus.frequencies();
  double total = 0.0;
  for (std::size_t n = 0; n < corpus.samples.size(); ++n) {
    const auto& s = corpus.samples[n].sentence;
    const Eigen::MatrixXd x = ntp::sentence_matrix(corpus.vocab, s.tokens);
    const Eigen::VectorXd scores = x.transpose() * (params.w_kq * x.col(x.cols() - 1));
    const Eigen::VectorXd weights = scores.array().exp();
    const Eigen::VectorXd phi = weights / weights.sum();
    const Eigen::VectorXd logits = params.w_ov * (x * phi);
    total += pi[n] * (std::log(logits.array().exp().sum()) - logits(s.next));
  }
  return total;
}

}  // namespace fixtures
