#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "ntp/margin.hpp"

using namespace ntp;
using namespace fixtures;

TEST_CASE("uniform attention at zero weights") {
  const Vocabulary v = build_vocab(4, 4);
  const Eigen::MatrixXd x = sentence_matrix(v, std::vector<TokenId>{0, 1, 2});
  const Eigen::VectorXd phi = attention_weights(Eigen::MatrixXd::Zero(4, 4), x);
  for (int l = 0; l < 3; ++l) CHECK(phi(l) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("attention softmax arithmetic") {
  // Scores [ln 2, 0] against the query.
  const Vocabulary v = build_vocab(2, 2);
  Eigen::MatrixXd w_kq = Eigen::MatrixXd::Zero(2, 2);
  w_kq(0, 1) = std::log(2.0);
  const Eigen::MatrixXd x = sentence_matrix(v, std::vector<TokenId>{0, 1});
  const Eigen::VectorXd phi = attention_weights(w_kq, x);
  CHECK(phi(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(phi(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("forward is uniform at zero parameters") {
  const Vocabulary v = build_vocab(4, 4);
  const Eigen::VectorXd p = forward(zero_params(v), Sentence{{0, 1, 2}, 3}, v);
  for (int i = 0; i < 4; ++i) CHECK(p(i) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("scaled margin solution concentrates the forward mass") {
  const Corpus c = word_order_corpus();
  const Collocation n = derive_collocation(c);
  const MarginSolution star = maxmargin_ov(n, c.vocab);
  ModelParams params = zero_params(c.vocab);
  params.w_ov = 20.0 * star.matrix;
  for (TokenId x = 0; x < 4; ++x) {
    const Eigen::VectorXd p = forward(params, Sentence{{x}, n.successor[x]}, c.vocab);
    CHECK(p(n.successor[x]) >= 0.999);
  }
}

TEST_CASE("loss at zero parameters is log |V|") {
  const Corpus c4 = word_order_corpus();
  CHECK(loss(zero_params(c4.vocab), c4) == doctest::Approx(std::log(4.0)).epsilon(1e-12));

  const Corpus c20 = synthesize_corpus(1, 20);
  CHECK(loss(zero_params(c20.vocab), c20) == doctest::Approx(std::log(20.0)).epsilon(1e-12));
}

TEST_CASE("stage-1 loss at zero weights is |V| log |V|") {
  const Corpus c = word_order_corpus();
  const Collocation n = derive_collocation(c);
  CHECK(loss0(Eigen::MatrixXd::Zero(4, 4), n, c.vocab) ==
        doctest::Approx(4.0 * std::log(4.0)).epsilon(1e-12));

  const Corpus c20 = synthesize_corpus(1, 20);
  const Collocation n20 = derive_collocation(c20);
  CHECK(loss0(Eigen::MatrixXd::Zero(20, 20), n20, c20.vocab) ==
        doctest::Approx(20.0 * std::log(20.0)).epsilon(1e-12));
}

TEST_CASE("stage-1 loss vanishes along the scaled margin direction") {
  const Corpus c = word_order_corpus();
  const Collocation n = derive_collocation(c);
  const MarginSolution star = maxmargin_ov(n, c.vocab);
  CHECK(loss0(40.0 * star.matrix, n, c.vocab) <= 1e-16);
}

TEST_CASE("prediction ties break toward the lowest id") {
  const Vocabulary v = build_vocab(4, 4);
  CHECK(predict(zero_params(v), Sentence{{2, 1}, 0}, v) == 0);
}

TEST_CASE("probability outputs stay normalized for large logits") {
  const Vocabulary v = build_vocab(6, 6);
  for (std::uint64_t seed : {3u, 4u, 5u}) {
    ModelParams params{random_matrix(6, 6, seed, 2500.0), random_matrix(6, 6, seed + 100, 2500.0)};
    const Sentence s{{0, 3, 5, 1}, 2};
    const Eigen::VectorXd p = forward(params, s, v);
    CHECK(p.minCoeff() >= 0.0);
    CHECK(p.maxCoeff() <= 1.0);
    CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));
    const Eigen::VectorXd phi =
        attention_weights(params.w_kq, sentence_matrix(v, s.tokens));
    CHECK(phi.sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("loss agrees with the unguarded evaluation at moderate scale") {
  const Corpus c = word_order_corpus();
  for (std::uint64_t seed : {7u, 8u}) {
    const ModelParams params{random_matrix(4, 4, seed, 3.0), random_matrix(4, 4, seed + 50, 3.0)};
    CHECK(loss(params, c) == doctest::Approx(naive_loss(params, c)).epsilon(1e-10));
  }
}

TEST_CASE("forward commutes with an orthogonal change of basis") {
  const Corpus c = word_order_corpus();
  const Vocabulary rotated = build_vocab(4, 4, 17);
  const Eigen::MatrixXd q = rotated.embeddings;  // d = |V|, so q is square

  const ModelParams params{random_matrix(4, 4, 21, 1.5), random_matrix(4, 4, 22, 1.5)};
  const ModelParams transported{params.w_ov * q.transpose(), q * params.w_kq * q.transpose()};

  const Sentence s{{S, V, O}, P};
  const Eigen::VectorXd base = forward(params, s, c.vocab);
  const Eigen::VectorXd moved = forward(transported, s, rotated);
  CHECK((base - moved).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("model errors") {
  const Vocabulary v = build_vocab(4, 4);
  CHECK_THROWS_AS(forward(zero_params(v), Sentence{{}, 0}, v), EmptySentence);
  CHECK_THROWS_AS(attention_weights(Eigen::MatrixXd::Zero(3, 3), Eigen::MatrixXd::Zero(4, 2)),
                  ShapeError);
  ModelParams bad = zero_params(v);
  bad.w_ov = Eigen::MatrixXd::Zero(3, 4);
  CHECK_THROWS_AS(forward(bad, Sentence{{0}, 1}, v), ShapeError);
}
