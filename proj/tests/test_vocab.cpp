#include "doctest.h"
#include "ntp/vocab.hpp"

using namespace ntp;

TEST_CASE("canonical basis embeddings") {
  const Vocabulary v = build_vocab(4, 4);
  CHECK(v.embeddings.isApprox(Eigen::MatrixXd::Identity(4, 4)));
  CHECK(embed(v, 2) == Eigen::VectorXd::Unit(4, 2));
  CHECK(embed(v, 0) == Eigen::VectorXd::Unit(4, 0));
}

TEST_CASE("experiment-sized vocabulary uses d = |V|") {
  const Vocabulary v = build_vocab(20, 20);
  CHECK(v.size == 20);
  CHECK(v.dim == 20);
  CHECK((v.embeddings.transpose() * v.embeddings - Eigen::MatrixXd::Identity(20, 20))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("rotated embeddings keep the Gram identity") {
  const Vocabulary v = build_vocab(4, 4, 7);
  CHECK((v.embeddings.transpose() * v.embeddings - Eigen::MatrixXd::Identity(4, 4))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  CHECK(embed(v, 1).norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gram identity across sizes, dims and seeds") {
  for (std::uint64_t seed : {1u, 2u, 3u, 11u, 42u}) {
    for (auto [size, dim] : {std::pair{2, 2}, {3, 5}, {8, 8}, {5, 9}}) {
      const Vocabulary v = build_vocab(size, dim, seed);
      const Eigen::MatrixXd gram = v.embeddings.transpose() * v.embeddings;
      CHECK((gram - Eigen::MatrixXd::Identity(size, size)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("same seed rebuilds identical embeddings") {
  const Vocabulary a = build_vocab(6, 6, 123);
  const Vocabulary b = build_vocab(6, 6, 123);
  CHECK(a.embeddings == b.embeddings);
}

TEST_CASE("vocab errors") {
  CHECK_THROWS_AS(build_vocab(4, 3), DimensionTooSmall);
  const Vocabulary v = build_vocab(4, 4);
  CHECK_THROWS_AS(embed(v, 4), UnknownToken);
  CHECK_THROWS_AS(embed(v, -1), UnknownToken);
}
