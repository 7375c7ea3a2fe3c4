#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>

#include "ntp/errors.hpp"

namespace ntp {

/// Orthonormal token embeddings. Column j of `embeddings` is the embedding
/// of token id j; the Gram matrix embeddings^T embeddings is the identity.
struct Vocabulary {
  int size = 0;  // |V|
  int dim = 0;   // d, with d >= |V|
  std::optional<std::uint64_t> rotation_seed;
  Eigen::MatrixXd embeddings;  // d x |V|
};

/// Without a rotation seed, columns are the first `size` canonical basis
/// vectors of R^dim. With a seed, they are the first `size` columns of a
/// seeded random orthogonal matrix, so the Gram invariant still holds.
Vocabulary build_vocab(int size, int dim, std::optional<std::uint64_t> rotation_seed = std::nullopt);

Eigen::VectorXd embed(const Vocabulary& vocab, TokenId token);

/// Stack embeddings of a token sequence into X = [x_1, ..., x_L].
Eigen::MatrixXd sentence_matrix(const Vocabulary& vocab, std::span<const TokenId> tokens);

}  // namespace ntp
