#include "ntp/vocab.hpp"

#include <random>

namespace ntp {

Vocabulary build_vocab(int size, int dim, std::optional<std::uint64_t> rotation_seed) {
  if (size < 1 || dim < 1 || dim < size) throw DimensionTooSmall(size, dim);

  Vocabulary v;
  v.size = size;
  v.dim = dim;
  v.rotation_seed = rotation_seed;

  if (!rotation_seed) {
    v.embeddings = Eigen::MatrixXd::Identity(dim, size);
    return v;
  }

  // Orthonormalize a seeded Gaussian matrix via Householder QR. Fixing the
  // sign of R's diagonal makes the result independent of QR internals.
  std::mt19937_64 rng(*rotation_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd g(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) g(i, j) = gauss(rng);

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);

  v.embeddings = q.leftCols(size);
  return v;
}

Eigen::VectorXd embed(const Vocabulary& vocab, TokenId token) {
  if (token < 0 || token >= vocab.size) throw UnknownToken(token);
  return vocab.embeddings.col(token);
}

Eigen::MatrixXd sentence_matrix(const Vocabulary& vocab, std::span<const TokenId> tokens) {
  Eigen::MatrixXd x(vocab.dim, static_cast<Eigen::Index>(tokens.size()));
  for (std::size_t l = 0; l < tokens.size(); ++l) {
    if (tokens[l] < 0 || tokens[l] >= vocab.size) throw UnknownToken(tokens[l]);
    x.col(static_cast<Eigen::Index>(l)) = vocab.embeddings.col(tokens[l]);
  }
  return x;
}

}  // namespace ntp
