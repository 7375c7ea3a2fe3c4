#pragma once

#include <vector>

#include "ntp/corpus.hpp"

namespace ntp {

struct MarginSolution {
  Eigen::MatrixXd matrix;
  double norm = 0.0;             // Frobenius
  double achieved_margin = 0.0;  // minimum slack over the defining constraints
};

/// One separation constraint <left, W right> >= 1.
struct MarginConstraint {
  Eigen::VectorXd left;
  Eigen::VectorXd right;
};

/// Minimum-norm matrix separating each token's successor from every other
/// token by unit margin. In the token basis each column carries
/// (|V|-1)/|V| at the successor row and -1/|V| elsewhere; || . || = sqrt(|V|-1).
MarginSolution maxmargin_ov(const Collocation& colloc, const Vocabulary& vocab);

/// Minimum-norm matrix separating optimal from non-optimal tokens under every
/// query. In the token basis, the column of query q holds |N_q|/(|O_q|+|N_q|)
/// at optimal rows, -|O_q|/(|O_q|+|N_q|) at non-optimal rows, and 0 at
/// non-comparable rows; unconstrained queries get zero columns.
MarginSolution maxmargin_kq(const QueryOrders& orders, const Vocabulary& vocab);

/// Constraints of the feed-forward hard-margin program.
std::vector<MarginConstraint> ov_constraints(const Collocation& colloc, const Vocabulary& vocab);

/// Per-sample attention constraints: for every sample, every optimal position
/// beats every non-optimal position under the sample's query. Deduplicated by
/// (optimal token, non-optimal token, query).
std::vector<MarginConstraint> kq_constraints(const Corpus& corpus, const Collocation& colloc);

/// Independent minimum-norm verifier: cyclic projected coordinate ascent on
/// the dual of min ||W|| s.t. <l_i, W r_i> >= 1, with W carried as the
/// nonnegative combination sum_i lambda_i l_i r_i^T. Stops when the largest
/// violation and the per-sweep norm change both fall below tol.
Eigen::MatrixXd qp_oracle(const std::vector<MarginConstraint>& constraints, int rows, int cols,
                          double tol = 1e-9, int max_iter = 200000);

/// Frobenius inner product of the normalized matrices.
double direction_similarity(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace ntp
