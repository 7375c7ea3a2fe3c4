#include "ntp/margin.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <set>

namespace ntp {

namespace {

void require_bijection(const Collocation& colloc, int vocab_size) {
  if (colloc.size() != vocab_size) throw ShapeError("collocation size differs from vocabulary");
  std::vector<TokenId> source(vocab_size, -1);
  for (TokenId x = 0; x < vocab_size; ++x) {
    const TokenId y = colloc.successor[x];
    if (y < 0 || y >= vocab_size) throw UnknownToken(y);
    if (source[y] >= 0) throw NotInjective(source[y], x);
    source[y] = x;
  }
}

double min_slack(const Eigen::MatrixXd& w, const std::vector<MarginConstraint>& constraints) {
  double slack = std::numeric_limits<double>::infinity();
  for (const auto& c : constraints) slack = std::min(slack, c.left.dot(w * c.right));
  return slack;
}

}  // namespace

MarginSolution maxmargin_ov(const Collocation& colloc, const Vocabulary& vocab) {
  require_bijection(colloc, vocab.size);
  const double v = static_cast<double>(vocab.size);

  Eigen::MatrixXd token_basis = Eigen::MatrixXd::Constant(vocab.size, vocab.size, -1.0 / v);
  for (TokenId x = 0; x < vocab.size; ++x) token_basis(colloc.successor[x], x) += 1.0;

  MarginSolution sol;
  sol.matrix = token_basis * vocab.embeddings.transpose();
  sol.norm = sol.matrix.norm();
  sol.achieved_margin = min_slack(sol.matrix, ov_constraints(colloc, vocab));
  return sol;
}

MarginSolution maxmargin_kq(const QueryOrders& orders, const Vocabulary& vocab) {
  if (orders.vocab_size != vocab.size) throw ShapeError("orders built for a different vocabulary");

  Eigen::MatrixXd token_basis = Eigen::MatrixXd::Zero(vocab.size, vocab.size);
  std::vector<MarginConstraint> complete_pairs;
  for (TokenId q = 0; q < vocab.size; ++q) {
    const TokenPartition& part = orders.by_query[q];
    for (TokenId t : part.optimal)
      if (std::find(part.non_optimal.begin(), part.non_optimal.end(), t) != part.non_optimal.end())
        throw ConfusedToken(q, t);
    const double k = static_cast<double>(part.optimal.size());
    const double m = static_cast<double>(part.non_optimal.size());
    if (k == 0.0 || m == 0.0) continue;  // no binding constraints; zero column
    for (TokenId t : part.optimal) token_basis(t, q) = m / (k + m);
    for (TokenId t : part.non_optimal) token_basis(t, q) = -k / (k + m);
    for (TokenId o : part.optimal)
      for (TokenId x : part.non_optimal)
        complete_pairs.push_back(
            {vocab.embeddings.col(o) - vocab.embeddings.col(x), vocab.embeddings.col(q)});
  }

  MarginSolution sol;
  sol.matrix = vocab.embeddings * token_basis * vocab.embeddings.transpose();
  sol.norm = sol.matrix.norm();
  sol.achieved_margin = complete_pairs.empty() ? std::numeric_limits<double>::infinity()
                                               : min_slack(sol.matrix, complete_pairs);
  return sol;
}

std::vector<MarginConstraint> ov_constraints(const Collocation& colloc, const Vocabulary& vocab) {
  require_bijection(colloc, vocab.size);
  std::vector<MarginConstraint> constraints;
  constraints.reserve(static_cast<std::size_t>(vocab.size) * (vocab.size - 1));
  for (TokenId x = 0; x < vocab.size; ++x) {
    const TokenId target = colloc.successor[x];
    for (TokenId v = 0; v < vocab.size; ++v) {
      if (v == target) continue;
      Eigen::VectorXd left = Eigen::VectorXd::Zero(vocab.size);
      left(target) = 1.0;
      left(v) = -1.0;
      constraints.push_back({std::move(left), vocab.embeddings.col(x)});
    }
  }
  return constraints;
}

std::vector<MarginConstraint> kq_constraints(const Corpus& corpus, const Collocation& colloc) {
  const Vocabulary& vocab = corpus.vocab;
  std::set<std::array<TokenId, 3>> seen;
  std::vector<MarginConstraint> constraints;
  for (const auto& s : corpus.samples) {
    const TokenId q = s.sentence.query();
    std::set<TokenId> opt, non;
    for (TokenId t : s.sentence.tokens)
      (colloc.successor[t] == s.sentence.next ? opt : non).insert(t);
    if (opt.empty() || non.empty()) continue;
    for (TokenId o : opt)
      for (TokenId x : non)
        if (seen.insert({o, x, q}).second)
          constraints.push_back(
              {vocab.embeddings.col(o) - vocab.embeddings.col(x), vocab.embeddings.col(q)});
  }
  return constraints;
}

Eigen::MatrixXd qp_oracle(const std::vector<MarginConstraint>& constraints, int rows, int cols,
                          double tol, int max_iter) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(rows, cols);
  if (constraints.empty()) return w;

  const int m = static_cast<int>(constraints.size());
  for (const auto& c : constraints)
    if (c.left.size() != rows || c.right.size() != cols)
      throw ShapeError("constraint vectors do not match the requested shape");

  Eigen::VectorXd diag(m);
  for (int i = 0; i < m; ++i)
    diag(i) = constraints[i].left.squaredNorm() * constraints[i].right.squaredNorm();

  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m);
  Eigen::MatrixXd prev = w;
  for (int sweep = 0; sweep < max_iter; ++sweep) {
    for (int i = 0; i < m; ++i) {
      const auto& c = constraints[i];
      const double slack = c.left.dot(w * c.right);
      const double updated = std::max(0.0, lambda(i) + (1.0 - slack) / diag(i));
      const double delta = updated - lambda(i);
      if (delta != 0.0) {
        w.noalias() += delta * c.left * c.right.transpose();
        lambda(i) = updated;
      }
    }
    const double violation = std::max(0.0, 1.0 - min_slack(w, constraints));
    const double change = (w - prev).norm();
    if (violation < tol && change < tol) return w;
    prev = w;
  }
  throw NoConvergence(max_iter);
}

double direction_similarity(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("direction similarity needs matching shapes");
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw ZeroMatrix();
  return a.cwiseProduct(b).sum() / (na * nb);
}

}  // namespace ntp
