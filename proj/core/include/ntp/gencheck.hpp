#pragma once

#include <cstdint>
#include <optional>

#include "ntp/model.hpp"

namespace ntp {

/// Unseen-input patterns: Case1 pairs a non-comparable token with non-optimal
/// ones, Case2 puts an optimal token next to a non-comparable one.
enum class GenCase { case1, case2 };

/// Construct a sentence ending in `query` matching the pattern and verified
/// absent from the corpus. The seed orders the candidate search, so distinct
/// seeds can produce distinct witnesses.
Sentence build_unseen(const QueryOrders& orders, const Collocation& colloc, const Corpus& corpus,
                      TokenId query, GenCase pattern, std::uint64_t rng_seed);

/// Worst-case trained margins of one query's order, minimized over the full
/// token families. A family with no members yields no value.
struct OrderMargins {
  std::optional<double> star_minus_noncomp;   // min over optimal x non-comparable
  std::optional<double> noncomp_minus_nonopt;  // min over non-comparable x non-optimal
};

OrderMargins order_margins(const Eigen::MatrixXd& w_kq, const QueryOrders& orders,
                         const Vocabulary& vocab, TokenId query);

struct GenEntry {
  TokenId query = 0;
  GenCase pattern = GenCase::case1;
  std::vector<TokenId> sentence;
  TokenId predicted = 0;
  TokenId expected = 0;
  double prob = 0.0;  // model probability of the expected token
  std::optional<double> margin_star_minus_noncomp;
  std::optional<double> margin_noncomp_minus_nonopt;
  bool pass = false;
};

struct GenReport {
  std::vector<GenEntry> entries;
  int applicable_queries = 0;
  bool all_pass() const;
};

/// Evaluate both cases for every query whose required sets are non-empty.
/// Case1 passes when the sentence predicts the non-comparable token's
/// successor with probability at least `prob_threshold`; Case2 passes when it
/// predicts the optimal token's successor. Both additionally require the
/// trained margin families to be positive.
GenReport check_generalization(const ModelParams& params, const QueryOrders& orders,
                               const Collocation& colloc, const Corpus& corpus,
                               double prob_threshold);

}  // namespace ntp
