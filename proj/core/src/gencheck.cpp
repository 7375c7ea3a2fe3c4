#include "ntp/gencheck.hpp"

#include <algorithm>
#include <limits>

namespace ntp {

namespace {

bool member(const std::vector<TokenId>& set, TokenId t) {
  return std::find(set.begin(), set.end(), t) != set.end();
}

// Seed 0 keeps the ascending-id order (the canonical minimal witness);
// other seeds rotate the starting choice to reach alternative witnesses.
std::vector<TokenId> seed_rotated(std::vector<TokenId> items, std::uint64_t seed) {
  if (items.size() > 1) {
    const auto shift = static_cast<std::ptrdiff_t>(seed % items.size());
    std::rotate(items.begin(), items.begin() + shift, items.end());
  }
  return items;
}

}  // namespace

Sentence build_unseen(const QueryOrders& orders, const Collocation& colloc, const Corpus& corpus,
                      TokenId query, GenCase pattern, std::uint64_t rng_seed) {
  const TokenPartition& part = classify_tokens(orders, query);

  std::vector<std::vector<TokenId>> candidates;

  if (pattern == GenCase::case1) {
    if (part.non_comparable.empty() || part.non_optimal.empty())
      throw PatternUnavailable("case1 needs non-comparable and non-optimal tokens under query " +
                               std::to_string(query));
    if (member(part.optimal, query))
      throw PatternUnavailable("query " + std::to_string(query) +
                               " is optimal under its own order; case1 sentences cannot end in it");
    const bool query_non_optimal = member(part.non_optimal, query);
    for (TokenId x0 : seed_rotated(part.non_comparable, rng_seed)) {
      if (!query_non_optimal && x0 != query) continue;  // every non-x0 token must be non-optimal
      // Minimal witness first, then pad with non-optimal fillers.
      candidates.push_back({x0, query});
      for (TokenId f : part.non_optimal) {
        candidates.push_back({x0, f, query});
        candidates.push_back({f, x0, query});
      }
      candidates.push_back({x0, x0, query});
    }
    if (candidates.empty())
      throw PatternUnavailable("no case1 sentence shape exists for query " + std::to_string(query));
  } else {
    if (part.optimal.empty() || part.non_comparable.empty())
      throw PatternUnavailable("case2 needs optimal and non-comparable tokens under query " +
                               std::to_string(query));
    // A query that is optimal under its own order joins the sentence as the
    // optimal member, keeping the expected label unambiguous.
    std::vector<TokenId> optimal_choices =
        member(part.optimal, query) ? std::vector<TokenId>{query} : seed_rotated(part.optimal, rng_seed);
    for (TokenId o : optimal_choices) {
      for (TokenId x0 : seed_rotated(part.non_comparable, rng_seed)) {
        candidates.push_back({o, x0, query});
        candidates.push_back({x0, o, query});
        candidates.push_back({o, o, x0, query});
        candidates.push_back({o, x0, x0, query});
      }
    }
  }

  for (auto& tokens : candidates) {
    if (!corpus.contains(tokens)) {
      TokenId core;
      if (pattern == GenCase::case1) {
        core = tokens[0] == tokens[1] || member(part.non_comparable, tokens[0]) ? tokens[0] : tokens[1];
      } else {
        core = member(part.optimal, tokens[0]) ? tokens[0] : tokens[1];
      }
      return Sentence{std::move(tokens), colloc.successor[core]};
    }
  }
  throw NoUnseenSentence("all candidate sentences for query " + std::to_string(query) +
                         " already appear in the corpus");
}

OrderMargins order_margins(const Eigen::MatrixXd& w_kq, const QueryOrders& orders,
                         const Vocabulary& vocab, TokenId query) {
  const TokenPartition& part = classify_tokens(orders, query);
  const Eigen::VectorXd key = w_kq * vocab.embeddings.col(query);
  auto score = [&](TokenId t) { return vocab.embeddings.col(t).dot(key); };

  OrderMargins margins;
  if (!part.optimal.empty() && !part.non_comparable.empty()) {
    double worst = std::numeric_limits<double>::infinity();
    for (TokenId o : part.optimal)
      for (TokenId m : part.non_comparable) worst = std::min(worst, score(o) - score(m));
    margins.star_minus_noncomp = worst;
  }
  if (!part.non_comparable.empty() && !part.non_optimal.empty()) {
    double worst = std::numeric_limits<double>::infinity();
    for (TokenId m : part.non_comparable)
      for (TokenId x : part.non_optimal) worst = std::min(worst, score(m) - score(x));
    margins.noncomp_minus_nonopt = worst;
  }
  return margins;
}

bool GenReport::all_pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const GenEntry& e) { return e.pass; });
}

GenReport check_generalization(const ModelParams& params, const QueryOrders& orders,
                               const Collocation& colloc, const Corpus& corpus,
                               double prob_threshold) {
  GenReport report;
  for (TokenId q = 0; q < orders.vocab_size; ++q) {
    const TokenPartition& part = orders.by_query[q];
    const bool case1_applicable = !part.non_comparable.empty() && !part.non_optimal.empty();
    const bool case2_applicable = !part.optimal.empty() && !part.non_comparable.empty();
    if (!case1_applicable && !case2_applicable) continue;
    ++report.applicable_queries;

    const OrderMargins margins = order_margins(params.w_kq, orders, corpus.vocab, q);
    auto positive = [](const std::optional<double>& m) { return !m || *m > 0.0; };

    for (GenCase pattern : {GenCase::case1, GenCase::case2}) {
      if (pattern == GenCase::case1 && !case1_applicable) continue;
      if (pattern == GenCase::case2 && !case2_applicable) continue;
      Sentence s;
      try {
        s = build_unseen(orders, colloc, corpus, q, pattern, 0);
      } catch (const PatternUnavailable&) {
        continue;
      } catch (const NoUnseenSentence&) {
        continue;
      }

      GenEntry entry;
      entry.query = q;
      entry.pattern = pattern;
      entry.sentence = s.tokens;
      entry.expected = s.next;
      entry.predicted = predict(params, s, corpus.vocab);
      entry.prob = forward(params, s, corpus.vocab)(s.next);
      entry.margin_star_minus_noncomp = margins.star_minus_noncomp;
      entry.margin_noncomp_minus_nonopt = margins.noncomp_minus_nonopt;

      const bool predicted_ok = entry.predicted == entry.expected;
      const bool prob_ok = pattern == GenCase::case2 || entry.prob >= prob_threshold;
      entry.pass = predicted_ok && prob_ok && positive(margins.star_minus_noncomp) &&
                   positive(margins.noncomp_minus_nonopt);
      report.entries.push_back(std::move(entry));
    }
  }
  return report;
}

}  // namespace ntp
