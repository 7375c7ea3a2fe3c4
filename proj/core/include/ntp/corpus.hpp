#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ntp/vocab.hpp"

namespace ntp {

struct Sentence {
  std::vector<TokenId> tokens;  // input tokens x_1..x_L, L >= 1
  TokenId next = 0;             // label x_{L+1}

  TokenId query() const { return tokens.back(); }  // X_{-1}
  int length() const { return static_cast<int>(tokens.size()); }
};

inline bool operator==(const Sentence& a, const Sentence& b) {
  return a.tokens == b.tokens && a.next == b.next;
}

struct Sample {
  Sentence sentence;
  std::int64_t count = 1;
};

/// Distinct training samples with integer counts; frequencies pi are the
/// ratios count / total and sum to one exactly.
struct Corpus {
  Vocabulary vocab;
  std::vector<Sample> samples;
  int l_max = 0;  // longest input length

  std::int64_t total_count() const;
  std::vector<double> frequencies() const;
  bool contains(const std::vector<TokenId>& tokens) const;
};

/// The successor map n: every single-token sentence [x] continues with
/// successor[x]. Injective by construction, total by design, hence a bijection.
struct Collocation {
  std::vector<TokenId> successor;
  std::vector<TokenId> inverse;

  int size() const { return static_cast<int>(successor.size()); }
};

/// Partition of the vocabulary induced by one query's partial order.
struct TokenPartition {
  std::vector<TokenId> optimal;         // tokens that beat some other token
  std::vector<TokenId> non_optimal;     // tokens beaten by some other token
  std::vector<TokenId> non_comparable;  // tokens with no relations
};

struct QueryOrders {
  int vocab_size = 0;
  std::vector<TokenPartition> by_query;  // indexed by query token id
};

/// A raw sentence of length >= 2; its last token is the final label, so it
/// contributes the samples ([x_1..x_l], x_{l+1}) for every proper prefix.
using RawSentence = std::vector<TokenId>;

/// Expand raw sentences into all prefix samples, merging duplicates by
/// summing counts. Throws NondeterministicLabel if two derived samples share
/// an input with different labels.
Corpus prefix_close(const Vocabulary& vocab, const std::vector<RawSentence>& raw);

/// Read the successor map off the length-1 samples and verify injectivity.
Collocation derive_collocation(const Corpus& corpus);

/// Build every query's partial order: a sample with query q, label y and
/// tokens on both sides of the "maps to y" split relates each optimal token
/// above each non-optimal one. Throws ConfusedToken if a token ends up on
/// both sides of one query's order.
QueryOrders derive_partial_orders(const Corpus& corpus, const Collocation& colloc);

const TokenPartition& classify_tokens(const QueryOrders& orders, TokenId query);

/// Positions l(n) in the sentence whose token maps to the sample label
/// (0-based). Tokens outside the collocation range yield no positions.
std::vector<int> optimal_positions(const Sentence& s, const Collocation& colloc);

struct ValidationIssue {
  std::string check;   // "determinism", "collocation", "orders", "optimal_count"
  std::string detail;
  int sample_index = -1;
  TokenId token = -1;
};

struct ValidationReport {
  std::vector<ValidationIssue> violations;
  bool ok() const { return violations.empty(); }
};

/// Run the determinism check, collocation derivation, partial-order
/// derivation, and the per-sample optimal-token count check. Violations are
/// report entries, never exceptions.
ValidationReport validate_realizable(const Corpus& corpus);

struct SynthesisParams {
  int num_raw_sentences = 10;
  int max_len = 6;  // raw sentence length, label included
  int max_attempts = 500;
};

/// Seeded rejection sampler for realizable corpora: draw a random bijection,
/// grow raw sentences as successor-closure walks, prefix-close, and keep the
/// draw only if validation passes and every query's observed
/// (optimal, non-optimal) pairs cover the full product of its order sets.
/// The returned corpus always passes validate_realizable.
Corpus synthesize_corpus(std::uint64_t seed, int vocab_size, const SynthesisParams& params = {});

}  // namespace ntp
