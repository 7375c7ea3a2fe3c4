#include "ntp/corpus.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "internal_rng.hpp"

namespace ntp {

NondeterministicLabel::NondeterministicLabel(std::vector<TokenId> in, TokenId a, TokenId b)
    : Error([&] {
        std::ostringstream os;
        os << "input [";
        for (std::size_t i = 0; i < in.size(); ++i) os << (i ? "," : "") << in[i];
        os << "] labeled both " << a << " and " << b;
        return os.str();
      }()),
      input(std::move(in)),
      next_a(a),
      next_b(b) {}

std::int64_t Corpus::total_count() const {
  std::int64_t total = 0;
  for (const auto& s : samples) total += s.count;
  return total;
}

std::vector<double> Corpus::frequencies() const {
  const double total = static_cast<double>(total_count());
  std::vector<double> pi(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    pi[i] = static_cast<double>(samples[i].count) / total;
  return pi;
}

bool Corpus::contains(const std::vector<TokenId>& tokens) const {
  return std::any_of(samples.begin(), samples.end(),
                     [&](const Sample& s) { return s.sentence.tokens == tokens; });
}

Corpus prefix_close(const Vocabulary& vocab, const std::vector<RawSentence>& raw) {
  Corpus corpus;
  corpus.vocab = vocab;

  std::map<std::vector<TokenId>, std::size_t> index;
  for (const auto& r : raw) {
    if (r.size() < 2) throw ShapeError("raw sentence needs at least two tokens");
    for (TokenId t : r)
      if (t < 0 || t >= vocab.size) throw UnknownToken(t);

    for (std::size_t len = 1; len + 1 <= r.size(); ++len) {
      std::vector<TokenId> input(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(len));
      const TokenId next = r[len];
      auto it = index.find(input);
      if (it == index.end()) {
        index.emplace(input, corpus.samples.size());
        corpus.samples.push_back({Sentence{std::move(input), next}, 1});
      } else {
        Sample& existing = corpus.samples[it->second];
        if (existing.sentence.next != next)
          throw NondeterministicLabel(input, existing.sentence.next, next);
        existing.count += 1;
      }
    }
  }

  for (const auto& s : corpus.samples) corpus.l_max = std::max(corpus.l_max, s.sentence.length());
  return corpus;
}

Collocation derive_collocation(const Corpus& corpus) {
  const int v = corpus.vocab.size;
  Collocation c;
  c.successor.assign(v, -1);
  c.inverse.assign(v, -1);

  for (const auto& s : corpus.samples)
    if (s.sentence.length() == 1) c.successor[s.sentence.tokens[0]] = s.sentence.next;

  for (TokenId x = 0; x < v; ++x)
    if (c.successor[x] < 0) throw IncompleteCollocation(x);

  for (TokenId x = 0; x < v; ++x) {
    const TokenId y = c.successor[x];
    if (c.inverse[y] >= 0) throw NotInjective(c.inverse[y], x);
    c.inverse[y] = x;
  }
  return c;
}

namespace {

// Side flags a token has taken within one query's order.
struct SideFlags {
  std::vector<bool> above;  // appeared as the optimal member of a relation
  std::vector<bool> below;  // appeared as the non-optimal member
};

// A sample relates tokens only when both sides of the "maps to the label"
// split are present; single-token and all-optimal samples create no relations.
void scan_relations(const Corpus& corpus, const Collocation& colloc,
                    std::vector<SideFlags>& per_query) {
  for (const auto& s : corpus.samples) {
    const TokenId q = s.sentence.query();
    const TokenId y = s.sentence.next;
    bool any_opt = false, any_non = false;
    for (TokenId t : s.sentence.tokens) (colloc.successor[t] == y ? any_opt : any_non) = true;
    if (!any_opt || !any_non) continue;
    for (TokenId t : s.sentence.tokens)
      (colloc.successor[t] == y ? per_query[q].above : per_query[q].below)[t] = true;
  }
}

}  // namespace

QueryOrders derive_partial_orders(const Corpus& corpus, const Collocation& colloc) {
  const int v = corpus.vocab.size;
  std::vector<SideFlags> flags(v, SideFlags{std::vector<bool>(v, false), std::vector<bool>(v, false)});
  scan_relations(corpus, colloc, flags);

  QueryOrders orders;
  orders.vocab_size = v;
  orders.by_query.resize(v);
  for (TokenId q = 0; q < v; ++q) {
    for (TokenId t = 0; t < v; ++t) {
      const bool above = flags[q].above[t];
      const bool below = flags[q].below[t];
      if (above && below) throw ConfusedToken(q, t);
      if (above)
        orders.by_query[q].optimal.push_back(t);
      else if (below)
        orders.by_query[q].non_optimal.push_back(t);
      else
        orders.by_query[q].non_comparable.push_back(t);
    }
  }
  return orders;
}

const TokenPartition& classify_tokens(const QueryOrders& orders, TokenId query) {
  if (query < 0 || query >= orders.vocab_size) throw UnknownToken(query);
  return orders.by_query[query];
}

std::vector<int> optimal_positions(const Sentence& s, const Collocation& colloc) {
  std::vector<int> positions;
  for (int l = 0; l < s.length(); ++l) {
    const TokenId t = s.tokens[l];
    if (t >= 0 && t < colloc.size() && colloc.successor[t] == s.next) positions.push_back(l);
  }
  return positions;
}

ValidationReport validate_realizable(const Corpus& corpus) {
  ValidationReport report;
  const int v = corpus.vocab.size;

  bool shapes_ok = true;
  for (std::size_t i = 0; i < corpus.samples.size(); ++i) {
    const auto& s = corpus.samples[i];
    if (s.sentence.tokens.empty()) {
      report.violations.push_back({"samples", "empty token list", static_cast<int>(i), -1});
      shapes_ok = false;
      continue;
    }
    if (s.count < 1)
      report.violations.push_back({"samples", "non-positive count", static_cast<int>(i), -1});
    for (TokenId t : s.sentence.tokens)
      if (t < 0 || t >= v) {
        report.violations.push_back({"samples", "token out of range", static_cast<int>(i), t});
        shapes_ok = false;
      }
    if (s.sentence.next < 0 || s.sentence.next >= v) {
      report.violations.push_back({"samples", "label out of range", static_cast<int>(i), s.sentence.next});
      shapes_ok = false;
    }
  }
  if (!shapes_ok) return report;

  {
    std::map<std::vector<TokenId>, std::pair<std::size_t, TokenId>> seen;
    for (std::size_t i = 0; i < corpus.samples.size(); ++i) {
      const auto& s = corpus.samples[i];
      auto it = seen.find(s.sentence.tokens);
      if (it == seen.end()) {
        seen.emplace(s.sentence.tokens, std::make_pair(i, s.sentence.next));
      } else if (it->second.second != s.sentence.next) {
        report.violations.push_back({"determinism",
                                     "input labeled both " + std::to_string(it->second.second) +
                                         " and " + std::to_string(s.sentence.next),
                                     static_cast<int>(i), s.sentence.next});
      } else {
        report.violations.push_back(
            {"determinism", "duplicate entry for one input", static_cast<int>(i), -1});
      }
    }
  }

  std::vector<TokenId> successor(v, -1);
  for (const auto& s : corpus.samples)
    if (s.sentence.length() == 1) successor[s.sentence.tokens[0]] = s.sentence.next;
  bool colloc_ok = true;
  for (TokenId x = 0; x < v; ++x)
    if (successor[x] < 0) {
      report.violations.push_back({"collocation", "no length-1 sample for token", -1, x});
      colloc_ok = false;
    }
  if (colloc_ok) {
    std::vector<TokenId> first_source(v, -1);
    for (TokenId x = 0; x < v; ++x) {
      const TokenId y = successor[x];
      if (first_source[y] >= 0) {
        report.violations.push_back(
            {"collocation",
             "tokens " + std::to_string(first_source[y]) + " and " + std::to_string(x) +
                 " share successor " + std::to_string(y),
             -1, x});
        colloc_ok = false;
      } else {
        first_source[y] = x;
      }
    }
  }
  if (!colloc_ok) return report;

  Collocation colloc;
  colloc.successor = successor;
  colloc.inverse.assign(v, -1);
  for (TokenId x = 0; x < v; ++x) colloc.inverse[successor[x]] = x;

  {
    std::vector<SideFlags> flags(
        v, SideFlags{std::vector<bool>(v, false), std::vector<bool>(v, false)});
    scan_relations(corpus, colloc, flags);
    for (TokenId q = 0; q < v; ++q)
      for (TokenId t = 0; t < v; ++t)
        if (flags[q].above[t] && flags[q].below[t])
          report.violations.push_back(
              {"orders", "token confused under query " + std::to_string(q), -1, t});
  }

  for (std::size_t i = 0; i < corpus.samples.size(); ++i) {
    const auto& s = corpus.samples[i].sentence;
    const auto opt = optimal_positions(s, colloc);
    std::map<TokenId, int> occurrences;
    for (TokenId t : s.tokens)
      if (colloc.successor[t] != s.next) occurrences[t] += 1;
    for (const auto& [t, occ] : occurrences)
      if (static_cast<int>(opt.size()) < occ)
        report.violations.push_back(
            {"optimal_count",
             std::to_string(opt.size()) + " optimal positions < " + std::to_string(occ) +
                 " copies of token " + std::to_string(t),
             static_cast<int>(i), t});
  }

  return report;
}

namespace {

using internal::uniform_below;

// Every (optimal, non-optimal) pair of each query's order must co-occur in
// some sample with that query; the per-sample margin constraints then carry
// the full bipartite product and the closed-form solution applies.
bool cooccurrence_complete(const Corpus& corpus, const Collocation& colloc,
                           const QueryOrders& orders) {
  const int v = corpus.vocab.size;
  std::vector<std::set<std::pair<TokenId, TokenId>>> covered(v);
  for (const auto& s : corpus.samples) {
    const TokenId q = s.sentence.query();
    const TokenId y = s.sentence.next;
    std::set<TokenId> opt, non;
    for (TokenId t : s.sentence.tokens) (colloc.successor[t] == y ? opt : non).insert(t);
    if (opt.empty() || non.empty()) continue;
    for (TokenId o : opt)
      for (TokenId x : non) covered[q].insert({o, x});
  }
  for (TokenId q = 0; q < v; ++q)
    for (TokenId o : orders.by_query[q].optimal)
      for (TokenId x : orders.by_query[q].non_optimal)
        if (!covered[q].count({o, x})) return false;
  return true;
}

bool has_constrained_query(const QueryOrders& orders) {
  for (const auto& p : orders.by_query)
    if (!p.optimal.empty() && !p.non_optimal.empty()) return true;
  return false;
}

}  // namespace

namespace {

// Incremental consistency state shared by all raw sentences of one draw.
struct GrowthState {
  std::map<std::vector<TokenId>, TokenId> prefix_label;
  std::vector<SideFlags> flags;  // per query

  explicit GrowthState(int vocab_size)
      : flags(vocab_size,
              SideFlags{std::vector<bool>(vocab_size, false), std::vector<bool>(vocab_size, false)}) {}

  // Whether appending label y after `prefix` keeps the corpus deterministic,
  // confusion-free, and within the optimal-count inequality.
  bool admits(const std::vector<TokenId>& prefix, TokenId y,
              const std::vector<TokenId>& succ) const {
    if (auto it = prefix_label.find(prefix); it != prefix_label.end()) return it->second == y;

    const TokenId q = prefix.back();
    bool any_opt = false, any_non = false;
    int opt_positions = 0;
    std::map<TokenId, int> non_occurrences;
    for (TokenId x : prefix) {
      if (succ[x] == y) {
        any_opt = true;
        ++opt_positions;
      } else {
        any_non = true;
        ++non_occurrences[x];
      }
    }
    if (any_non && !any_opt) return false;
    for (const auto& [x, occ] : non_occurrences)
      if (occ > opt_positions) return false;
    if (any_opt && any_non) {
      for (TokenId x : prefix) {
        const bool opt = succ[x] == y;
        if (opt ? flags[q].below[x] : flags[q].above[x]) return false;
      }
    }
    return true;
  }

  void record(const std::vector<TokenId>& prefix, TokenId y, const std::vector<TokenId>& succ) {
    prefix_label.emplace(prefix, y);
    const TokenId q = prefix.back();
    bool any_opt = false, any_non = false;
    for (TokenId x : prefix) (succ[x] == y ? any_opt : any_non) = true;
    if (!any_opt || !any_non) return;
    for (TokenId x : prefix) (succ[x] == y ? flags[q].above : flags[q].below)[x] = true;
  }
};

}  // namespace

Corpus synthesize_corpus(std::uint64_t seed, int vocab_size, const SynthesisParams& params) {
  if (vocab_size < 2) throw SynthesisFailed(0);
  if (params.max_len < 2) throw ShapeError("max_len must be at least 2");

  const Vocabulary vocab = build_vocab(vocab_size, vocab_size);
  std::mt19937_64 rng(seed);

  // Relations need room for at least a three-token raw sentence.
  const bool need_relations = params.max_len >= 3;

  for (int attempt = 1; attempt <= params.max_attempts; ++attempt) {
    std::vector<TokenId> succ(vocab_size);
    std::iota(succ.begin(), succ.end(), 0);
    for (int i = vocab_size - 1; i > 0; --i) {
      const int j = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(i) + 1));
      std::swap(succ[i], succ[j]);
    }

    GrowthState state(vocab_size);
    std::vector<RawSentence> raws;
    raws.reserve(static_cast<std::size_t>(vocab_size + params.num_raw_sentences));
    for (TokenId x = 0; x < vocab_size; ++x) {
      raws.push_back({x, succ[x]});
      state.record({x}, succ[x], succ);
    }

    // Raw sentences grow as successor-closure walks: each new token is the
    // successor of some earlier one, so every prefix sample keeps at least
    // one optimal position. Mostly extend the chain, sometimes branch from
    // an earlier token; candidates that would break determinism, confuse a
    // token, or outnumber the optimal positions are re-drawn, and the walk
    // is cut short when none fits.
    for (int s = 0; s < params.num_raw_sentences; ++s) {
      const int len = 2 + static_cast<int>(uniform_below(
                              rng, static_cast<std::uint64_t>(params.max_len - 1)));
      RawSentence walk;
      walk.push_back(static_cast<TokenId>(uniform_below(rng, vocab_size)));
      walk.push_back(succ[walk[0]]);
      while (static_cast<int>(walk.size()) < len) {
        bool grew = false;
        for (int attempt_j = 0; attempt_j < 8 && !grew; ++attempt_j) {
          std::size_t j = walk.size() - 1;
          if (uniform_below(rng, 100) < 35)
            j = static_cast<std::size_t>(uniform_below(rng, walk.size()));
          const TokenId y = succ[walk[j]];
          if (!state.admits(walk, y, succ)) continue;
          state.record(walk, y, succ);
          walk.push_back(y);
          grew = true;
        }
        if (!grew) break;
      }
      raws.push_back(std::move(walk));
    }

    Corpus corpus = prefix_close(vocab, raws);
    if (!validate_realizable(corpus).ok()) continue;

    const Collocation colloc = derive_collocation(corpus);
    const QueryOrders orders = derive_partial_orders(corpus, colloc);
    if (need_relations && !has_constrained_query(orders)) continue;
    if (!cooccurrence_complete(corpus, colloc, orders)) continue;
    return corpus;
  }
  throw SynthesisFailed(params.max_attempts);
}

}  // namespace ntp
