#include <array>

#include "doctest.h"
#include "fixtures.hpp"
#include "ntp/gencheck.hpp"
#include "ntp/margin.hpp"
#include "ntp/train.hpp"

using namespace ntp;
using namespace fixtures;

namespace {

struct Trained {
  Corpus corpus = word_order_corpus();
  Collocation colloc;
  QueryOrders orders;
  ModelParams params;

  Trained() {
    colloc = derive_collocation(corpus);
    orders = derive_partial_orders(corpus, colloc);
    TrainConfig cfg;
    cfg.eta0 = 0.1;
    cfg.eta = 0.025;
    cfg.t_stage1 = 300;
    cfg.t_stage2 = 300;
    const StageResult s1 = train_stage1(colloc, corpus.vocab, cfg);
    const StageResult s2 = train_stage2(s1.weights, corpus, cfg);
    params = {s1.weights, s2.weights};
  }
};

}  // namespace

TEST_CASE("unseen sentence construction on the word-order corpus") {
  const Trained t;
  const Sentence case1 = build_unseen(t.orders, t.colloc, t.corpus, P, GenCase::case1, 0);
  CHECK(case1.tokens == std::vector<TokenId>{S, P});
  CHECK(case1.next == V);  // successor of the non-comparable S
  CHECK_FALSE(t.corpus.contains(case1.tokens));

  const Sentence case2 = build_unseen(t.orders, t.colloc, t.corpus, P, GenCase::case2, 0);
  CHECK(case2.tokens == std::vector<TokenId>{O, S, P});
  CHECK(case2.next == P);  // successor of the optimal O
  CHECK_FALSE(t.corpus.contains(case2.tokens));
}

TEST_CASE("alternate seeds reach the other witnesses") {
  const Trained t;
  const Sentence other = build_unseen(t.orders, t.colloc, t.corpus, P, GenCase::case1, 1);
  CHECK(other.tokens == std::vector<TokenId>{V, P});
  CHECK(other.next == O);
}

TEST_CASE("patterns without the required sets are unavailable") {
  // Singles-only corpus: no relations, so no query has non-optimal tokens.
  const Corpus singles = prefix_close(build_vocab(3, 3), {{0, 1}, {1, 2}, {2, 0}});
  const Collocation n = derive_collocation(singles);
  const QueryOrders orders = derive_partial_orders(singles, n);
  CHECK_THROWS_AS(build_unseen(orders, n, singles, 0, GenCase::case1, 0), PatternUnavailable);
  CHECK_THROWS_AS(build_unseen(orders, n, singles, 0, GenCase::case2, 0), PatternUnavailable);
}

TEST_CASE("case1 needs a non-optimal query") {
  const Trained t;
  // Query O is optimal under its own order, so no case-1 sentence can end in it.
  CHECK_THROWS_AS(build_unseen(t.orders, t.colloc, t.corpus, O, GenCase::case1, 0),
                  PatternUnavailable);
}

TEST_CASE("margins of the max-margin matrix itself") {
  const Trained t;
  ModelParams star_params = t.params;
  star_params.w_kq = maxmargin_kq(t.orders, t.corpus.vocab).matrix;

  const OrderMargins at_p = order_margins(star_params.w_kq, t.orders, t.corpus.vocab, P);
  REQUIRE(at_p.star_minus_noncomp.has_value());
  REQUIRE(at_p.noncomp_minus_nonopt.has_value());
  CHECK(*at_p.star_minus_noncomp == doctest::Approx(0.5).epsilon(1e-9));   // |N|/(|O|+|N|)
  CHECK(*at_p.noncomp_minus_nonopt == doctest::Approx(0.5).epsilon(1e-9));  // |O|/(|O|+|N|)

  const OrderMargins at_o = order_margins(star_params.w_kq, t.orders, t.corpus.vocab, O);
  CHECK(*at_o.star_minus_noncomp == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(*at_o.noncomp_minus_nonopt == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("trained run generalizes on the word-order corpus") {
  const Trained t;
  const GenReport report =
      check_generalization(t.params, t.orders, t.colloc, t.corpus, 0.9);
  CHECK(report.applicable_queries > 0);
  CHECK(report.all_pass());
  for (const auto& entry : report.entries) {
    CHECK_FALSE(t.corpus.contains(entry.sentence));
    if (entry.query == P && entry.pattern == GenCase::case1) {
      CHECK(entry.sentence == std::vector<TokenId>{S, P});
      CHECK(entry.predicted == V);
      CHECK(entry.prob >= 0.9);
    }
    if (entry.query == P && entry.pattern == GenCase::case2) {
      CHECK(entry.sentence == std::vector<TokenId>{O, S, P});
      CHECK(entry.predicted == P);
    }
  }
}

TEST_CASE("zero parameters do not generalize") {
  const Trained t;
  const GenReport report = check_generalization(zero_params(t.corpus.vocab), t.orders, t.colloc,
                                                t.corpus, 0.9);
  CHECK(report.applicable_queries > 0);
  CHECK_FALSE(report.all_pass());
  for (const auto& entry : report.entries) {
    if (entry.margin_star_minus_noncomp) CHECK(*entry.margin_star_minus_noncomp == 0.0);
    if (entry.margin_noncomp_minus_nonopt) CHECK(*entry.margin_noncomp_minus_nonopt == 0.0);
    CHECK_FALSE(entry.pass);
  }
}

TEST_CASE("report is empty when no query has non-comparable tokens") {
  // Two tokens with swap collocation: both queried orders cover the whole
  // vocabulary, so neither case applies anywhere.
  const Corpus c = prefix_close(build_vocab(2, 2), {{0, 1, 0}, {1, 0, 1}});
  const Collocation n = derive_collocation(c);
  const QueryOrders orders = derive_partial_orders(c, n);
  const GenReport report = check_generalization(zero_params(c.vocab), orders, n, c, 0.9);
  CHECK(report.applicable_queries == 0);
  CHECK(report.entries.empty());
  CHECK(report.all_pass());
}

TEST_CASE("margins grow across checkpoints") {
  const Trained t;
  TrainConfig cfg;
  cfg.eta0 = 0.1;
  cfg.eta = 0.025;
  cfg.t_stage1 = 300;
  cfg.t_stage2 = 300;
  const std::array<int, 3> marks = {100, 200, 300};
  const StageResult s1 = train_stage1(t.colloc, t.corpus.vocab, cfg);
  const StageResult s2 = train_stage2(s1.weights, t.corpus, cfg, marks);

  REQUIRE(s2.checkpoints.size() == 3);
  double last1 = 0.0, last2 = 0.0;
  for (const auto& [iter, w] : s2.checkpoints) {
    const OrderMargins m = order_margins(w, t.orders, t.corpus.vocab, P);
    REQUIRE(m.star_minus_noncomp.has_value());
    REQUIRE(m.noncomp_minus_nonopt.has_value());
    CHECK(*m.star_minus_noncomp > last1);
    CHECK(*m.noncomp_minus_nonopt > last2);
    last1 = *m.star_minus_noncomp;
    last2 = *m.noncomp_minus_nonopt;
  }
}
