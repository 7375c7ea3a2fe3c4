#include <benchmark/benchmark.h>

#include <cmath>

#include "ntp/grad.hpp"
#include "ntp/margin.hpp"
#include "ntp/train.hpp"

namespace {

using namespace ntp;

Corpus corpus_for(int vocab_size) { return synthesize_corpus(1, vocab_size); }

void BM_Loss(benchmark::State& state) {
  const Corpus corpus = corpus_for(static_cast<int>(state.range(0)));
  const ModelParams params = zero_params(corpus.vocab);
  for (auto _ : state) benchmark::DoNotOptimize(loss(params, corpus));
}
BENCHMARK(BM_Loss)->Arg(8)->Arg(20);

void BM_GradKq(benchmark::State& state) {
  const Corpus corpus = corpus_for(static_cast<int>(state.range(0)));
  const Collocation colloc = derive_collocation(corpus);
  const MarginSolution star = maxmargin_ov(colloc, corpus.vocab);
  const ModelParams params{10.0 * star.matrix,
                           Eigen::MatrixXd::Zero(corpus.vocab.dim, corpus.vocab.dim)};
  for (auto _ : state) benchmark::DoNotOptimize(grad_kq(params, corpus));
}
BENCHMARK(BM_GradKq)->Arg(8)->Arg(20);

void BM_Stage2Iteration(benchmark::State& state) {
  // Cost of one fully instrumented training row: gradient, loss, attention
  // masses, accuracy.
  const Corpus corpus = corpus_for(20);
  TrainConfig cfg;
  cfg.eta0 = 0.2 / std::sqrt(20.0);
  cfg.eta = 0.05 / std::sqrt(20.0);
  cfg.t_stage1 = 100;
  const Eigen::MatrixXd w_ov = train_stage1(derive_collocation(corpus), corpus.vocab, cfg).weights;
  for (auto _ : state) {
    cfg.t_stage2 = 1;
    benchmark::DoNotOptimize(train_stage2(w_ov, corpus, cfg));
  }
}
BENCHMARK(BM_Stage2Iteration);

void BM_QpOracle(benchmark::State& state) {
  const Corpus corpus = corpus_for(static_cast<int>(state.range(0)));
  const Collocation colloc = derive_collocation(corpus);
  const auto constraints = kq_constraints(corpus, colloc);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        qp_oracle(constraints, corpus.vocab.dim, corpus.vocab.dim, 1e-8, 200000));
}
BENCHMARK(BM_QpOracle)->Arg(8)->Arg(12);

void BM_Synthesize(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(synthesize_corpus(1, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_Synthesize)->Arg(10)->Arg(20);

}  // namespace

BENCHMARK_MAIN();
