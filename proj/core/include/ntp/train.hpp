#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ntp/grad.hpp"
#include "ntp/margin.hpp"

namespace ntp {

struct TrainConfig {
  double eta0 = 0.1;   // stage-1 step size
  double eta = 0.05;   // stage-2 step size
  int t_stage1 = 900;
  int t_stage2 = 900;
  // Normalized steps divide by the gradient norm, which decays to zero once
  // the loss is tiny; stop before the update degenerates.
  double grad_floor = 1e-12;
};

/// One fully-described iterate: row t holds the state after t steps, with the
/// gradient evaluated at that state. min_opt_mass and train_accuracy carry
/// attention information in stage 2; stage 1 logs collocation accuracy and a
/// zero mass column.
struct TraceRow {
  int t = 0;
  double loss = 0.0;
  double param_norm = 0.0;
  double grad_norm = 0.0;
  double cos_to_star = 0.0;
  double min_opt_mass = 0.0;
  double train_accuracy = 0.0;
  double lower_norm_bound = 0.0;
  double upper_norm_bound = 0.0;
};

struct StageResult {
  Eigen::MatrixXd weights;
  std::vector<TraceRow> trace;
  bool early_stopped = false;
  std::vector<std::pair<int, Eigen::MatrixXd>> checkpoints;
};

/// Stage 1: normalized gradient descent on the collocation loss from zero
/// initialization. Requests in `checkpoints` record the iterate after that
/// many steps.
StageResult train_stage1(const Collocation& colloc, const Vocabulary& vocab,
                         const TrainConfig& cfg, std::span<const int> checkpoints = {});

/// Stage 2: freeze the feed-forward matrix as trained and run normalized
/// gradient descent on the attention matrix from zero initialization.
StageResult train_stage2(const Eigen::MatrixXd& w_ov_fixed, const Corpus& corpus,
                         const TrainConfig& cfg, std::span<const int> checkpoints = {});

enum class Stage { ov, kq };

struct CorpusMeta {
  int l_max = 1;
  int n_distinct = 1;
  int vocab_size = 2;
};

CorpusMeta corpus_meta(const Corpus& corpus);

struct BoundCheck {
  std::string name;
  bool fatal = true;  // diagnostics with loose constants never fail a run
  int checked = 0;
  std::vector<int> violations;  // iterations where the check failed
  std::string note;
};

struct BoundReport {
  std::vector<BoundCheck> checks;
  bool ok() const;
};

/// Check a stage trace against the theory: the norm bracket, the optimal-mass
/// floor and monotonicity, the attention and loss bounds with their explicit
/// constants (diagnostic), and the cosine lower bound wherever it is
/// non-vacuous. All inequalities get 1e-9 of roundoff slack.
BoundReport monitor_bounds(const std::vector<TraceRow>& trace, Stage stage,
                           const MarginSolution& star_ov, const MarginSolution& star_kq,
                           const TrainConfig& cfg, const CorpusMeta& meta);

/// Range of the trained feed-forward margins (e_target - e_other)^T W x over
/// all tokens and competitors; the proofs idealize this spread to zero, the
/// artifact measures it instead.
struct OvGapStats {
  double min_gap = 0.0;
  double max_gap = 0.0;
  double spread() const { return max_gap - min_gap; }
};

OvGapStats ov_gap_stats(const Eigen::MatrixXd& w_ov, const Collocation& colloc,
                        const Vocabulary& vocab);

}  // namespace ntp
