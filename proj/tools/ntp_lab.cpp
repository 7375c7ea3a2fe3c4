// ntp-lab: build realizable next-token corpora, train the two-stage
// normalized gradient descent, and check the max-margin / generalization
// predictions against the resulting traces.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>

#include "CLI11.hpp"
#include "json.hpp"
#include "ntp/gencheck.hpp"
#include "ntp/io.hpp"
#include "ntp/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct SyntheticSource {
  std::uint64_t seed = 1;
  int vocab_size = 20;
  int num_raw_sentences = 10;
  int max_len = 6;
};

struct ExperimentConfig {
  std::optional<std::string> corpus_file;
  std::optional<SyntheticSource> synthetic;
  std::optional<double> eta0;  // default 0.2/sqrt(d) once d is known
  std::optional<double> eta;   // default 0.05/sqrt(d)
  int t_stage1 = 900;
  int t_stage2 = 900;
  std::string out_dir = "out";
  std::vector<int> checkpoints = {300, 600, 900};
  double prob_threshold = 0.9;
};

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ntp::InvalidFile("cannot open config " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ntp::InvalidFile("malformed config " + path);

  ExperimentConfig cfg;
  if (j.contains("corpus")) {
    const json& c = j["corpus"];
    if (c.contains("file")) cfg.corpus_file = c["file"].get<std::string>();
    if (c.contains("synthetic")) {
      SyntheticSource s;
      const json& syn = c["synthetic"];
      if (syn.contains("seed")) s.seed = syn["seed"].get<std::uint64_t>();
      if (syn.contains("vocab_size")) s.vocab_size = syn["vocab_size"].get<int>();
      if (syn.contains("num_raw_sentences")) s.num_raw_sentences = syn["num_raw_sentences"].get<int>();
      if (syn.contains("max_len")) s.max_len = syn["max_len"].get<int>();
      cfg.synthetic = s;
    }
  }
  if (cfg.corpus_file && cfg.synthetic)
    throw ntp::InvalidFile("config must name exactly one corpus source");
  if (j.contains("eta0")) cfg.eta0 = j["eta0"].get<double>();
  if (j.contains("eta")) cfg.eta = j["eta"].get<double>();
  if (j.contains("t_stage1")) cfg.t_stage1 = j["t_stage1"].get<int>();
  if (j.contains("t_stage2")) cfg.t_stage2 = j["t_stage2"].get<int>();
  if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
  if (j.contains("checkpoints")) cfg.checkpoints = j["checkpoints"].get<std::vector<int>>();
  if (j.contains("prob_threshold")) cfg.prob_threshold = j["prob_threshold"].get<double>();
  return cfg;
}

void apply_seed_env(ExperimentConfig& cfg) {
  if (const char* env = std::getenv("NTP_LAB_SEED"); env && *env && cfg.synthetic)
    cfg.synthetic->seed = std::strtoull(env, nullptr, 10);
}

ntp::Corpus resolve_corpus(const ExperimentConfig& cfg) {
  if (cfg.corpus_file) return ntp::load_corpus(*cfg.corpus_file);
  const SyntheticSource s = cfg.synthetic.value_or(SyntheticSource{});
  ntp::SynthesisParams params;
  params.num_raw_sentences = s.num_raw_sentences;
  params.max_len = s.max_len;
  return ntp::synthesize_corpus(s.seed, s.vocab_size, params);
}

ntp::TrainConfig resolve_train_config(const ExperimentConfig& cfg, int dim) {
  ntp::TrainConfig t;
  const double root_d = std::sqrt(static_cast<double>(dim));
  t.eta0 = cfg.eta0.value_or(0.2 / root_d);
  t.eta = cfg.eta.value_or(0.05 / root_d);
  t.t_stage1 = cfg.t_stage1;
  t.t_stage2 = cfg.t_stage2;
  if (t.eta0 <= 0.0 || t.eta <= 0.0) throw ntp::InvalidFile("step sizes must be positive");
  if (t.t_stage1 < 0 || t.t_stage2 < 0) throw ntp::InvalidFile("iteration counts must be nonnegative");
  return t;
}

int cmd_gen_dataset(const ExperimentConfig& cfg) {
  if (!cfg.synthetic) {
    std::cerr << "gen-dataset needs a synthetic corpus source\n";
    return 1;
  }
  const ntp::Corpus corpus = resolve_corpus(cfg);
  fs::create_directories(cfg.out_dir);
  const fs::path path = fs::path(cfg.out_dir) / "corpus.json";
  ntp::save_corpus(corpus, path);

  const auto report = ntp::validate_realizable(corpus);
  const ntp::Collocation colloc = ntp::derive_collocation(corpus);
  std::cout << "wrote " << path.string() << ": " << corpus.samples.size() << " distinct samples, L_max "
            << corpus.l_max << ", validation " << (report.ok() ? "PASS" : "FAIL") << "\n";
  std::cout << "collocation:";
  for (ntp::TokenId x = 0; x < corpus.vocab.size; ++x)
    std::cout << " (" << x << "," << colloc.successor[x] << ")";
  std::cout << "\n";
  return report.ok() ? 0 : 1;
}

int cmd_validate(const std::string& corpus_path, const std::string& report_path) {
  const ntp::Corpus corpus = ntp::load_corpus(corpus_path);
  const auto report = ntp::validate_realizable(corpus);
  const std::string text = ntp::validation_to_json(report);
  if (report_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(report_path);
    out << text;
  }
  if (!report.ok())
    std::cerr << corpus_path << ": " << report.violations.size() << " violation(s)\n";
  return report.ok() ? 0 : 1;
}

int cmd_train(const ExperimentConfig& cfg) {
  const ntp::Corpus corpus = resolve_corpus(cfg);
  const auto validation = ntp::validate_realizable(corpus);
  if (!validation.ok()) {
    std::cerr << "corpus fails validation; run `ntp-lab validate` for the report\n";
    return 1;
  }

  const ntp::TrainConfig tcfg = resolve_train_config(cfg, corpus.vocab.dim);
  const ntp::Collocation colloc = ntp::derive_collocation(corpus);
  const ntp::QueryOrders orders = ntp::derive_partial_orders(corpus, colloc);
  const ntp::MarginSolution star_ov = ntp::maxmargin_ov(colloc, corpus.vocab);
  const ntp::MarginSolution star_kq = ntp::maxmargin_kq(orders, corpus.vocab);

  const ntp::StageResult s1 = ntp::train_stage1(colloc, corpus.vocab, tcfg);
  const ntp::StageResult s2 = ntp::train_stage2(s1.weights, corpus, tcfg, cfg.checkpoints);

  fs::create_directories(cfg.out_dir);
  const fs::path out(cfg.out_dir);
  ntp::write_trace_csv(s1.trace, out / "stage1.csv");
  ntp::write_trace_csv(s2.trace, out / "stage2.csv");
  for (const auto& [t, w] : s2.checkpoints)
    ntp::save_checkpoint({s1.weights, w}, out / ("checkpoint_" + std::to_string(t) + ".json"));
  ntp::save_checkpoint({s1.weights, s2.weights}, out / "checkpoint.json");
  ntp::save_checkpoint({star_ov.matrix, star_kq.matrix}, out / "stars.json");

  const ntp::CorpusMeta meta = ntp::corpus_meta(corpus);
  const ntp::BoundReport b1 = ntp::monitor_bounds(s1.trace, ntp::Stage::ov, star_ov, star_kq, tcfg, meta);
  const ntp::BoundReport b2 = ntp::monitor_bounds(s2.trace, ntp::Stage::kq, star_ov, star_kq, tcfg, meta);
  const ntp::OvGapStats gaps = ntp::ov_gap_stats(s1.weights, colloc, corpus.vocab);
  {
    std::ofstream bounds(out / "bounds.json");
    bounds << ntp::bounds_to_json(b1, b2, gaps);
  }

  std::cout << "stage1: " << s1.trace.size() - 1 << " steps, loss " << s1.trace.back().loss
            << ", cos " << s1.trace.back().cos_to_star << (s1.early_stopped ? " (early stop)" : "")
            << "\n";
  std::cout << "stage2: " << s2.trace.size() - 1 << " steps, loss " << s2.trace.back().loss
            << ", cos " << s2.trace.back().cos_to_star << (s2.early_stopped ? " (early stop)" : "")
            << "\n";
  if (s2.early_stopped && s2.trace.size() == 1)
    std::cout << "note: attention gradient was identically zero; train stage 1 first "
                 "(t_stage1 > 0) so the feed-forward layer separates tokens\n";
  std::cout << "bound checks: stage1 " << (b1.ok() ? "PASS" : "FAIL") << ", stage2 "
            << (b2.ok() ? "PASS" : "FAIL") << "\n";
  return 0;
}

int cmd_eval_gen(const ExperimentConfig& cfg, const std::string& checkpoint_path) {
  const ntp::Corpus corpus = resolve_corpus(cfg);
  const fs::path ckpt =
      checkpoint_path.empty() ? fs::path(cfg.out_dir) / "checkpoint.json" : fs::path(checkpoint_path);
  const ntp::ModelParams params = ntp::load_checkpoint(ckpt);

  const ntp::Collocation colloc = ntp::derive_collocation(corpus);
  const ntp::QueryOrders orders = ntp::derive_partial_orders(corpus, colloc);
  const ntp::GenReport report =
      ntp::check_generalization(params, orders, colloc, corpus, cfg.prob_threshold);

  fs::create_directories(cfg.out_dir);
  {
    std::ofstream out(fs::path(cfg.out_dir) / "genreport.json");
    out << ntp::genreport_to_json(report);
  }
  if (report.applicable_queries == 0) {
    std::cout << "no applicable cases: every query lacks the token sets the patterns need\n";
    return 0;
  }
  std::cout << report.entries.size() << " case(s) over " << report.applicable_queries
            << " quer(ies): " << (report.all_pass() ? "PASS" : "FAIL") << "\n";
  return report.all_pass() ? 0 : 1;
}

Eigen::MatrixXd seeded_uniform(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = u(rng);
  return m;
}

int cmd_check_grads() {
  bool all_ok = true;
  for (int vocab_size : {4, 20}) {
    const ntp::Corpus corpus = ntp::synthesize_corpus(1, vocab_size);
    const ntp::Collocation colloc = ntp::derive_collocation(corpus);
    const int d = corpus.vocab.dim;

    for (std::uint64_t point = 0; point < 5; ++point) {
      const Eigen::MatrixXd w_ov = seeded_uniform(vocab_size, d, 100 * vocab_size + point);
      const auto ov_report = ntp::fd_check(
          [&](const Eigen::MatrixXd& m) { return ntp::loss0(m, colloc, corpus.vocab); },
          ntp::grad_ov(w_ov, colloc, corpus.vocab), w_ov, 1e-6, 48, point + 7);

      const ntp::ModelParams params{w_ov, seeded_uniform(d, d, 200 * vocab_size + point)};
      const auto kq_report = ntp::fd_check(
          [&](const Eigen::MatrixXd& m) {
            return ntp::loss(ntp::ModelParams{params.w_ov, m}, corpus);
          },
          ntp::grad_kq(params, corpus), params.w_kq, 1e-6, 48, point + 13);

      const bool ok = ov_report.max_rel_error < 1e-5 && kq_report.max_rel_error < 1e-5;
      all_ok &= ok;
      std::cout << "|V|=" << vocab_size << " point " << point << ": grad_ov "
                << ov_report.max_rel_error << ", grad_kq " << kq_report.max_rel_error << " "
                << (ok ? "OK" : "FAIL") << "\n";
    }
  }
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"next-token prediction training laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir_flag;
  std::string checkpoint_flag;
  std::string report_flag;
  std::string corpus_arg;
  std::optional<double> eta0_flag, eta_flag;
  std::optional<std::uint64_t> seed_flag;
  std::optional<int> t1_flag, t2_flag;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "experiment config JSON");
    cmd->add_option("--out-dir", out_dir_flag, "output directory override");
    cmd->add_option("--eta0", eta0_flag, "stage-1 step size override");
    cmd->add_option("--eta", eta_flag, "stage-2 step size override");
    cmd->add_option("--seed", seed_flag, "synthetic corpus seed override");
    cmd->add_option("--t-stage1", t1_flag, "stage-1 iteration count override");
    cmd->add_option("--t-stage2", t2_flag, "stage-2 iteration count override");
  };

  CLI::App* gen = app.add_subcommand("gen-dataset", "synthesize a realizable corpus file");
  add_common(gen);
  CLI::App* val = app.add_subcommand("validate", "check a corpus file for realizability");
  val->add_option("corpus", corpus_arg, "corpus JSON file")->required();
  val->add_option("--report", report_flag, "write the report JSON here instead of stdout");
  CLI::App* train = app.add_subcommand("train", "run two-stage normalized gradient descent");
  add_common(train);
  CLI::App* eval = app.add_subcommand("eval-gen", "evaluate generalization on unseen sentences");
  add_common(eval);
  eval->add_option("--checkpoint", checkpoint_flag, "checkpoint JSON (default <out>/checkpoint.json)");
  app.add_subcommand("check-grads", "finite-difference check of both gradients");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    if (!cfg.corpus_file && !cfg.synthetic) cfg.synthetic = SyntheticSource{};
    apply_seed_env(cfg);  // precedence: flag > env > config
    if (seed_flag && cfg.synthetic) cfg.synthetic->seed = *seed_flag;
    if (!out_dir_flag.empty()) cfg.out_dir = out_dir_flag;
    if (eta0_flag) cfg.eta0 = *eta0_flag;
    if (eta_flag) cfg.eta = *eta_flag;
    if (t1_flag) cfg.t_stage1 = *t1_flag;
    if (t2_flag) cfg.t_stage2 = *t2_flag;

    if (gen->parsed()) return cmd_gen_dataset(cfg);
    if (val->parsed()) return cmd_validate(corpus_arg, report_flag);
    if (train->parsed()) return cmd_train(cfg);
    if (eval->parsed()) return cmd_eval_gen(cfg, checkpoint_flag);
    return cmd_check_grads();
  } catch (const ntp::SynthesisFailed& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ntp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
