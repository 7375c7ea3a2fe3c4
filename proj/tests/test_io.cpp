#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "ntp/io.hpp"

using namespace ntp;
using namespace fixtures;

namespace {

std::filesystem::path temp_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "ntp_io_test";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("corpus serialization round-trips byte for byte") {
  const Corpus c = synthesize_corpus(1, 20);
  const std::string once = corpus_to_json(c);
  const Corpus back = corpus_from_json(once);
  CHECK(corpus_to_json(back) == once);

  REQUIRE(back.samples.size() == c.samples.size());
  for (std::size_t i = 0; i < c.samples.size(); ++i) {
    CHECK(back.samples[i].sentence == c.samples[i].sentence);
    CHECK(back.samples[i].count == c.samples[i].count);
  }
  CHECK(back.l_max == c.l_max);
  CHECK(back.vocab.size == c.vocab.size);
}

TEST_CASE("rotated vocabularies rebuild from their seed") {
  Corpus c = word_order_corpus();
  c.vocab = build_vocab(4, 6, 99);
  const Corpus back = corpus_from_json(corpus_to_json(c));
  CHECK(back.vocab.embeddings == c.vocab.embeddings);
  CHECK(back.vocab.dim == 6);
}

TEST_CASE("checkpoint round-trips exactly") {
  const ModelParams params{random_matrix(4, 4, 5, 3.0), random_matrix(4, 4, 6, 3.0)};
  const ModelParams back = checkpoint_from_json(checkpoint_to_json(params));
  CHECK(back.w_ov == params.w_ov);
  CHECK(back.w_kq == params.w_kq);
}

TEST_CASE("checkpoint files round-trip through disk") {
  const auto path = temp_dir() / "ckpt.json";
  const ModelParams params{random_matrix(3, 3, 7, 10.0), random_matrix(3, 3, 8, 10.0)};
  save_checkpoint(params, path);
  const ModelParams back = load_checkpoint(path);
  CHECK(back.w_ov == params.w_ov);
  CHECK(back.w_kq == params.w_kq);
}

TEST_CASE("trace CSV format") {
  TraceRow row;
  row.t = 3;
  row.loss = 1.0 / 3.0;
  row.param_norm = 0.1;
  row.cos_to_star = 1.0;
  const auto path = temp_dir() / "trace.csv";
  write_trace_csv({row}, path);

  const std::string text = slurp(path);
  CHECK(text.starts_with(
      "t,loss,param_norm,grad_norm,cos_to_star,min_opt_mass,train_accuracy,"
      "lower_norm_bound,upper_norm_bound\n"));
  CHECK(text.find("3,0.33333333333333331,") != std::string::npos);  // 17 significant digits

  double parsed = 0.0;
  std::sscanf(text.c_str() + text.find("0.3333"), "%lf", &parsed);
  CHECK(parsed == row.loss);
}

TEST_CASE("format_g17 is lossless") {
  for (double v : {1.0 / 3.0, 1e-300, 12345.678901234567, -0.05}) {
    CHECK(std::stod(format_g17(v)) == v);
  }
}

TEST_CASE("invalid files are rejected") {
  CHECK_THROWS_AS(corpus_from_json("not json"), InvalidFile);
  CHECK_THROWS_AS(corpus_from_json("{}"), InvalidFile);
  CHECK_THROWS_AS(checkpoint_from_json("{\"vocab_size\": 2}"), InvalidFile);
  CHECK_THROWS_AS(load_corpus("/nonexistent/path.json"), InvalidFile);
}

TEST_CASE("report serializers emit well-formed JSON") {
  const Corpus c = word_order_corpus();
  const std::string validation = validation_to_json(validate_realizable(c));
  CHECK(validation.find("\"ok\": true") != std::string::npos);

  BoundReport clean;
  clean.checks.push_back({"norm_bracket", true, 10, {}, ""});
  BoundReport dirty;
  dirty.checks.push_back({"norm_bracket", true, 10, {4, 5}, ""});
  const std::string bounds = bounds_to_json(clean, dirty, OvGapStats{1.0, 1.5});
  CHECK(bounds.find("\"ok\": false") != std::string::npos);
  CHECK(bounds.find("\"spread\": 0.5") != std::string::npos);

  GenReport gen;
  GenEntry entry;
  entry.query = 3;
  entry.sentence = {0, 3};
  entry.margin_star_minus_noncomp = 0.25;
  gen.entries.push_back(entry);
  const std::string text = genreport_to_json(gen);
  CHECK(text.find("\"margin1\": 0.25") != std::string::npos);
  CHECK(text.find("\"margin2\": null") != std::string::npos);
}
