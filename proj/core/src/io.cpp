#include "ntp/io.hpp"

#include <cstdio>
#include <fstream>

#include "json.hpp"

namespace ntp {

namespace {

using nlohmann::json;

json parse(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw InvalidFile("malformed JSON");
  return j;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidFile("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidFile("cannot write " + path.string());
  out << text;
}

json matrix_row_major(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) a.push_back(m(i, j));
  return a;
}

Eigen::MatrixXd matrix_from_row_major(const json& a, Eigen::Index rows, Eigen::Index cols) {
  if (!a.is_array() || static_cast<Eigen::Index>(a.size()) != rows * cols)
    throw InvalidFile("matrix entry count does not match shape");
  Eigen::MatrixXd m(rows, cols);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = a.at(k++).get<double>();
  return m;
}

}  // namespace

std::string format_g17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string corpus_to_json(const Corpus& corpus) {
  json j;
  j["l_max"] = corpus.l_max;
  json samples = json::array();
  for (const auto& s : corpus.samples) {
    json sample;
    sample["count"] = s.count;
    sample["next"] = s.sentence.next;
    sample["tokens"] = s.sentence.tokens;
    samples.push_back(std::move(sample));
  }
  j["samples"] = std::move(samples);
  j["vocab"]["size"] = corpus.vocab.size;
  j["vocab"]["dim"] = corpus.vocab.dim;
  if (corpus.vocab.rotation_seed)
    j["vocab"]["rotation_seed"] = *corpus.vocab.rotation_seed;
  else
    j["vocab"]["rotation_seed"] = nullptr;
  return j.dump(2) + "\n";
}

Corpus corpus_from_json(const std::string& text) {
  const json j = parse(text);
  try {
    const json& v = j.at("vocab");
    std::optional<std::uint64_t> seed;
    if (!v.at("rotation_seed").is_null()) seed = v.at("rotation_seed").get<std::uint64_t>();
    Corpus corpus;
    corpus.vocab = build_vocab(v.at("size").get<int>(), v.at("dim").get<int>(), seed);
    corpus.l_max = j.at("l_max").get<int>();
    for (const json& s : j.at("samples")) {
      Sample sample;
      sample.sentence.tokens = s.at("tokens").get<std::vector<TokenId>>();
      sample.sentence.next = s.at("next").get<TokenId>();
      sample.count = s.at("count").get<std::int64_t>();
      corpus.samples.push_back(std::move(sample));
    }
    return corpus;
  } catch (const json::exception& e) {
    throw InvalidFile(std::string("corpus JSON: ") + e.what());
  }
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  write_file(path, corpus_to_json(corpus));
}

Corpus load_corpus(const std::filesystem::path& path) { return corpus_from_json(read_file(path)); }

std::string checkpoint_to_json(const ModelParams& params) {
  json j;
  j["vocab_size"] = params.w_ov.rows();
  j["dim"] = params.w_ov.cols();
  j["w_ov"] = matrix_row_major(params.w_ov);
  j["w_kq"] = matrix_row_major(params.w_kq);
  return j.dump(2) + "\n";
}

ModelParams checkpoint_from_json(const std::string& text) {
  const json j = parse(text);
  try {
    const auto v = j.at("vocab_size").get<Eigen::Index>();
    const auto d = j.at("dim").get<Eigen::Index>();
    ModelParams params;
    params.w_ov = matrix_from_row_major(j.at("w_ov"), v, d);
    params.w_kq = matrix_from_row_major(j.at("w_kq"), d, d);
    return params;
  } catch (const json::exception& e) {
    throw InvalidFile(std::string("checkpoint JSON: ") + e.what());
  }
}

void save_checkpoint(const ModelParams& params, const std::filesystem::path& path) {
  write_file(path, checkpoint_to_json(params));
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
  return checkpoint_from_json(read_file(path));
}

void write_trace_csv(const std::vector<TraceRow>& trace, const std::filesystem::path& path) {
  std::string out =
      "t,loss,param_norm,grad_norm,cos_to_star,min_opt_mass,train_accuracy,"
      "lower_norm_bound,upper_norm_bound\n";
  for (const auto& r : trace) {
    out += std::to_string(r.t);
    for (double v : {r.loss, r.param_norm, r.grad_norm, r.cos_to_star, r.min_opt_mass,
                     r.train_accuracy, r.lower_norm_bound, r.upper_norm_bound}) {
      out += ',';
      out += format_g17(v);
    }
    out += '\n';
  }
  write_file(path, out);
}

namespace {

json validation_json(const ValidationReport& report) {
  json j;
  j["ok"] = report.ok();
  json violations = json::array();
  for (const auto& v : report.violations) {
    json item;
    item["check"] = v.check;
    item["detail"] = v.detail;
    item["sample_index"] = v.sample_index;
    item["token"] = v.token;
    violations.push_back(std::move(item));
  }
  j["violations"] = std::move(violations);
  return j;
}

json bound_report_json(const BoundReport& report) {
  json j;
  j["ok"] = report.ok();
  json checks = json::array();
  for (const auto& c : report.checks) {
    json item;
    item["name"] = c.name;
    item["fatal"] = c.fatal;
    item["checked"] = c.checked;
    item["violations"] = c.violations;
    item["note"] = c.note;
    checks.push_back(std::move(item));
  }
  j["checks"] = std::move(checks);
  return j;
}

}  // namespace

std::string validation_to_json(const ValidationReport& report) {
  return validation_json(report).dump(2) + "\n";
}

std::string bounds_to_json(const BoundReport& stage1, const BoundReport& stage2,
                           const OvGapStats& gaps) {
  json j;
  j["stage1"] = bound_report_json(stage1);
  j["stage2"] = bound_report_json(stage2);
  j["ov_margin_gap"]["min"] = gaps.min_gap;
  j["ov_margin_gap"]["max"] = gaps.max_gap;
  j["ov_margin_gap"]["spread"] = gaps.spread();
  j["ok"] = stage1.ok() && stage2.ok();
  return j.dump(2) + "\n";
}

std::string genreport_to_json(const GenReport& report) {
  json j;
  j["applicable_queries"] = report.applicable_queries;
  j["all_pass"] = report.all_pass();
  json entries = json::array();
  for (const auto& e : report.entries) {
    json item;
    item["query"] = e.query;
    item["case"] = e.pattern == GenCase::case1 ? 1 : 2;
    item["sentence"] = e.sentence;
    item["predicted"] = e.predicted;
    item["expected"] = e.expected;
    item["prob"] = e.prob;
    item["margin1"] = e.margin_star_minus_noncomp ? json(*e.margin_star_minus_noncomp) : json();
    item["margin2"] = e.margin_noncomp_minus_nonopt ? json(*e.margin_noncomp_minus_nonopt) : json();
    item["pass"] = e.pass;
    entries.push_back(std::move(item));
  }
  j["entries"] = std::move(entries);
  return j.dump(2) + "\n";
}

}  // namespace ntp
