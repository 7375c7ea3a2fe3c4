#pragma once

#include <filesystem>
#include <string>

#include "ntp/gencheck.hpp"
#include "ntp/train.hpp"

namespace ntp {

/// Lossless decimal rendering of a double (17 significant digits).
std::string format_g17(double value);

// Corpus interchange file:
//   {"l_max": int, "samples": [{"count", "next", "tokens"}], "vocab": {...}}
// Token ids are zero-based; embeddings are rebuilt from the stored
// {size, dim, rotation_seed}. Serialization is deterministic, so
// load + re-serialize round-trips byte for byte.
std::string corpus_to_json(const Corpus& corpus);
Corpus corpus_from_json(const std::string& text);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);
Corpus load_corpus(const std::filesystem::path& path);

// Checkpoint file: {"dim", "vocab_size", "w_kq": [...], "w_ov": [...]},
// matrices row-major. Margin solutions export through the same format.
std::string checkpoint_to_json(const ModelParams& params);
ModelParams checkpoint_from_json(const std::string& text);
void save_checkpoint(const ModelParams& params, const std::filesystem::path& path);
ModelParams load_checkpoint(const std::filesystem::path& path);

/// CSV trace with header
/// t,loss,param_norm,grad_norm,cos_to_star,min_opt_mass,train_accuracy,lower_norm_bound,upper_norm_bound
void write_trace_csv(const std::vector<TraceRow>& trace, const std::filesystem::path& path);

std::string validation_to_json(const ValidationReport& report);

std::string bounds_to_json(const BoundReport& stage1, const BoundReport& stage2,
                           const OvGapStats& gaps);

std::string genreport_to_json(const GenReport& report);

}  // namespace ntp
