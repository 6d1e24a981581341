#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ifsc/corpus.hpp"
#include "ifsc/metrics.hpp"
#include "ifsc/pairgen.hpp"
#include "ifsc/scorer.hpp"

namespace ifsc {

// Everything one incremental experiment needs; read from a JSON config
// file, with individual fields overridable from the command line.
struct RunConfig {
  std::string corpus_path;
  std::string labels_path;
  std::string manifest_path;  // reuse a frozen manifest for every seed
  std::optional<SplitConfig> split;  // build one per seed when no manifest
  PairMode mode = PairMode::kEntailment;
  std::string scorer_spec = "builtin";
  std::string pretrained_path;
  double threshold = 0.5;
  std::vector<uint64_t> seeds{1};
  TrainSpec base_spec;
  TrainSpec round_spec;
  bool seen_label_negatives = false;
  std::string out_dir;

  void validate() const;  // throws ConfigError
};

RunConfig run_config_from_file(const std::string& path);
std::string run_config_to_json(const RunConfig& config);

// FNV-1a of the canonical config JSON, as 16 hex digits. Stamped into every
// artifact the run writes.
std::string run_config_hash(const RunConfig& config);

// The full protocol for every seed: split (or load manifest), optional base
// fine-tune, m rounds of continual fine-tuning, a snapshot and an
// evaluation over all seen groups plus C_o after every phase. Artifacts
// land under out_dir/seed_<s>/; the aggregated report is returned and also
// written to out_dir/report.{json,md}.
EvalReport run_experiment(const RunConfig& config);

}  // namespace ifsc
