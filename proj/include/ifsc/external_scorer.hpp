#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "ifsc/scorer_backend.hpp"

namespace ifsc {

// Adapter for an out-of-process scorer: spawns `command` under /bin/sh and
// exchanges one JSON object per line on its stdin/stdout.
//
// Requests:
//   {"op":"score","id":N,"premise":S,"hypothesis":S} -> {"id":N,"score":F}
//   {"op":"fit","pairs_path":P,"mode":"pretrain"|"finetune"} -> {"ok":true}
//   {"op":"save","path":P} -> {"ok":true}
//   {"op":"load","path":P} -> {"ok":true}
//
// A response that does not arrive within the timeout, a child that exits,
// or a malformed reply raises DataError with the child's status when known.
// Training hyperparameters and optimizer state are the wrapped model's
// business; the fit request carries only the pair file and the phase.
class ExternalScorer final : public EntailmentScorer {
 public:
  explicit ExternalScorer(std::string command,
                          std::chrono::milliseconds timeout = std::chrono::milliseconds(60000));
  ~ExternalScorer() override;

  ExternalScorer(const ExternalScorer&) = delete;
  ExternalScorer& operator=(const ExternalScorer&) = delete;

  std::string backend() const override { return "external:" + command_; }
  double score(const std::string& premise, const std::string& hypothesis) override;
  void fit(const PairSet& pairs, const std::string& pairs_path, const TrainSpec& spec,
           TrainPhase phase) override;
  bool fit_needs_pairs_file() const override { return true; }
  void save(const std::string& path) override;
  void load(const std::string& path) override;

  // Saves a checkpoint to checkpoint_hint and returns a scorer that spawns
  // its own child and loads that checkpoint on first use, so the copy stays
  // frozen while this one trains on.
  std::shared_ptr<EntailmentScorer> snapshot(const std::string& checkpoint_hint) override;

 private:
  struct Process;

  void ensure_started();
  std::string request(const std::string& line);

  std::string command_;
  std::chrono::milliseconds timeout_;
  std::string pending_load_;  // checkpoint to load lazily on first use
  std::unique_ptr<Process> proc_;
  long next_id_ = 1;
};

}  // namespace ifsc
