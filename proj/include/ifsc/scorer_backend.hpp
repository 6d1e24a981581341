#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ifsc/scorer.hpp"

namespace ifsc {

// The pluggable binary entailment scorer the rest of the system trains and
// queries. Implementations: BuiltinScorer (hashed features + logistic head)
// and ExternalScorer (child process speaking line-delimited JSON).
class EntailmentScorer {
 public:
  virtual ~EntailmentScorer() = default;

  virtual std::string backend() const = 0;

  virtual double score(const std::string& premise, const std::string& hypothesis) = 0;

  // Scores pairs in input order; results are index-aligned with the input.
  virtual std::vector<double> score_batch(
      const std::vector<std::pair<std::string, std::string>>& pairs);

  // pairs_path names the JSONL dump of `pairs`; file-based backends train
  // from the file, the built-in one from the in-memory set.
  virtual void fit(const PairSet& pairs, const std::string& pairs_path,
                   const TrainSpec& spec, TrainPhase phase) = 0;
  virtual bool fit_needs_pairs_file() const { return false; }

  virtual void save(const std::string& path) = 0;
  virtual void load(const std::string& path) = 0;

  // Frozen copy for evaluation; later training of this scorer must not
  // affect it. checkpoint_hint, when non-empty, names a path the backend
  // may use to materialize the copy on disk.
  virtual std::shared_ptr<EntailmentScorer> snapshot(const std::string& checkpoint_hint) = 0;
};

class BuiltinScorer final : public EntailmentScorer {
 public:
  BuiltinScorer() : model_(EntailModel::fresh()) {}
  explicit BuiltinScorer(EntailModel model) : model_(std::move(model)) {}

  std::string backend() const override { return "builtin"; }
  double score(const std::string& premise, const std::string& hypothesis) override;
  void fit(const PairSet& pairs, const std::string& pairs_path, const TrainSpec& spec,
           TrainPhase phase) override;
  void save(const std::string& path) override;
  void load(const std::string& path) override;
  std::shared_ptr<EntailmentScorer> snapshot(const std::string& checkpoint_hint) override;

  const EntailModel& model() const { return model_; }
  EntailModel& model() { return model_; }

 private:
  EntailModel model_;
};

// "builtin" or "external:<command line>".
std::shared_ptr<EntailmentScorer> make_scorer(const std::string& spec);

}  // namespace ifsc
