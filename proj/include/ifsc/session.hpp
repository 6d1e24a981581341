#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "ifsc/corpus.hpp"
#include "ifsc/pairgen.hpp"
#include "ifsc/scorer_backend.hpp"

namespace ifsc {

struct RegistryEntry {
  std::string class_id;
  std::string label_name;
  std::string phase;  // "base" or "round_<i>"
};

// Append-only ordered label space; order is introduction order.
class LabelRegistry {
 public:
  void append(RegistryEntry entry);  // throws DataError on duplicate class_id
  const std::vector<RegistryEntry>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }
  bool contains(const std::string& class_id) const;
  // Position in introduction order; throws DataError when absent.
  size_t position(const std::string& class_id) const;

 private:
  std::vector<RegistryEntry> entries_;
  std::map<std::string, size_t> index_;
};

// One audit entry per training phase: exactly which example ids were used.
struct PhaseRecord {
  std::string phase;
  std::vector<std::string> class_ids;
  std::vector<std::string> example_ids;
  size_t n_positive = 0;
  size_t n_negative = 0;
  std::vector<double> losses;  // per-epoch mean loss (empty for external backends)
};

struct SessionOptions {
  PairMode mode = PairMode::kEntailment;
  // When true, training pairs for a round also use earlier phases' label
  // names as negative hypotheses. Label names are always visible; off by
  // default.
  bool seen_label_negatives = false;
  std::string work_dir;  // where pair files go; "" keeps everything in memory
  TrainSpec base_spec;
  TrainSpec round_spec;
  std::map<std::string, std::string> journal_meta;  // config hash, seed, ...
};

// Frozen model + registry copy; safe to evaluate while the live session
// keeps training.
struct SessionSnapshot {
  LabelRegistry registry;
  std::shared_ptr<EntailmentScorer> scorer;
  std::string phase;
};

// The incremental protocol engine. Phases run strictly in order
// (optional base, then rounds 1..m); each phase may only train on its own
// examples, which the session both enforces structurally and records in an
// audit log.
class Session {
 public:
  // Registry starts with the manifest's base class names (names are public
  // from the start; base training still has to be run explicitly). Loads
  // the pretrained checkpoint into the scorer when a path is given.
  // Throws ConfigError when Hybrid mode is requested but the manifest is
  // flagged hybrid-incompatible.
  Session(SplitManifest manifest, std::shared_ptr<EntailmentScorer> scorer,
          SessionOptions options, const std::string& pretrained_path = "");

  void train_base(const PhaseData& base);    // once, before any round
  void advance_round(const PhaseData& round);  // rounds in order 1..m

  SessionSnapshot snapshot(const std::string& checkpoint_hint = "");

  const LabelRegistry& registry() const { return registry_; }
  const std::vector<PhaseRecord>& audit_log() const { return audit_log_; }
  const SplitManifest& manifest() const { return manifest_; }
  EntailmentScorer& scorer() { return *scorer_; }
  bool base_trained() const { return base_trained_; }
  int rounds_completed() const { return rounds_completed_; }

  // Run journal: a meta line, then one line per phase with audit ids, pair
  // counts and the loss curve.
  void write_journal(const std::string& path) const;

 private:
  void validate_payload(const PhaseData& phase, const std::set<std::string>& allowed_ids);
  void train_phase(const PhaseData& phase, const TrainSpec& spec);

  SplitManifest manifest_;
  std::shared_ptr<EntailmentScorer> scorer_;
  SessionOptions options_;
  LabelRegistry registry_;
  std::vector<PhaseRecord> audit_log_;
  std::map<std::string, std::set<std::string>> phase_train_ids_;  // from manifest
  bool base_trained_ = false;
  int rounds_completed_ = 0;
};

// True when all per-phase example-id sets are pairwise disjoint.
bool audit_is_disjoint(const std::vector<PhaseRecord>& records);

// Parses a journal file and throws DataError if any two phases share an
// example id.
void verify_journal_file(const std::string& path);

}  // namespace ifsc
