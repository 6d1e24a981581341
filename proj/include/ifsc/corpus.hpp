#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ifsc {

enum class SplitTag { kUnspecified, kTrain, kTest };

// One labeled utterance; the atomic corpus unit.
struct Example {
  std::string id;
  std::string text;  // whitespace-trimmed, non-empty
  std::string class_id;
  SplitTag split = SplitTag::kUnspecified;
};

struct ClassDef {
  std::string class_id;
  std::string label_name;  // natural-language name, e.g. "lost or stolen card"
};

// Immutable after loading; example order is file order, class order is
// first-seen order.
class Corpus {
 public:
  // Registers a class; repeated class_ids keep the first label_name.
  void add_class(ClassDef def);
  // Validates the example (trimmed non-empty text, unique id, known class
  // unless auto_register_class) and appends it.
  void add_example(Example ex, bool auto_register_class = true);

  const std::vector<Example>& examples() const { return examples_; }
  const std::vector<ClassDef>& classes() const { return classes_; }

  bool has_class(const std::string& class_id) const;
  const ClassDef& class_by_id(const std::string& class_id) const;
  const Example& example_by_id(const std::string& example_id) const;
  std::vector<std::string> example_ids_of_class(const std::string& class_id) const;

  // True when every example carries an explicit train/test tag. Mixed
  // tagging is rejected at load time.
  bool has_split_flags() const;

 private:
  std::vector<Example> examples_;
  std::vector<ClassDef> classes_;
  std::map<std::string, size_t> example_index_;
  std::map<std::string, size_t> class_index_;
};

// Reads a JSONL corpus: one {"id": str?, "text": str, "label": str,
// "split": "train"|"test"?} object per line; a missing id becomes the line
// number. labels_path optionally points at a sidecar JSONL of
// {"label": str, "label_name": str}; when given, the sidecar is the class
// table and examples may not reference classes outside it.
Corpus load_corpus(const std::string& path, const std::string& labels_path = "");

struct KGroup {
  int size = 0;   // how many classes in the group
  int shots = 0;  // k for each of them, in [1, 5]
};

struct SplitConfig {
  int n_base = 0;             // base classes (0 = no-base setting)
  int n_rounds = 0;           // m
  int classes_per_round = 0;  // h
  int n_ood = 0;
  std::vector<KGroup> k_groups;           // group sizes must sum to h
  std::optional<int> base_shots;          // per-base-class training cap; nullopt = all
  std::optional<int> test_cap_per_class;  // cap on test examples per class; nullopt = all
  uint64_t seed = 0;
  bool hybrid_compatible = true;  // false for corpora whose labels cannot act as hypotheses

  void validate() const;  // throws ConfigError
  std::vector<int> shots_per_round_class() const;  // k_groups expanded to h entries
};

struct ManifestCell {
  std::string class_id;
  std::string label_name;
  int shots = 0;  // k for round classes; 0 for base/ood
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
};

// Frozen assignment of classes and examples to base / rounds / ood cells.
// Pure function of (corpus, config): same seed, same bytes.
struct SplitManifest {
  SplitConfig config;
  std::vector<ManifestCell> base;
  std::vector<std::vector<ManifestCell>> rounds;
  std::vector<ManifestCell> ood;  // train_ids always empty

  std::vector<std::string> group_names() const;  // C_b (if any), C_n^1.., C_o
  const ManifestCell* find_cell(const std::string& class_id) const;
};

SplitManifest build_split(const Corpus& corpus, const SplitConfig& config);

// Split config as a JSON file (same schema as the manifest's config echo).
SplitConfig load_split_config(const std::string& path);

// One phase worth of training data plus the label registry of everything
// seen so far (names only). Base is phase 0; rounds are 1..m.
struct PhaseData {
  std::string phase;  // "base" or "round_<i>"
  int round_index = 0;
  std::vector<ClassDef> classes;
  std::map<std::string, int> shots;  // class_id -> k (round phases)
  std::vector<Example> train;
  std::vector<ClassDef> seen_labels;
};

PhaseData base_view(const SplitManifest& manifest, const Corpus& corpus);
PhaseData round_view(const SplitManifest& manifest, const Corpus& corpus, int round_index);

// Manifest file IO. Written pretty-printed with sorted keys; extra_meta
// entries (config hash, seed) land under a "meta" key.
void write_manifest(const SplitManifest& manifest, const std::string& path,
                    const std::map<std::string, std::string>& extra_meta = {});
SplitManifest load_manifest(const std::string& path);
std::string manifest_to_string(const SplitManifest& manifest,
                               const std::map<std::string, std::string>& extra_meta = {});

}  // namespace ifsc
