#pragma once

#include <string>
#include <vector>

#include "ifsc/corpus.hpp"

namespace ifsc {

enum class PairMode { kEntailment, kDnnc, kHybrid };

PairMode pair_mode_from_string(const std::string& s);  // "entail"|"dnnc"|"hybrid"
std::string to_string(PairMode mode);

enum class PairOrigin { kEntailment, kDnnc };

// One (premise, hypothesis) training instance for the binary scorer.
// In entailment origin the hypothesis is a class label name; in dnnc origin
// it is another example's text.
struct Pair {
  std::string premise;
  std::string hypothesis;
  bool positive = false;
  PairOrigin origin = PairOrigin::kEntailment;
  std::string premise_id;     // source example id
  std::string hypothesis_id;  // class id (entailment) or example id (dnnc)
};

struct PairSet {
  std::vector<Pair> pairs;
  size_t n_positive = 0;
  size_t n_negative = 0;

  void push(Pair p) {
    (p.positive ? n_positive : n_negative) += 1;
    pairs.push_back(std::move(p));
  }
  void append(const PairSet& other) {
    pairs.insert(pairs.end(), other.pairs.begin(), other.pairs.end());
    n_positive += other.n_positive;
    n_negative += other.n_negative;
  }
  bool empty() const { return pairs.empty(); }
};

struct ClassExamples {
  ClassDef cls;
  std::vector<Example> examples;
};

// Input to the pair generators: the classes of one phase with their
// examples. extra_negative_labels optionally adds previously seen label
// names as negative hypotheses (off by default; within-phase labels are
// always used).
struct PairBundle {
  std::vector<ClassExamples> classes;
  std::vector<ClassDef> extra_negative_labels;

  static PairBundle from_phase(const PhaseData& phase);
  std::vector<int> shot_counts() const;  // per-class example counts
};

// Label name as hypothesis text: underscores and dashes become spaces, so
// "lost_or_stolen-card" reads as a phrase.
std::string label_hypothesis(const ClassDef& cls);

// Positives pair every example with its own label name; negatives pair it
// with every other label in the bundle. Output order: by example id, then
// hypothesis class id.
PairSet gen_entailment_pairs(const PairBundle& bundle);

// Ordered example pairs (a, b), a != b: positive iff same class. Both
// directions are emitted, matching ordered-pair counting.
PairSet gen_dnnc_pairs(const PairBundle& bundle);

// Entailment pairs first, then dnnc pairs.
PairSet gen_hybrid_pairs(const PairBundle& bundle);

PairSet gen_pairs(PairMode mode, const PairBundle& bundle);

struct PairCounts {
  long long positive = 0;
  long long negative = 0;
  bool operator==(const PairCounts&) const = default;
};

// Closed forms for the generator outputs, generalized to per-class shot
// counts ks (|ks| = h):
//   entailment: (sum k, (h-1) * sum k)
//   dnnc:       (sum k(k-1), (sum k)^2 - sum k^2)
//   hybrid:     element-wise sum of the two
PairCounts expected_counts(PairMode mode, int h, const std::vector<int>& ks);

// Pair file format: JSONL {"premise", "hypothesis",
// "label": "entail"|"not_entail", "origin": "ent"|"dnnc"}.
void write_pairs_jsonl(const PairSet& pairs, const std::string& path);
PairSet read_pairs_jsonl(const std::string& path);

}  // namespace ifsc
