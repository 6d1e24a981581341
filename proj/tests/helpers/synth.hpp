#pragma once

// Deterministic synthetic data for tests: keyword-defined classification
// corpora ("one keyword per class, label name contains it") and balanced
// entailment pair sets over the same token pool.

#include <filesystem>
#include <string>
#include <vector>

#include "ifsc/corpus.hpp"
#include "ifsc/pairgen.hpp"

namespace synth {

// n distinct 6-char CV words, stable for a given seed.
std::vector<std::string> keyword_pool(size_t n, uint64_t seed);

struct KeywordCorpus {
  ifsc::Corpus corpus;
  std::vector<std::string> keywords;  // keywords[i] belongs to class "c<i>"
  std::string corpus_jsonl;           // same data as files, for CLI tests
  std::string labels_jsonl;
};

// Classes "c0".."c<n-1>" with label name "<keyword> service"; every
// utterance contains its class keyword plus shared filler words. Examples
// carry explicit train/test tags.
KeywordCorpus make_keyword_corpus(int n_classes, int train_per_class, int test_per_class,
                                  uint64_t seed);

// Balanced positive/negative (premise, hypothesis) pairs over a token pool:
// positives share the salient token, negatives do not.
ifsc::PairSet synthetic_nli(size_t n_pairs, const std::vector<std::string>& vocab, uint64_t seed);

// Unlabeled-split corpus with varying per-class example counts, for split
// builder property tests.
ifsc::Corpus random_corpus(int n_classes, int min_examples, int max_examples, uint64_t seed);

// Self-cleaning scratch directory.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::string& path() const { return path_; }
  std::string file(const std::string& name) const;

 private:
  std::string path_;
};

}  // namespace synth
