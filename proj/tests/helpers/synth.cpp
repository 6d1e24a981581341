#include "helpers/synth.hpp"

#include <set>

#include <json.hpp>

#include "ifsc/rng.hpp"

namespace synth {

using ifsc::SplitMix64;
using nlohmann::json;

namespace {

const std::vector<std::string>& fillers() {
  static const std::vector<std::string> words = {
      "please", "help",  "with",  "my",    "need",  "the",   "show",
      "how",    "about", "can",   "you",   "now",   "today", "status",
      "check",  "want",  "issue", "again", "still", "quick"};
  return words;
}

std::string make_word(SplitMix64& rng) {
  static const std::string consonants = "bdfgklmnprstvz";
  static const std::string vowels = "aeiou";
  std::string word;
  for (int s = 0; s < 3; ++s) {
    word += consonants[rng.below(consonants.size())];
    word += vowels[rng.below(vowels.size())];
  }
  return word;
}

std::string utterance(const std::string& keyword, SplitMix64& rng) {
  const auto& pool = fillers();
  std::string text;
  const size_t lead = 1 + rng.below(2);
  const size_t tail = 1 + rng.below(2);
  for (size_t i = 0; i < lead; ++i) text += pool[rng.below(pool.size())] + " ";
  text += keyword;
  for (size_t i = 0; i < tail; ++i) text += " " + pool[rng.below(pool.size())];
  return text;
}

}  // namespace

std::vector<std::string> keyword_pool(size_t n, uint64_t seed) {
  SplitMix64 rng(ifsc::derive_seed(seed, "keywords"));
  std::set<std::string> seen;
  std::vector<std::string> words;
  while (words.size() < n) {
    std::string w = make_word(rng);
    if (seen.insert(w).second) words.push_back(std::move(w));
  }
  return words;
}

KeywordCorpus make_keyword_corpus(int n_classes, int train_per_class, int test_per_class,
                                  uint64_t seed) {
  KeywordCorpus out;
  out.keywords = keyword_pool(static_cast<size_t>(n_classes), seed);
  SplitMix64 rng(ifsc::derive_seed(seed, "examples"));

  for (int c = 0; c < n_classes; ++c) {
    const std::string class_id = "c" + std::to_string(c);
    const std::string label_name = out.keywords[static_cast<size_t>(c)] + " service";
    out.corpus.add_class(ifsc::ClassDef{class_id, label_name});
    out.labels_jsonl +=
        json{{"label", class_id}, {"label_name", label_name}}.dump() + "\n";

    for (int e = 0; e < train_per_class + test_per_class; ++e) {
      ifsc::Example ex;
      ex.id = class_id + "_e" + std::to_string(e);
      ex.text = utterance(out.keywords[static_cast<size_t>(c)], rng);
      ex.class_id = class_id;
      ex.split = e < train_per_class ? ifsc::SplitTag::kTrain : ifsc::SplitTag::kTest;
      out.corpus_jsonl += json{{"id", ex.id},
                               {"text", ex.text},
                               {"label", ex.class_id},
                               {"split", e < train_per_class ? "train" : "test"}}
                              .dump() +
                          "\n";
      out.corpus.add_example(std::move(ex), /*auto_register_class=*/false);
    }
  }
  return out;
}

ifsc::PairSet synthetic_nli(size_t n_pairs, const std::vector<std::string>& vocab,
                            uint64_t seed) {
  if (vocab.size() < 2) throw std::invalid_argument("synthetic_nli needs >= 2 tokens");
  SplitMix64 rng(ifsc::derive_seed(seed, "nli"));
  ifsc::PairSet out;
  for (size_t i = 0; i < n_pairs; ++i) {
    const std::string& subject = vocab[rng.below(vocab.size())];
    ifsc::Pair p;
    p.premise = utterance(subject, rng);
    p.positive = i % 2 == 0;
    if (p.positive) {
      p.hypothesis = subject + " service";
    } else {
      std::string other = vocab[rng.below(vocab.size())];
      while (other == subject) other = vocab[rng.below(vocab.size())];
      p.hypothesis = other + " service";
    }
    p.origin = ifsc::PairOrigin::kEntailment;
    p.premise_id = "nli_" + std::to_string(i);
    p.hypothesis_id = p.positive ? subject : p.hypothesis;
    out.push(std::move(p));
  }
  return out;
}

ifsc::Corpus random_corpus(int n_classes, int min_examples, int max_examples, uint64_t seed) {
  SplitMix64 rng(ifsc::derive_seed(seed, "random_corpus"));
  const auto words = keyword_pool(static_cast<size_t>(n_classes), seed ^ 0x5eedull);
  ifsc::Corpus corpus;
  int next_id = 0;
  for (int c = 0; c < n_classes; ++c) {
    const std::string class_id = "k" + std::to_string(c);
    corpus.add_class(ifsc::ClassDef{class_id, words[static_cast<size_t>(c)] + " things"});
    const int count =
        min_examples + static_cast<int>(rng.below(static_cast<uint64_t>(max_examples - min_examples + 1)));
    for (int e = 0; e < count; ++e) {
      ifsc::Example ex;
      ex.id = "x" + std::to_string(next_id++);
      ex.text = utterance(words[static_cast<size_t>(c)], rng);
      ex.class_id = class_id;
      corpus.add_example(std::move(ex), /*auto_register_class=*/false);
    }
  }
  return corpus;
}

TempDir::TempDir(const std::string& tag) {
  static uint64_t counter = 0;
  const auto base = std::filesystem::temp_directory_path() /
                    ("ifsc_" + tag + "_" + std::to_string(::getpid()) + "_" +
                     std::to_string(counter++));
  std::filesystem::create_directories(base);
  path_ = base.string();
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string TempDir::file(const std::string& name) const {
  return (std::filesystem::path(path_) / name).string();
}

}  // namespace synth
