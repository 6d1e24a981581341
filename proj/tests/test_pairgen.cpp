#include <doctest.h>

#include <set>

#include "helpers/synth.hpp"
#include "ifsc/errors.hpp"
#include "ifsc/pairgen.hpp"
#include "ifsc/rng.hpp"

using namespace ifsc;

namespace {

// Bundle with per-class shot counts ks; texts and labels are distinct.
PairBundle make_bundle(const std::vector<int>& ks) {
  PairBundle bundle;
  int next = 0;
  for (size_t c = 0; c < ks.size(); ++c) {
    ClassExamples ce;
    ce.cls = ClassDef{"cls" + std::to_string(c), "label " + std::to_string(c)};
    for (int e = 0; e < ks[c]; ++e) {
      Example ex;
      ex.id = "e" + std::to_string(1000 + next++);  // zero-padded, sortable
      ex.text = "text of " + ex.id;
      ex.class_id = ce.cls.class_id;
      ce.examples.push_back(std::move(ex));
    }
    bundle.classes.push_back(std::move(ce));
  }
  return bundle;
}

// Independent enumeration of what the generators must produce: every
// (example, label) combination for entailment, every ordered example pair
// for dnnc. Counts only; kept deliberately dumb.
PairCounts brute_entailment(const PairBundle& b) {
  PairCounts counts;
  for (const auto& ce : b.classes)
    for (size_t i = 0; i < ce.examples.size(); ++i)
      for (const auto& other : b.classes) {
        if (other.cls.class_id == ce.cls.class_id)
          counts.positive += 1;
        else
          counts.negative += 1;
      }
  return counts;
}

PairCounts brute_dnnc(const PairBundle& b) {
  struct Item {
    std::string id;
    std::string cls;
  };
  std::vector<Item> items;
  for (const auto& ce : b.classes)
    for (const auto& ex : ce.examples) items.push_back({ex.id, ce.cls.class_id});
  PairCounts counts;
  for (const auto& a : items)
    for (const auto& b2 : items) {
      if (a.id == b2.id) continue;
      if (a.cls == b2.cls)
        counts.positive += 1;
      else
        counts.negative += 1;
    }
  return counts;
}

PairCounts counts_of(const PairSet& set) {
  return {static_cast<long long>(set.n_positive), static_cast<long long>(set.n_negative)};
}

}  // namespace

TEST_CASE("entailment pair counts match the closed form") {
  // Uniform ks: h=10, k=3 -> 30 positives, (h-1)*h*k = 270 negatives.
  const PairBundle uniform = make_bundle(std::vector<int>(10, 3));
  const PairSet pairs = gen_entailment_pairs(uniform);
  CHECK(pairs.n_positive == 30);
  CHECK(pairs.n_negative == 270);
  CHECK(counts_of(pairs) == expected_counts(PairMode::kEntailment, 10, std::vector<int>(10, 3)));

  // One class: no wrong label exists.
  const PairSet lonely = gen_entailment_pairs(make_bundle({5}));
  CHECK(lonely.n_positive == 5);
  CHECK(lonely.n_negative == 0);

  // Mixed ks.
  const std::vector<int> ks{1, 1, 2, 2, 3, 3, 4, 4, 5, 5};
  const PairBundle mixed = make_bundle(ks);
  CHECK(counts_of(gen_entailment_pairs(mixed)) == brute_entailment(mixed));
  CHECK(counts_of(gen_entailment_pairs(mixed)) == expected_counts(PairMode::kEntailment, 10, ks));
  CHECK(expected_counts(PairMode::kEntailment, 10, ks) == PairCounts{30, 270});
}

TEST_CASE("dnnc pair counts match the closed form") {
  const PairBundle uniform = make_bundle(std::vector<int>(10, 3));
  const PairSet pairs = gen_dnnc_pairs(uniform);
  CHECK(pairs.n_positive == 60);   // h*k*(k-1)
  CHECK(pairs.n_negative == 810);  // h*(h-1)*k^2

  const PairSet lonely = gen_dnnc_pairs(make_bundle({1}));
  CHECK(lonely.n_positive == 0);
  CHECK(lonely.n_negative == 0);

  const std::vector<int> ks{1, 1, 2, 2, 3, 3, 4, 4, 5, 5};
  const PairBundle mixed = make_bundle(ks);
  CHECK(counts_of(gen_dnnc_pairs(mixed)) == brute_dnnc(mixed));
  CHECK(counts_of(gen_dnnc_pairs(mixed)) == expected_counts(PairMode::kDnnc, 10, ks));
  // (sum k)^2 - sum k^2 = 900 - 110.
  CHECK(expected_counts(PairMode::kDnnc, 10, ks) == PairCounts{80, 790});
}

TEST_CASE("hybrid is the union, entailment first") {
  const PairBundle uniform = make_bundle(std::vector<int>(10, 3));
  const PairSet pairs = gen_hybrid_pairs(uniform);
  CHECK(pairs.n_positive == 90);
  CHECK(pairs.n_negative == 1080);
  CHECK(pairs.pairs.front().origin == PairOrigin::kEntailment);
  CHECK(pairs.pairs.back().origin == PairOrigin::kDnnc);

  const PairSet single = gen_hybrid_pairs(make_bundle({1}));
  CHECK(single.n_positive == 1);
  CHECK(single.n_negative == 0);
}

TEST_CASE("hybrid counts equal the sum of the parts on random bundles") {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const int h = 1 + static_cast<int>(rng.below(8));
    std::vector<int> ks;
    for (int c = 0; c < h; ++c) ks.push_back(1 + static_cast<int>(rng.below(5)));
    const PairBundle bundle = make_bundle(ks);
    const PairCounts ent = counts_of(gen_entailment_pairs(bundle));
    const PairCounts dnnc = counts_of(gen_dnnc_pairs(bundle));
    const PairCounts hybrid = counts_of(gen_hybrid_pairs(bundle));
    CHECK(hybrid.positive == ent.positive + dnnc.positive);
    CHECK(hybrid.negative == ent.negative + dnnc.negative);
    CHECK(hybrid == expected_counts(PairMode::kHybrid, h, ks));
  }
}

TEST_CASE("expected_counts validates its input") {
  CHECK_THROWS_AS(expected_counts(PairMode::kEntailment, 0, {}), ConfigError);
  CHECK_THROWS_AS(expected_counts(PairMode::kEntailment, 3, {1, 2}), ConfigError);
  CHECK_THROWS_AS(expected_counts(PairMode::kDnnc, 2, {1, 0}), ConfigError);
  CHECK(expected_counts(PairMode::kEntailment, 10, std::vector<int>(10, 3)) ==
        PairCounts{30, 270});
  CHECK(expected_counts(PairMode::kDnnc, 10, std::vector<int>(10, 3)) == PairCounts{60, 810});
}

TEST_CASE("pair content invariants") {
  const PairBundle bundle = make_bundle({2, 3, 1});

  const PairSet ent = gen_entailment_pairs(bundle);
  for (const Pair& p : ent.pairs) {
    CHECK(!p.premise.empty());
    CHECK(!p.hypothesis.empty());
    if (p.positive) {
      // Positive hypothesis is the gold label's display form.
      const ClassDef* gold = nullptr;
      for (const auto& ce : bundle.classes)
        if (ce.cls.class_id == p.hypothesis_id) gold = &ce.cls;
      REQUIRE(gold != nullptr);
      CHECK(p.hypothesis == label_hypothesis(*gold));
    }
  }

  const PairSet dnnc = gen_dnnc_pairs(bundle);
  for (const Pair& p : dnnc.pairs) CHECK(p.premise_id != p.hypothesis_id);

  // Byte-determinism: re-running yields the identical sequence.
  const PairSet again = gen_entailment_pairs(bundle);
  REQUIRE(again.pairs.size() == ent.pairs.size());
  for (size_t i = 0; i < ent.pairs.size(); ++i) {
    CHECK(ent.pairs[i].premise == again.pairs[i].premise);
    CHECK(ent.pairs[i].hypothesis == again.pairs[i].hypothesis);
    CHECK(ent.pairs[i].positive == again.pairs[i].positive);
  }
}

TEST_CASE("label_hypothesis flattens separators") {
  CHECK(label_hypothesis(ClassDef{"x", "lost_or_stolen-card"}) == "lost or stolen card");
  CHECK(label_hypothesis(ClassDef{"x", "plain name"}) == "plain name");
}

TEST_CASE("empty label names are rejected") {
  PairBundle bundle = make_bundle({2, 2});
  bundle.classes[1].cls.label_name = "  ";
  CHECK_THROWS_WITH_AS(gen_entailment_pairs(bundle), doctest::Contains("label name"), DataError);
}

TEST_CASE("extra negative labels widen only the negatives") {
  PairBundle bundle = make_bundle({2, 2});
  const PairCounts before = counts_of(gen_entailment_pairs(bundle));
  bundle.extra_negative_labels.push_back(ClassDef{"old", "earlier label"});
  const PairCounts after = counts_of(gen_entailment_pairs(bundle));
  CHECK(after.positive == before.positive);
  CHECK(after.negative == before.negative + 4);  // one more wrong label per example
}

TEST_CASE("pair files round-trip") {
  synth::TempDir dir("pairs");
  const PairSet pairs = gen_hybrid_pairs(make_bundle({2, 2}));
  const std::string path = dir.file("pairs.jsonl");
  write_pairs_jsonl(pairs, path);
  const PairSet loaded = read_pairs_jsonl(path);
  REQUIRE(loaded.pairs.size() == pairs.pairs.size());
  CHECK(loaded.n_positive == pairs.n_positive);
  CHECK(loaded.n_negative == pairs.n_negative);
  for (size_t i = 0; i < pairs.pairs.size(); ++i) {
    CHECK(loaded.pairs[i].premise == pairs.pairs[i].premise);
    CHECK(loaded.pairs[i].hypothesis == pairs.pairs[i].hypothesis);
    CHECK(loaded.pairs[i].positive == pairs.pairs[i].positive);
    CHECK(loaded.pairs[i].origin == pairs.pairs[i].origin);
  }
}
