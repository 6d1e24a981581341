#include <doctest.h>

#include <algorithm>
#include <set>

#include "helpers/synth.hpp"
#include "ifsc/corpus.hpp"
#include "ifsc/errors.hpp"
#include "ifsc/io.hpp"

using namespace ifsc;

namespace {

std::string write_file(const synth::TempDir& dir, const std::string& name,
                       const std::string& content) {
  const std::string path = dir.file(name);
  write_text_file(path, content);
  return path;
}

SplitConfig table1_config(uint64_t seed = 7) {
  SplitConfig config;
  config.n_base = 20;
  config.n_rounds = 5;
  config.classes_per_round = 10;
  config.n_ood = 7;
  config.k_groups = {{2, 1}, {2, 2}, {2, 3}, {2, 4}, {2, 5}};
  config.seed = seed;
  return config;
}

// All example ids in the manifest, cell by cell.
std::vector<std::set<std::string>> manifest_cells(const SplitManifest& m) {
  std::vector<std::set<std::string>> cells;
  auto add = [&](const ManifestCell& c) {
    std::set<std::string> ids(c.train_ids.begin(), c.train_ids.end());
    ids.insert(c.test_ids.begin(), c.test_ids.end());
    cells.push_back(std::move(ids));
  };
  for (const auto& c : m.base) add(c);
  for (const auto& round : m.rounds)
    for (const auto& c : round) add(c);
  for (const auto& c : m.ood) add(c);
  return cells;
}

}  // namespace

TEST_CASE("load_corpus parses JSONL and dedups classes") {
  synth::TempDir dir("corpus");
  const std::string path = write_file(dir, "c.jsonl",
                                      R"({"id":"a","text":"open account","label":"open"})"
                                      "\n"
                                      R"({"id":"b","text":"close account","label":"close"})"
                                      "\n"
                                      R"({"id":"c","text":"open another","label":"open"})"
                                      "\n");
  const Corpus corpus = load_corpus(path);
  CHECK(corpus.examples().size() == 3);
  CHECK(corpus.classes().size() == 2);
  CHECK(corpus.examples()[0].id == "a");
  CHECK(corpus.class_by_id("open").label_name == "open");
}

TEST_CASE("load_corpus rejects an empty file") {
  synth::TempDir dir("corpus");
  const std::string path = write_file(dir, "empty.jsonl", "");
  CHECK_THROWS_WITH_AS(load_corpus(path), doctest::Contains("empty corpus"), DataError);
}

TEST_CASE("load_corpus cites the malformed line") {
  synth::TempDir dir("corpus");
  const std::string path = write_file(dir, "bad.jsonl",
                                      R"({"id":"a","text":"fine","label":"x"})"
                                      "\n"
                                      "{not json\n");
  CHECK_THROWS_WITH_AS(load_corpus(path), doctest::Contains("line 2"), DataError);
}

TEST_CASE("load_corpus assigns line numbers as missing ids") {
  synth::TempDir dir("corpus");
  const std::string path = write_file(dir, "c.jsonl",
                                      R"({"text":"hello there","label":"x"})"
                                      "\n");
  CHECK(load_corpus(path).examples()[0].id == "1");
}

TEST_CASE("load_corpus rejects duplicate ids, blank text and mixed split tags") {
  synth::TempDir dir("corpus");
  CHECK_THROWS_WITH_AS(
      load_corpus(write_file(dir, "dup.jsonl",
                             R"({"id":"a","text":"one","label":"x"})"
                             "\n"
                             R"({"id":"a","text":"two","label":"x"})"
                             "\n")),
      doctest::Contains("duplicate example id"), DataError);
  CHECK_THROWS_WITH_AS(load_corpus(write_file(dir, "blank.jsonl",
                                              R"({"id":"a","text":"  ","label":"x"})"
                                              "\n")),
                       doctest::Contains("empty text"), DataError);
  CHECK_THROWS_WITH_AS(
      load_corpus(write_file(dir, "mixed.jsonl",
                             R"({"id":"a","text":"one","label":"x","split":"train"})"
                             "\n"
                             R"({"id":"b","text":"two","label":"x"})"
                             "\n")),
      doctest::Contains("split tag"), DataError);
}

TEST_CASE("sidecar labels declare the class table") {
  synth::TempDir dir("corpus");
  const std::string corpus_path = write_file(dir, "c.jsonl",
                                             R"({"id":"a","text":"one","label":"x"})"
                                             "\n");
  const std::string labels_path =
      write_file(dir, "l.jsonl", R"({"label":"x","label_name":"do a thing"})"
                                 "\n");
  const Corpus corpus = load_corpus(corpus_path, labels_path);
  CHECK(corpus.class_by_id("x").label_name == "do a thing");

  const std::string bad = write_file(dir, "c2.jsonl",
                                     R"({"id":"a","text":"one","label":"unknown"})"
                                     "\n");
  CHECK_THROWS_WITH_AS(load_corpus(bad, labels_path), doctest::Contains("undeclared class"),
                       DataError);
}

TEST_CASE("build_split reproduces the benchmark shape") {
  const Corpus corpus = synth::random_corpus(77, 8, 24, 42);
  const SplitManifest manifest = build_split(corpus, table1_config());

  CHECK(manifest.base.size() == 20);
  CHECK(manifest.rounds.size() == 5);
  CHECK(manifest.ood.size() == 7);
  for (const auto& round : manifest.rounds) {
    CHECK(round.size() == 10);
    size_t train = 0;
    for (const auto& cell : round) {
      CHECK(cell.shots == static_cast<int>(cell.train_ids.size()));
      train += cell.train_ids.size();
    }
    CHECK(train == 30);  // 2*(1+2+3+4+5)
  }
  for (const auto& cell : manifest.ood) CHECK(cell.train_ids.empty());
}

TEST_CASE("build_split is deterministic") {
  const Corpus corpus = synth::random_corpus(77, 8, 24, 42);
  const SplitManifest a = build_split(corpus, table1_config());
  const SplitManifest b = build_split(corpus, table1_config());
  CHECK(manifest_to_string(a) == manifest_to_string(b));

  const SplitManifest c = build_split(corpus, table1_config(/*seed=*/8));
  CHECK(manifest_to_string(a) != manifest_to_string(c));
}

TEST_CASE("build_split validates the config") {
  const Corpus corpus = synth::random_corpus(77, 8, 24, 42);

  SplitConfig bad_groups = table1_config();
  bad_groups.k_groups = {{4, 1}, {4, 2}};  // sums to 8, h = 10
  CHECK_THROWS_AS(build_split(corpus, bad_groups), ConfigError);

  SplitConfig bad_k = table1_config();
  bad_k.k_groups = {{10, 6}};
  CHECK_THROWS_AS(build_split(corpus, bad_k), ConfigError);

  SplitConfig too_many = table1_config();
  too_many.n_ood = 30;
  CHECK_THROWS_WITH_AS(build_split(corpus, too_many), doctest::Contains("classes"), DataError);
}

TEST_CASE("build_split rejects classes with too few examples") {
  const Corpus corpus = synth::random_corpus(6, 2, 3, 1);  // 2-3 examples per class
  SplitConfig config;
  config.n_rounds = 1;
  config.classes_per_round = 5;
  config.n_ood = 1;
  config.k_groups = {{5, 5}};
  config.seed = 3;
  CHECK_THROWS_WITH_AS(build_split(corpus, config), doctest::Contains("train examples"),
                       DataError);
}

TEST_CASE("manifest cells partition the corpus ids") {
  for (uint64_t seed : {1ull, 2ull, 3ull}) {
    const Corpus corpus = synth::random_corpus(30, 7, 20, seed);
    SplitConfig config;
    config.n_base = 4;
    config.n_rounds = 3;
    config.classes_per_round = 6;
    config.n_ood = 4;
    config.k_groups = {{2, 1}, {2, 3}, {2, 5}};
    config.seed = seed * 31;
    const SplitManifest manifest = build_split(corpus, config);

    const auto cells = manifest_cells(manifest);
    std::set<std::string> all;
    size_t total = 0;
    for (const auto& cell : cells) {
      total += cell.size();
      all.insert(cell.begin(), cell.end());
    }
    CHECK(all.size() == total);  // pairwise disjoint

    for (const auto& round : manifest.rounds)
      for (const auto& cell : round) {
        CHECK(cell.shots >= 1);
        CHECK(cell.shots <= 5);
        CHECK(cell.train_ids.size() == static_cast<size_t>(cell.shots));
      }
  }
}

TEST_CASE("split flags are respected when present") {
  const synth::KeywordCorpus kc = synth::make_keyword_corpus(10, 6, 4, 9);
  SplitConfig config;
  config.n_rounds = 2;
  config.classes_per_round = 4;
  config.n_ood = 2;
  config.k_groups = {{2, 2}, {2, 4}};
  config.seed = 5;
  const SplitManifest manifest = build_split(kc.corpus, config);

  for (const auto& round : manifest.rounds)
    for (const auto& cell : round) {
      for (const auto& id : cell.train_ids)
        CHECK(kc.corpus.example_by_id(id).split == SplitTag::kTrain);
      for (const auto& id : cell.test_ids)
        CHECK(kc.corpus.example_by_id(id).split == SplitTag::kTest);
      CHECK(cell.test_ids.size() == 4);
    }
}

TEST_CASE("test_cap_per_class limits the test side") {
  const synth::KeywordCorpus kc = synth::make_keyword_corpus(10, 6, 4, 9);
  SplitConfig config;
  config.n_rounds = 2;
  config.classes_per_round = 4;
  config.n_ood = 2;
  config.k_groups = {{2, 2}, {2, 4}};
  config.seed = 5;
  config.test_cap_per_class = 2;
  const SplitManifest manifest = build_split(kc.corpus, config);
  for (const auto& round : manifest.rounds)
    for (const auto& cell : round) CHECK(cell.test_ids.size() == 2);
}

TEST_CASE("round_view exposes exactly one round") {
  const Corpus corpus = synth::random_corpus(77, 8, 24, 42);
  const SplitManifest manifest = build_split(corpus, table1_config());

  const PhaseData round1 = round_view(manifest, corpus, 1);
  CHECK(round1.classes.size() == 10);
  CHECK(round1.train.size() == 30);
  CHECK(round1.seen_labels.size() == 20 + 10);

  CHECK_THROWS_AS(round_view(manifest, corpus, 0), DataError);
  CHECK_THROWS_AS(round_view(manifest, corpus, 6), DataError);

  std::set<std::string> round1_ids;
  for (const Example& ex : round1.train) round1_ids.insert(ex.id);
  const PhaseData round2 = round_view(manifest, corpus, 2);
  for (const Example& ex : round2.train) CHECK(round1_ids.count(ex.id) == 0);

  const PhaseData base = base_view(manifest, corpus);
  CHECK(base.classes.size() == 20);
  CHECK(base.seen_labels.size() == 20);
}

TEST_CASE("n_base = 0 yields an empty base section") {
  const Corpus corpus = synth::random_corpus(20, 6, 12, 11);
  SplitConfig config;
  config.n_rounds = 2;
  config.classes_per_round = 5;
  config.n_ood = 3;
  config.k_groups = {{5, 2}};
  config.seed = 2;
  const SplitManifest manifest = build_split(corpus, config);
  CHECK(manifest.base.empty());
  CHECK_THROWS_AS(base_view(manifest, corpus), DataError);
  CHECK(manifest.group_names() ==
        std::vector<std::string>{"C_n^1", "C_n^2", "C_o"});
}

TEST_CASE("manifest round-trips through JSON") {
  synth::TempDir dir("manifest");
  const Corpus corpus = synth::random_corpus(77, 8, 24, 42);
  const SplitManifest manifest = build_split(corpus, table1_config());

  const std::string path = dir.file("manifest.json");
  write_manifest(manifest, path);
  const SplitManifest loaded = load_manifest(path);
  CHECK(manifest_to_string(loaded) == manifest_to_string(manifest));

  write_text_file(path, "{\"format_version\": 99}");
  CHECK_THROWS_AS(load_manifest(path), DataError);
}
