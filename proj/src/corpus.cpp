#include "ifsc/corpus.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "ifsc/errors.hpp"
#include "ifsc/io.hpp"
#include "ifsc/rng.hpp"
#include "json_util.hpp"

namespace ifsc {

using nlohmann::json;

void Corpus::add_class(ClassDef def) {
  if (def.class_id.empty()) throw DataError("class with empty class_id");
  if (class_index_.count(def.class_id)) return;  // first definition wins
  class_index_[def.class_id] = classes_.size();
  classes_.push_back(std::move(def));
}

void Corpus::add_example(Example ex, bool auto_register_class) {
  ex.text = trim(ex.text);
  if (ex.text.empty()) throw DataError("example '" + ex.id + "' has empty text");
  if (ex.id.empty()) throw DataError("example with empty id");
  if (example_index_.count(ex.id)) throw DataError("duplicate example id '" + ex.id + "'");
  if (!class_index_.count(ex.class_id)) {
    if (!auto_register_class)
      throw DataError("example '" + ex.id + "' references undeclared class '" + ex.class_id + "'");
    add_class(ClassDef{ex.class_id, ex.class_id});
  }
  example_index_[ex.id] = examples_.size();
  examples_.push_back(std::move(ex));
}

bool Corpus::has_class(const std::string& class_id) const {
  return class_index_.count(class_id) > 0;
}

const ClassDef& Corpus::class_by_id(const std::string& class_id) const {
  auto it = class_index_.find(class_id);
  if (it == class_index_.end()) throw DataError("unknown class '" + class_id + "'");
  return classes_[it->second];
}

const Example& Corpus::example_by_id(const std::string& example_id) const {
  auto it = example_index_.find(example_id);
  if (it == example_index_.end()) throw DataError("unknown example id '" + example_id + "'");
  return examples_[it->second];
}

std::vector<std::string> Corpus::example_ids_of_class(const std::string& class_id) const {
  std::vector<std::string> ids;
  for (const Example& ex : examples_)
    if (ex.class_id == class_id) ids.push_back(ex.id);
  return ids;
}

bool Corpus::has_split_flags() const {
  if (examples_.empty()) return false;
  return std::all_of(examples_.begin(), examples_.end(),
                     [](const Example& e) { return e.split != SplitTag::kUnspecified; });
}

namespace {

json parse_line(const std::string& line, size_t line_no, const std::string& path) {
  try {
    json j = json::parse(line);
    if (!j.is_object()) throw DataError("record is not an object");
    return j;
  } catch (const json::exception& e) {
    throw DataError(path + ": parse error at line " + std::to_string(line_no) + ": " + e.what());
  }
}

std::string require_string(const json& j, const char* key, size_t line_no,
                           const std::string& path) {
  if (!j.contains(key) || !j[key].is_string())
    throw DataError(path + ": line " + std::to_string(line_no) + ": missing string field '" +
                    key + "'");
  return j[key].get<std::string>();
}

}  // namespace

Corpus load_corpus(const std::string& path, const std::string& labels_path) {
  Corpus corpus;
  bool explicit_classes = false;

  if (!labels_path.empty()) {
    explicit_classes = true;
    const auto lines = split_lines(read_text_file(labels_path));
    for (size_t i = 0; i < lines.size(); ++i) {
      if (trim(lines[i]).empty()) continue;
      const json j = parse_line(lines[i], i + 1, labels_path);
      ClassDef def;
      def.class_id = require_string(j, "label", i + 1, labels_path);
      def.label_name = require_string(j, "label_name", i + 1, labels_path);
      if (def.label_name.empty())
        throw DataError(labels_path + ": line " + std::to_string(i + 1) + ": empty label_name");
      corpus.add_class(std::move(def));
    }
  }

  const auto lines = split_lines(read_text_file(path));
  size_t n_records = 0;
  size_t n_flagged = 0;
  for (size_t i = 0; i < lines.size(); ++i) {
    const size_t line_no = i + 1;
    if (trim(lines[i]).empty()) continue;
    const json j = parse_line(lines[i], line_no, path);

    Example ex;
    ex.text = require_string(j, "text", line_no, path);
    ex.class_id = require_string(j, "label", line_no, path);
    if (ex.class_id.empty())
      throw DataError(path + ": line " + std::to_string(line_no) + ": empty label");
    ex.id = j.contains("id") ? require_string(j, "id", line_no, path) : std::to_string(line_no);
    if (j.contains("split")) {
      const std::string s = require_string(j, "split", line_no, path);
      if (s == "train")
        ex.split = SplitTag::kTrain;
      else if (s == "test")
        ex.split = SplitTag::kTest;
      else
        throw DataError(path + ": line " + std::to_string(line_no) + ": bad split tag '" + s +
                        "'");
      ++n_flagged;
    }
    try {
      corpus.add_example(std::move(ex), /*auto_register_class=*/!explicit_classes);
    } catch (const Error& e) {
      throw DataError(path + ": line " + std::to_string(line_no) + ": " + e.what());
    }
    ++n_records;
  }

  if (n_records == 0) throw DataError(path + ": empty corpus");
  if (n_flagged != 0 && n_flagged != n_records)
    throw DataError(path + ": some examples carry a train/test split tag and some do not");
  return corpus;
}

void SplitConfig::validate() const {
  if (n_base < 0 || n_rounds < 0 || classes_per_round < 0 || n_ood < 0)
    throw ConfigError("split counts must be non-negative");
  if (n_rounds > 0 && classes_per_round <= 0)
    throw ConfigError("classes_per_round must be positive when rounds are requested");
  int total = 0;
  for (const KGroup& g : k_groups) {
    if (g.size <= 0) throw ConfigError("k_groups entries need positive sizes");
    if (g.shots < 1 || g.shots > 5)
      throw ConfigError("k must lie in [1,5], got " + std::to_string(g.shots));
    total += g.size;
  }
  if (n_rounds > 0 && total != classes_per_round)
    throw ConfigError("k_groups sizes sum to " + std::to_string(total) + ", expected h = " +
                      std::to_string(classes_per_round));
  if (base_shots && *base_shots < 1) throw ConfigError("base_shots must be positive");
  if (test_cap_per_class && *test_cap_per_class < 1)
    throw ConfigError("test_cap_per_class must be positive");
}

std::vector<int> SplitConfig::shots_per_round_class() const {
  std::vector<int> shots;
  for (const KGroup& g : k_groups)
    for (int i = 0; i < g.size; ++i) shots.push_back(g.shots);
  return shots;
}

std::vector<std::string> SplitManifest::group_names() const {
  std::vector<std::string> names;
  if (!base.empty()) names.push_back("C_b");
  for (size_t i = 1; i <= rounds.size(); ++i) names.push_back("C_n^" + std::to_string(i));
  names.push_back("C_o");
  return names;
}

const ManifestCell* SplitManifest::find_cell(const std::string& class_id) const {
  for (const auto& c : base)
    if (c.class_id == class_id) return &c;
  for (const auto& round : rounds)
    for (const auto& c : round)
      if (c.class_id == class_id) return &c;
  for (const auto& c : ood)
    if (c.class_id == class_id) return &c;
  return nullptr;
}

namespace {

struct ClassPools {
  std::vector<std::string> train;
  std::vector<std::string> test;
};

// Train/test pools for one class: explicit tags are respected as-is;
// untagged corpora get a seeded 80/20 split.
ClassPools make_pools(const Corpus& corpus, const std::string& class_id, uint64_t seed) {
  ClassPools pools;
  std::vector<std::string> ids = corpus.example_ids_of_class(class_id);
  if (corpus.has_split_flags()) {
    for (const auto& id : ids) {
      if (corpus.example_by_id(id).split == SplitTag::kTrain)
        pools.train.push_back(id);
      else
        pools.test.push_back(id);
    }
  } else {
    SplitMix64 rng(derive_seed(seed, "pool/" + class_id));
    seeded_shuffle(ids, rng);
    const size_t n_train = (ids.size() * 4 + 4) / 5;  // ceil(0.8 n)
    pools.train.assign(ids.begin(), ids.begin() + static_cast<long>(n_train));
    pools.test.assign(ids.begin() + static_cast<long>(n_train), ids.end());
  }
  return pools;
}

std::vector<std::string> sample_ids(std::vector<std::string> pool, size_t n, uint64_t seed,
                                    const std::string& tag) {
  if (n >= pool.size()) return pool;
  SplitMix64 rng(derive_seed(seed, tag));
  seeded_shuffle(pool, rng);
  pool.resize(n);
  return pool;
}

ManifestCell make_cell(const Corpus& corpus, const SplitConfig& config,
                       const std::string& class_id, int train_shots /* <0 = all, 0 = none */) {
  const ClassPools pools = make_pools(corpus, class_id, config.seed);
  ManifestCell cell;
  cell.class_id = class_id;
  cell.label_name = corpus.class_by_id(class_id).label_name;
  if (train_shots > 0) {
    if (pools.train.size() < static_cast<size_t>(train_shots))
      throw DataError("class '" + class_id + "' has " + std::to_string(pools.train.size()) +
                      " train examples, need " + std::to_string(train_shots));
    cell.train_ids =
        sample_ids(pools.train, static_cast<size_t>(train_shots), config.seed, "train/" + class_id);
    cell.shots = train_shots;
  } else if (train_shots < 0) {
    cell.train_ids = pools.train;
  }
  cell.test_ids = pools.test;
  if (config.test_cap_per_class)
    cell.test_ids = sample_ids(std::move(cell.test_ids),
                               static_cast<size_t>(*config.test_cap_per_class), config.seed,
                               "test/" + class_id);
  if (cell.test_ids.empty()) throw DataError("class '" + class_id + "' has no test examples");
  return cell;
}

}  // namespace

SplitManifest build_split(const Corpus& corpus, const SplitConfig& config) {
  config.validate();
  const size_t needed = static_cast<size_t>(config.n_base) +
                        static_cast<size_t>(config.n_rounds) * config.classes_per_round +
                        static_cast<size_t>(config.n_ood);
  if (needed > corpus.classes().size())
    throw DataError("split needs " + std::to_string(needed) + " classes, corpus has " +
                    std::to_string(corpus.classes().size()));

  // One shuffle of the class list; cells consume it in order
  // base -> rounds -> ood.
  std::vector<std::string> order;
  order.reserve(corpus.classes().size());
  for (const ClassDef& c : corpus.classes()) order.push_back(c.class_id);
  SplitMix64 rng(derive_seed(config.seed, "classes"));
  seeded_shuffle(order, rng);

  SplitManifest manifest;
  manifest.config = config;
  size_t next = 0;

  const int base_cap = config.base_shots ? *config.base_shots : -1;
  for (int i = 0; i < config.n_base; ++i)
    manifest.base.push_back(make_cell(corpus, config, order[next++], base_cap));

  const std::vector<int> shots = config.shots_per_round_class();
  for (int r = 0; r < config.n_rounds; ++r) {
    std::vector<ManifestCell> round;
    for (int i = 0; i < config.classes_per_round; ++i)
      round.push_back(make_cell(corpus, config, order[next++], shots[i]));
    manifest.rounds.push_back(std::move(round));
  }

  for (int i = 0; i < config.n_ood; ++i)
    manifest.ood.push_back(make_cell(corpus, config, order[next++], 0));

  return manifest;
}

PhaseData base_view(const SplitManifest& manifest, const Corpus& corpus) {
  if (manifest.base.empty()) throw DataError("manifest has no base section");
  PhaseData data;
  data.phase = "base";
  data.round_index = 0;
  for (const ManifestCell& cell : manifest.base) {
    data.classes.push_back(ClassDef{cell.class_id, cell.label_name});
    for (const auto& id : cell.train_ids) data.train.push_back(corpus.example_by_id(id));
  }
  data.seen_labels = data.classes;
  return data;
}

PhaseData round_view(const SplitManifest& manifest, const Corpus& corpus, int round_index) {
  if (round_index < 1 || static_cast<size_t>(round_index) > manifest.rounds.size())
    throw DataError("round index " + std::to_string(round_index) + " out of range [1," +
                    std::to_string(manifest.rounds.size()) + "]");
  PhaseData data;
  data.phase = "round_" + std::to_string(round_index);
  data.round_index = round_index;
  for (const ManifestCell& cell : manifest.rounds[static_cast<size_t>(round_index) - 1]) {
    data.classes.push_back(ClassDef{cell.class_id, cell.label_name});
    data.shots[cell.class_id] = cell.shots;
    for (const auto& id : cell.train_ids) data.train.push_back(corpus.example_by_id(id));
  }
  for (const ManifestCell& cell : manifest.base)
    data.seen_labels.push_back(ClassDef{cell.class_id, cell.label_name});
  for (int r = 0; r < round_index; ++r)
    for (const ManifestCell& cell : manifest.rounds[static_cast<size_t>(r)])
      data.seen_labels.push_back(ClassDef{cell.class_id, cell.label_name});
  return data;
}

namespace {

json cell_to_json(const ManifestCell& cell) {
  return json{{"class_id", cell.class_id},
              {"label_name", cell.label_name},
              {"shots", cell.shots},
              {"train_ids", cell.train_ids},
              {"test_ids", cell.test_ids}};
}

ManifestCell cell_from_json(const json& j) {
  ManifestCell cell;
  cell.class_id = j.at("class_id").get<std::string>();
  cell.label_name = j.at("label_name").get<std::string>();
  cell.shots = j.at("shots").get<int>();
  cell.train_ids = j.at("train_ids").get<std::vector<std::string>>();
  cell.test_ids = j.at("test_ids").get<std::vector<std::string>>();
  return cell;
}

constexpr int kManifestVersion = 1;

}  // namespace

namespace detail {

json split_config_to_json(const SplitConfig& c) {
  json j{{"n_base", c.n_base},
         {"n_rounds", c.n_rounds},
         {"classes_per_round", c.classes_per_round},
         {"n_ood", c.n_ood},
         {"seed", c.seed},
         {"hybrid_compatible", c.hybrid_compatible}};
  json groups = json::array();
  for (const KGroup& g : c.k_groups) groups.push_back(json::array({g.size, g.shots}));
  j["k_groups"] = groups;
  j["base_shots"] = c.base_shots ? json(*c.base_shots) : json("all");
  if (c.test_cap_per_class) j["test_cap_per_class"] = *c.test_cap_per_class;
  return j;
}

SplitConfig split_config_from_json(const json& j) {
  SplitConfig c;
  try {
    c.n_base = j.value("n_base", 0);
    c.n_rounds = j.value("n_rounds", 0);
    c.classes_per_round = j.value("classes_per_round", 0);
    c.n_ood = j.value("n_ood", 0);
    c.seed = j.value("seed", uint64_t{0});
    c.hybrid_compatible = j.value("hybrid_compatible", true);
    if (j.contains("k_groups"))
      for (const auto& g : j.at("k_groups")) {
        if (!g.is_array() || g.size() != 2)
          throw ConfigError("k_groups entries must be [size, k]");
        c.k_groups.push_back(KGroup{g[0].get<int>(), g[1].get<int>()});
      }
    if (j.contains("base_shots") && !j.at("base_shots").is_string())
      c.base_shots = j.at("base_shots").get<int>();
    if (j.contains("test_cap_per_class") && !j.at("test_cap_per_class").is_null())
      c.test_cap_per_class = j.at("test_cap_per_class").get<int>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid split config: ") + e.what());
  }
  return c;
}

}  // namespace detail

SplitConfig load_split_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(path + ": invalid split config JSON: " + e.what());
  }
  return detail::split_config_from_json(j);
}

std::string manifest_to_string(const SplitManifest& manifest,
                               const std::map<std::string, std::string>& extra_meta) {
  json j;
  j["format_version"] = kManifestVersion;
  j["config"] = detail::split_config_to_json(manifest.config);
  j["seed"] = manifest.config.seed;
  j["base"] = json::array();
  for (const auto& c : manifest.base) j["base"].push_back(cell_to_json(c));
  j["rounds"] = json::array();
  for (const auto& round : manifest.rounds) {
    json r = json::array();
    for (const auto& c : round) r.push_back(cell_to_json(c));
    j["rounds"].push_back(std::move(r));
  }
  j["ood"] = json::array();
  for (const auto& c : manifest.ood) j["ood"].push_back(cell_to_json(c));
  if (!extra_meta.empty()) j["meta"] = extra_meta;
  return j.dump(2) + "\n";
}

void write_manifest(const SplitManifest& manifest, const std::string& path,
                    const std::map<std::string, std::string>& extra_meta) {
  write_text_file(path, manifest_to_string(manifest, extra_meta));
}

SplitManifest load_manifest(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw DataError(path + ": invalid manifest JSON: " + e.what());
  }
  try {
    if (j.at("format_version").get<int>() != kManifestVersion)
      throw DataError(path + ": unsupported manifest format_version");
    SplitManifest manifest;
    manifest.config = detail::split_config_from_json(j.at("config"));
    for (const auto& c : j.at("base")) manifest.base.push_back(cell_from_json(c));
    for (const auto& round : j.at("rounds")) {
      std::vector<ManifestCell> cells;
      for (const auto& c : round) cells.push_back(cell_from_json(c));
      manifest.rounds.push_back(std::move(cells));
    }
    for (const auto& c : j.at("ood")) {
      ManifestCell cell = cell_from_json(c);
      if (!cell.train_ids.empty())
        throw DataError(path + ": ood class '" + cell.class_id + "' carries train ids");
      manifest.ood.push_back(std::move(cell));
    }
    return manifest;
  } catch (const json::exception& e) {
    throw DataError(path + ": invalid manifest: " + e.what());
  }
}

}  // namespace ifsc
