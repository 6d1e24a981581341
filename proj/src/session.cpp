#include "ifsc/session.hpp"

#include <algorithm>
#include <filesystem>

#include <json.hpp>

#include "ifsc/errors.hpp"
#include "ifsc/io.hpp"
#include "ifsc/log.hpp"

namespace ifsc {

using nlohmann::json;

void LabelRegistry::append(RegistryEntry entry) {
  if (index_.count(entry.class_id))
    throw DataError("registry already contains class '" + entry.class_id + "'");
  index_[entry.class_id] = entries_.size();
  entries_.push_back(std::move(entry));
}

bool LabelRegistry::contains(const std::string& class_id) const {
  return index_.count(class_id) > 0;
}

size_t LabelRegistry::position(const std::string& class_id) const {
  auto it = index_.find(class_id);
  if (it == index_.end()) throw DataError("class '" + class_id + "' not in registry");
  return it->second;
}

Session::Session(SplitManifest manifest, std::shared_ptr<EntailmentScorer> scorer,
                 SessionOptions options, const std::string& pretrained_path)
    : manifest_(std::move(manifest)), scorer_(std::move(scorer)), options_(std::move(options)) {
  if (!scorer_) throw ConfigError("session needs a scorer");
  if (options_.mode == PairMode::kHybrid && !manifest_.config.hybrid_compatible)
    throw ConfigError(
        "hybrid mode is not applicable to this corpus: label names cannot act as "
        "hypotheses alongside example pairs");

  for (const ManifestCell& cell : manifest_.base)
    registry_.append(RegistryEntry{cell.class_id, cell.label_name, "base"});

  for (const ManifestCell& cell : manifest_.base)
    phase_train_ids_["base"].insert(cell.train_ids.begin(), cell.train_ids.end());
  for (size_t r = 0; r < manifest_.rounds.size(); ++r) {
    auto& ids = phase_train_ids_["round_" + std::to_string(r + 1)];
    for (const ManifestCell& cell : manifest_.rounds[r])
      ids.insert(cell.train_ids.begin(), cell.train_ids.end());
  }

  if (!pretrained_path.empty()) scorer_->load(pretrained_path);
}

void Session::validate_payload(const PhaseData& phase, const std::set<std::string>& allowed_ids) {
  for (const Example& ex : phase.train) {
    if (allowed_ids.count(ex.id)) continue;
    // Name the offending phase when the id belongs to one; either way the
    // payload is rejected, not filtered.
    for (const auto& [other, ids] : phase_train_ids_) {
      if (other != phase.phase && ids.count(ex.id))
        throw DataError("access violation: example '" + ex.id + "' belongs to phase '" + other +
                        "', not '" + phase.phase + "'");
    }
    throw DataError("example '" + ex.id + "' is not part of phase '" + phase.phase + "'");
  }
}

void Session::train_phase(const PhaseData& phase, const TrainSpec& spec) {
  PairBundle bundle = PairBundle::from_phase(phase);
  if (options_.seen_label_negatives) {
    std::set<std::string> own;
    for (const ClassDef& cls : phase.classes) own.insert(cls.class_id);
    for (const RegistryEntry& entry : registry_.entries())
      if (!own.count(entry.class_id))
        bundle.extra_negative_labels.push_back(ClassDef{entry.class_id, entry.label_name});
  }
  const PairSet pairs = gen_pairs(options_.mode, bundle);

  std::string pairs_path;
  if (!options_.work_dir.empty() || scorer_->fit_needs_pairs_file()) {
    std::filesystem::path dir = options_.work_dir.empty()
                                    ? std::filesystem::temp_directory_path()
                                    : std::filesystem::path(options_.work_dir);
    std::filesystem::create_directories(dir);
    pairs_path = (dir / ("pairs_" + phase.phase + ".jsonl")).string();
    write_pairs_jsonl(pairs, pairs_path);
  }

  log_info("phase " + phase.phase + ": " + std::to_string(pairs.n_positive) + " positive / " +
           std::to_string(pairs.n_negative) + " negative pairs");
  scorer_->fit(pairs, pairs_path, spec, TrainPhase::kFinetune);

  PhaseRecord record;
  record.phase = phase.phase;
  for (const ClassDef& cls : phase.classes) record.class_ids.push_back(cls.class_id);
  for (const Example& ex : phase.train) record.example_ids.push_back(ex.id);
  std::sort(record.example_ids.begin(), record.example_ids.end());
  record.n_positive = pairs.n_positive;
  record.n_negative = pairs.n_negative;
  if (auto* builtin = dynamic_cast<BuiltinScorer*>(scorer_.get())) {
    const auto& log = builtin->model().train_log;
    size_t start = log.size() >= static_cast<size_t>(std::max(spec.epochs, 0))
                       ? log.size() - static_cast<size_t>(spec.epochs)
                       : 0;
    for (size_t i = start; i < log.size(); ++i) record.losses.push_back(log[i].mean_loss);
  }
  audit_log_.push_back(std::move(record));
}

void Session::train_base(const PhaseData& base) {
  if (manifest_.base.empty()) throw DataError("manifest has no base classes");
  if (base_trained_) throw DataError("base phase already trained");
  if (rounds_completed_ > 0) throw DataError("base phase must precede all rounds");
  if (base.phase != "base") throw DataError("expected base phase data, got '" + base.phase + "'");
  validate_payload(base, phase_train_ids_.at("base"));
  train_phase(base, options_.base_spec);
  base_trained_ = true;
}

void Session::advance_round(const PhaseData& round) {
  const int expected = rounds_completed_ + 1;
  if (round.round_index != expected)
    throw DataError("rounds must be consumed in order: expected round " +
                    std::to_string(expected) + ", got " + std::to_string(round.round_index));
  if (static_cast<size_t>(round.round_index) > manifest_.rounds.size())
    throw DataError("round " + std::to_string(round.round_index) + " exceeds manifest rounds");

  const auto& manifest_round = manifest_.rounds[static_cast<size_t>(round.round_index) - 1];
  std::set<std::string> expected_classes;
  for (const ManifestCell& cell : manifest_round) expected_classes.insert(cell.class_id);
  for (const ClassDef& cls : round.classes)
    if (!expected_classes.count(cls.class_id))
      throw DataError("class '" + cls.class_id + "' is not part of round " +
                      std::to_string(round.round_index));

  validate_payload(round, phase_train_ids_.at(round.phase));

  for (const ClassDef& cls : round.classes)
    registry_.append(RegistryEntry{cls.class_id, cls.label_name, round.phase});

  train_phase(round, options_.round_spec);
  rounds_completed_ = round.round_index;
}

SessionSnapshot Session::snapshot(const std::string& checkpoint_hint) {
  SessionSnapshot snap;
  snap.registry = registry_;
  snap.scorer = scorer_->snapshot(checkpoint_hint);
  if (rounds_completed_ > 0)
    snap.phase = "round_" + std::to_string(rounds_completed_);
  else
    snap.phase = base_trained_ ? "base" : "initial";
  return snap;
}

void Session::write_journal(const std::string& path) const {
  std::string out;
  json meta{{"mode", to_string(options_.mode)}, {"scorer", scorer_->backend()}};
  for (const auto& [k, v] : options_.journal_meta) meta[k] = v;
  out += json{{"meta", meta}}.dump();
  out += '\n';
  for (const PhaseRecord& rec : audit_log_) {
    json j{{"phase", rec.phase},
           {"classes", rec.class_ids},
           {"example_ids", rec.example_ids},
           {"pairs", json{{"positive", rec.n_positive}, {"negative", rec.n_negative}}},
           {"loss", rec.losses}};
    out += j.dump();
    out += '\n';
  }
  write_text_file(path, out);
}

bool audit_is_disjoint(const std::vector<PhaseRecord>& records) {
  std::map<std::string, std::string> seen;  // example id -> phase
  for (const PhaseRecord& rec : records) {
    for (const std::string& id : rec.example_ids) {
      auto [it, inserted] = seen.emplace(id, rec.phase);
      if (!inserted && it->second != rec.phase) return false;
    }
  }
  return true;
}

void verify_journal_file(const std::string& path) {
  const auto lines = split_lines(read_text_file(path));
  std::map<std::string, std::string> seen;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    json j;
    try {
      j = json::parse(lines[i]);
    } catch (const json::exception& e) {
      throw DataError(path + ": bad journal line " + std::to_string(i + 1) + ": " + e.what());
    }
    if (j.contains("meta")) continue;
    const std::string phase = j.at("phase").get<std::string>();
    for (const auto& id_json : j.at("example_ids")) {
      const std::string id = id_json.get<std::string>();
      auto [it, inserted] = seen.emplace(id, phase);
      if (!inserted && it->second != phase)
        throw DataError(path + ": example '" + id + "' was trained in both '" + it->second +
                        "' and '" + phase + "'");
    }
  }
}

}  // namespace ifsc
