#include "ifsc/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

#include <json.hpp>

#include "ifsc/errors.hpp"
#include "ifsc/io.hpp"
#include "ifsc/log.hpp"
#include "ifsc/rng.hpp"
#include "ifsc/session.hpp"
#include "json_util.hpp"

namespace ifsc {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

TrainSpec train_spec_from_json(const json& j, const TrainSpec& defaults) {
  TrainSpec spec = defaults;
  spec.learning_rate = j.value("learning_rate", spec.learning_rate);
  spec.batch_size = j.value("batch_size", spec.batch_size);
  spec.epochs = j.value("epochs", spec.epochs);
  spec.shuffle_seed = j.value("shuffle_seed", spec.shuffle_seed);
  spec.l2 = j.value("l2", spec.l2);
  spec.validate();
  return spec;
}

json train_spec_to_json(const TrainSpec& spec) {
  return json{{"learning_rate", spec.learning_rate},
              {"batch_size", spec.batch_size},
              {"epochs", spec.epochs},
              {"shuffle_seed", spec.shuffle_seed},
              {"l2", spec.l2}};
}


}  // namespace

void RunConfig::validate() const {
  if (corpus_path.empty()) throw ConfigError("run config needs a corpus path");
  if (manifest_path.empty() && !split) throw ConfigError("run config needs a split or a manifest");
  if (seeds.empty()) throw ConfigError("run config needs at least one seed");
  if (out_dir.empty()) throw ConfigError("run config needs an output directory");
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ConfigError("threshold must be in [0,1]");
  if (split) split->validate();
  base_spec.validate();
  round_spec.validate();
}

RunConfig run_config_from_file(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(path + ": invalid config JSON: " + e.what());
  }
  try {
    RunConfig config;
    config.corpus_path = j.value("corpus", "");
    config.labels_path = j.value("labels", "");
    config.manifest_path = j.value("manifest", "");
    if (j.contains("split")) config.split = detail::split_config_from_json(j.at("split"));
    config.mode = pair_mode_from_string(j.value("mode", "entail"));
    config.scorer_spec = j.value("scorer", "builtin");
    config.pretrained_path = j.value("pretrained", "");
    config.threshold = j.value("threshold", 0.5);
    if (j.contains("seeds")) config.seeds = j.at("seeds").get<std::vector<uint64_t>>();
    config.base_spec = default_finetune_spec();
    config.round_spec = default_finetune_spec();
    if (j.contains("train")) {
      const json& t = j.at("train");
      if (t.contains("base")) config.base_spec = train_spec_from_json(t.at("base"), config.base_spec);
      if (t.contains("round"))
        config.round_spec = train_spec_from_json(t.at("round"), config.round_spec);
    }
    config.seen_label_negatives = j.value("seen_label_negatives", false);
    config.out_dir = j.value("out", "");
    return config;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": invalid config: " + e.what());
  }
}

std::string run_config_to_json(const RunConfig& config) {
  json j{{"corpus", config.corpus_path},
         {"labels", config.labels_path},
         {"manifest", config.manifest_path},
         {"mode", to_string(config.mode)},
         {"scorer", config.scorer_spec},
         {"pretrained", config.pretrained_path},
         {"threshold", config.threshold},
         {"seeds", config.seeds},
         {"train", json{{"base", train_spec_to_json(config.base_spec)},
                        {"round", train_spec_to_json(config.round_spec)}}},
         {"seen_label_negatives", config.seen_label_negatives},
         {"out", config.out_dir}};
  if (config.split) j["split"] = detail::split_config_to_json(*config.split);
  return j.dump();
}

std::string run_config_hash(const RunConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(run_config_to_json(config))));
  return buf;
}

namespace {

struct GroupSlices {
  // group name -> class ids; test examples resolved per group
  std::vector<std::pair<std::string, std::set<std::string>>> groups;
  std::set<std::string> ood_classes;
};

std::set<std::string> cell_classes(const std::vector<ManifestCell>& cells) {
  std::set<std::string> ids;
  for (const ManifestCell& c : cells) ids.insert(c.class_id);
  return ids;
}

std::vector<PredRecord> evaluate_slice(const SplitManifest& manifest, const Corpus& corpus,
                                       const SessionSnapshot& snapshot, PairMode mode,
                                       double threshold,
                                       const std::vector<Example>& dnnc_support,
                                       const std::vector<const ManifestCell*>& cells) {
  std::vector<PredRecord> records;
  for (const ManifestCell* cell : cells) {
    for (const std::string& id : cell->test_ids) {
      const Example& ex = corpus.example_by_id(id);
      Prediction pred;
      if (mode == PairMode::kDnnc)
        pred = dnnc_predict(snapshot, ex.text, dnnc_support, threshold);
      else
        pred = entail_predict(snapshot, ex.text, threshold);
      PredRecord rec;
      rec.id = ex.id;
      rec.gold = cell->class_id;
      rec.pred = pred.predicted;
      rec.rule = pred.rule;
      rec.scores = std::move(pred.scores);
      records.push_back(std::move(rec));
    }
  }
  return records;
}

}  // namespace

EvalReport run_experiment(const RunConfig& config) {
  config.validate();
  const std::string hash = run_config_hash(config);
  const Corpus corpus = load_corpus(config.corpus_path, config.labels_path);
  fs::create_directories(config.out_dir);

  // Row phase name -> group -> per-seed values, assembled across seeds.
  std::vector<std::string> row_order;
  std::map<std::string, std::map<std::string, EvalCell>> cells;
  std::vector<std::string> group_names;

  for (const uint64_t seed : config.seeds) {
    SplitManifest manifest;
    if (!config.manifest_path.empty()) {
      manifest = load_manifest(config.manifest_path);
    } else {
      SplitConfig split = *config.split;
      split.seed = seed;
      manifest = build_split(corpus, split);
    }
    group_names = manifest.group_names();

    const fs::path seed_dir = fs::path(config.out_dir) / ("seed_" + std::to_string(seed));
    fs::create_directories(seed_dir);
    const std::map<std::string, std::string> meta{{"config_hash", hash},
                                                  {"seed", std::to_string(seed)}};
    write_manifest(manifest, (seed_dir / "manifest.json").string(), meta);

    auto scorer = make_scorer(config.scorer_spec);
    SessionOptions options;
    options.mode = config.mode;
    options.seen_label_negatives = config.seen_label_negatives;
    options.work_dir = seed_dir.string();
    options.base_spec = config.base_spec;
    options.round_spec = config.round_spec;
    // shuffle_seed 0 means "derive from the run seed", so multi-seed runs
    // actually differ; an explicit value wins.
    if (options.base_spec.shuffle_seed == 0)
      options.base_spec.shuffle_seed = derive_seed(seed, "train/base");
    if (options.round_spec.shuffle_seed == 0)
      options.round_spec.shuffle_seed = derive_seed(seed, "train/round");
    options.journal_meta = meta;

    Session session(manifest, scorer, options, config.pretrained_path);

    const std::set<std::string> ood_classes = cell_classes(manifest.ood);
    std::vector<Example> support;  // grows phase by phase (dnnc inference)
    std::vector<std::pair<std::string, std::set<std::string>>> seen_groups;
    std::vector<const ManifestCell*> seen_cells;

    auto run_phase = [&](const std::string& row_name, const PhaseData& phase,
                         const std::vector<ManifestCell>& phase_cells) {
      if (phase.round_index == 0)
        session.train_base(phase);
      else
        session.advance_round(phase);

      for (const Example& ex : phase.train) support.push_back(ex);
      seen_groups.emplace_back(row_name, cell_classes(phase_cells));
      for (const ManifestCell& cell : phase_cells) seen_cells.push_back(&cell);
      std::vector<const ManifestCell*> eval_cells = seen_cells;
      for (const ManifestCell& cell : manifest.ood) eval_cells.push_back(&cell);

      SessionSnapshot snapshot =
          session.snapshot((seed_dir / ("snapshot_" + phase.phase + ".bin")).string());
      const std::vector<PredRecord> records =
          evaluate_slice(manifest, corpus, snapshot, config.mode, config.threshold, support,
                         eval_cells);
      auto phase_meta = meta;
      phase_meta["phase"] = phase.phase;
      write_predictions(records, (seed_dir / ("predictions_" + phase.phase + ".jsonl")).string(),
                        phase_meta);

      if (std::find(row_order.begin(), row_order.end(), row_name) == row_order.end())
        row_order.push_back(row_name);
      for (const auto& [group, classes] : seen_groups)
        cells[row_name][group].values.push_back(group_accuracy(records, classes));
      cells[row_name]["C_o"].values.push_back(ood_f1(records, ood_classes));
      log_info("seed " + std::to_string(seed) + " " + phase.phase + " evaluated (" +
               std::to_string(records.size()) + " test examples)");
    };

    try {
      if (!manifest.base.empty()) run_phase("C_b", base_view(manifest, corpus), manifest.base);
      for (size_t i = 1; i <= manifest.rounds.size(); ++i)
        run_phase("C_n^" + std::to_string(i),
                  round_view(manifest, corpus, static_cast<int>(i)), manifest.rounds[i - 1]);
    } catch (...) {
      session.write_journal((seed_dir / "journal.jsonl").string());
      throw;
    }

    session.write_journal((seed_dir / "journal.jsonl").string());
    verify_journal_file((seed_dir / "journal.jsonl").string());
  }

  EvalReport report;
  report.groups = group_names;
  report.metadata["config_hash"] = hash;
  report.metadata["mode"] = to_string(config.mode);
  report.metadata["scorer"] = config.scorer_spec;
  {
    std::string s;
    for (uint64_t seed : config.seeds) s += (s.empty() ? "" : ",") + std::to_string(seed);
    report.metadata["seeds"] = s;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", config.threshold);
  report.metadata["threshold"] = buf;
  for (const std::string& row_name : row_order)
    report.rows.push_back(EvalReport::Row{row_name, cells[row_name]});

  write_report(report, (fs::path(config.out_dir) / "report.json").string());
  write_text_file((fs::path(config.out_dir) / "report.md").string(),
                  render_report(report, ReportFormat::kMarkdown));
  return report;
}

}  // namespace ifsc
