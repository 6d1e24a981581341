#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ifsc/errors.hpp"
#include "ifsc/experiment.hpp"
#include "ifsc/external_scorer.hpp"
#include "ifsc/io.hpp"
#include "ifsc/log.hpp"
#include "ifsc/metrics.hpp"
#include "ifsc/scorer_backend.hpp"
#include "ifsc/session.hpp"

namespace {

using namespace ifsc;

struct SplitArgs {
  std::string corpus, labels, config, out;
  std::optional<uint64_t> seed;
};

int cmd_split(const SplitArgs& args) {
  SplitConfig config = load_split_config(args.config);
  if (args.seed) config.seed = *args.seed;
  const Corpus corpus = load_corpus(args.corpus, args.labels);
  const SplitManifest manifest = build_split(corpus, config);
  write_manifest(manifest, args.out);

  if (manifest.base.empty()) {
    std::printf("base: none\n");
  } else {
    size_t shots = 0;
    for (const ManifestCell& c : manifest.base) shots += c.train_ids.size();
    std::printf("base: %zu classes, %zu shots\n", manifest.base.size(), shots);
  }
  if (!manifest.rounds.empty()) {
    size_t shots = 0;
    for (const ManifestCell& c : manifest.rounds.front()) shots += c.train_ids.size();
    std::printf("rounds: %zu × %zu classes, %zu shots\n", manifest.rounds.size(),
                manifest.rounds.front().size(), shots);
  }
  size_t ood_test = 0;
  for (const ManifestCell& c : manifest.ood) ood_test += c.test_ids.size();
  std::printf("ood: %zu classes, %zu test examples\n", manifest.ood.size(), ood_test);
  std::printf("wrote %s\n", args.out.c_str());
  return kExitOk;
}

struct PretrainArgs {
  std::string pairs, out, scorer = "builtin", curve;
  TrainSpec spec = default_pretrain_spec();
};

int cmd_pretrain(const PretrainArgs& args) {
  args.spec.validate();
  const PairSet pairs = import_nli_pairs(args.pairs);
  log_info("pretraining on " + std::to_string(pairs.pairs.size()) + " pairs (" +
           std::to_string(pairs.n_positive) + " positive)");

  auto scorer = make_scorer(args.scorer);
  scorer->fit(pairs, args.pairs, args.spec, TrainPhase::kPretrain);
  if (auto* builtin = dynamic_cast<BuiltinScorer*>(scorer.get())) {
    builtin->model().meta["pretrain_pairs"] = args.pairs;
    builtin->model().meta["pretrain_epochs"] = std::to_string(args.spec.epochs);
  }
  scorer->save(args.out);

  const std::string curve_path = args.curve.empty() ? args.out + ".loss.csv" : args.curve;
  std::string csv = "epoch,loss\n";
  if (auto* builtin = dynamic_cast<BuiltinScorer*>(scorer.get())) {
    const auto& log = builtin->model().train_log;
    const size_t start = log.size() - static_cast<size_t>(args.spec.epochs);
    for (size_t i = start; i < log.size(); ++i) {
      char line[64];
      std::snprintf(line, sizeof(line), "%d,%.17g\n", log[i].epoch, log[i].mean_loss);
      csv += line;
    }
  }
  write_text_file(curve_path, csv);
  std::printf("wrote %s and %s\n", args.out.c_str(), curve_path.c_str());
  return kExitOk;
}

struct RunArgs {
  std::string config, mode, scorer, out;
  std::vector<uint64_t> seeds;
  std::optional<double> threshold;
};

int cmd_run(const RunArgs& args) {
  RunConfig config = run_config_from_file(args.config);
  if (!args.seeds.empty()) config.seeds = args.seeds;
  if (!args.mode.empty()) config.mode = pair_mode_from_string(args.mode);
  if (!args.scorer.empty()) config.scorer_spec = args.scorer;
  if (args.threshold) config.threshold = *args.threshold;
  if (!args.out.empty()) config.out_dir = args.out;

  const EvalReport report = run_experiment(config);
  std::fputs(render_report(report, ReportFormat::kMarkdown).c_str(), stdout);
  std::printf("\nwrote %s/report.json\n", config.out_dir.c_str());
  return kExitOk;
}

struct ReportArgs {
  std::string report;
  std::vector<std::string> drop_groups;
  std::string format = "markdown";
};

int cmd_report(const ReportArgs& args) {
  const EvalReport report = load_report(args.report);
  if (args.format == "json")
    std::fputs(render_report(report, ReportFormat::kJson).c_str(), stdout);
  else
    std::fputs(render_report(report, ReportFormat::kMarkdown).c_str(), stdout);

  if (!args.drop_groups.empty()) {
    std::printf("\n| group | drop rate |\n|---|---|\n");
    for (const std::string& group : args.drop_groups) {
      const double d = drop_rate(report_column(report, group));
      std::printf("| %s | %.4f |\n", group.c_str(), d);
    }
  }
  return kExitOk;
}

void add_train_spec_flags(CLI::App* cmd, TrainSpec& spec) {
  cmd->add_option("--epochs", spec.epochs, "training epochs");
  cmd->add_option("--lr", spec.learning_rate, "learning rate");
  cmd->add_option("--batch", spec.batch_size, "batch size");
  cmd->add_option("--l2", spec.l2, "L2 penalty");
  cmd->add_option("--shuffle-seed", spec.shuffle_seed, "shuffle seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"incremental few-shot text classification via textual entailment"};
  app.require_subcommand(1);

  SplitArgs split_args;
  auto* split = app.add_subcommand("split", "build an incremental split manifest from a corpus");
  split->add_option("--corpus", split_args.corpus, "corpus JSONL")->required();
  split->add_option("--labels", split_args.labels, "label-name sidecar JSONL");
  split->add_option("--config", split_args.config, "split config JSON")->required();
  split->add_option("--seed", split_args.seed, "override the config seed");
  split->add_option("--out", split_args.out, "manifest output path")->required();

  PretrainArgs pretrain_args;
  auto* pretrain = app.add_subcommand("pretrain", "pretrain a scorer on an entailment pair file");
  pretrain->add_option("--pairs", pretrain_args.pairs, "pair JSONL (binary or 3-class NLI labels)")
      ->required();
  pretrain->add_option("--out", pretrain_args.out, "checkpoint output path")->required();
  pretrain->add_option("--scorer", pretrain_args.scorer, "builtin or external:<cmd>");
  pretrain->add_option("--curve", pretrain_args.curve, "loss curve CSV path");
  add_train_spec_flags(pretrain, pretrain_args.spec);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "run the full incremental experiment");
  run->add_option("--config", run_args.config, "run config JSON")->required();
  run->add_option("--seed", run_args.seeds, "override config seeds (repeatable)");
  run->add_option("--mode", run_args.mode, "entail|dnnc|hybrid");
  run->add_option("--scorer", run_args.scorer, "builtin or external:<cmd>");
  run->add_option("--threshold", run_args.threshold, "rejection threshold (default 0.5)");
  run->add_option("--out", run_args.out, "output directory");

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "render a report and drop-rate tables");
  report->add_option("--report", report_args.report, "report.json path")->required();
  report->add_option("--drop-rate", report_args.drop_groups,
                     "group column to compute the drop rate for (repeatable)");
  report->add_option("--format", report_args.format, "markdown|json")
      ->check(CLI::IsMember({"markdown", "json"}));

  try {
    app.parse(argc, argv);
    if (split->parsed()) return cmd_split(split_args);
    if (pretrain->parsed()) return cmd_pretrain(pretrain_args);
    if (run->parsed()) return cmd_run(run_args);
    if (report->parsed()) return cmd_report(report_args);
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  } catch (const ifsc::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
}
