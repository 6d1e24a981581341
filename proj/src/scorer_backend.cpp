#include "ifsc/scorer_backend.hpp"

#include "ifsc/errors.hpp"
#include "ifsc/external_scorer.hpp"

namespace ifsc {

std::vector<double> EntailmentScorer::score_batch(
    const std::vector<std::pair<std::string, std::string>>& pairs) {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& [premise, hypothesis] : pairs) out.push_back(score(premise, hypothesis));
  return out;
}

double BuiltinScorer::score(const std::string& premise, const std::string& hypothesis) {
  return ifsc::score(model_, premise, hypothesis);
}

void BuiltinScorer::fit(const PairSet& pairs, const std::string& /*pairs_path*/,
                        const TrainSpec& spec, TrainPhase phase) {
  model_ = ifsc::fit(std::move(model_), pairs, spec, phase);
}

void BuiltinScorer::save(const std::string& path) { save_model(model_, path); }

void BuiltinScorer::load(const std::string& path) { model_ = load_model(path); }

std::shared_ptr<EntailmentScorer> BuiltinScorer::snapshot(const std::string& checkpoint_hint) {
  if (!checkpoint_hint.empty()) save_model(model_, checkpoint_hint);
  return std::make_shared<BuiltinScorer>(model_);
}

std::shared_ptr<EntailmentScorer> make_scorer(const std::string& spec) {
  if (spec == "builtin") return std::make_shared<BuiltinScorer>();
  constexpr std::string_view prefix = "external:";
  if (spec.rfind(prefix, 0) == 0) {
    const std::string command = spec.substr(prefix.size());
    if (command.empty()) throw ConfigError("external scorer needs a command: external:<cmd>");
    return std::make_shared<ExternalScorer>(command);
  }
  throw ConfigError("unknown scorer backend '" + spec + "' (expected builtin or external:<cmd>)");
}

}  // namespace ifsc
