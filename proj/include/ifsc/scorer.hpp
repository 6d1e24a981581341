#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ifsc/pairgen.hpp"

namespace ifsc {

// Hashed char-n-gram feature space for the built-in scorer.
struct FeatureConfig {
  std::vector<int> n_gram_sizes{3, 4};
  uint32_t hash_dim = 1u << 18;  // power of two
  bool use_cross_features = true;

  void validate() const;  // throws ConfigError
  bool operator==(const FeatureConfig&) const = default;
};

// Sparse feature vector: unique indices in ascending order, values scaled
// to unit L2 norm (empty input yields the empty vector).
using SparseVec = std::vector<std::pair<uint32_t, double>>;

// Deterministic featurization: premise grams, hypothesis grams (disjoint
// hash namespaces) and, when enabled, premise-gram x hypothesis-gram cross
// features. Collisions are accepted silently.
SparseVec featurize(std::string_view premise, std::string_view hypothesis,
                    const FeatureConfig& cfg);

enum class TrainPhase { kPretrain, kFinetune };

std::string to_string(TrainPhase phase);
TrainPhase train_phase_from_string(const std::string& s);

struct TrainLogEntry {
  TrainPhase phase = TrainPhase::kFinetune;
  int epoch = 0;
  double mean_loss = 0.0;
};

// Linear logistic model over the hashed feature space.
struct EntailModel {
  FeatureConfig feature_config;
  std::vector<double> weights;  // |weights| = hash_dim, all finite
  double bias = 0.0;
  std::vector<TrainLogEntry> train_log;
  std::map<std::string, std::string> meta;  // provenance tags, round-tripped by save/load

  static EntailModel fresh(const FeatureConfig& cfg = FeatureConfig{});
};

struct TrainSpec {
  double learning_rate = 0.1;
  int batch_size = 16;
  int epochs = 5;
  uint64_t shuffle_seed = 0;
  double l2 = 0.0;

  void validate() const;  // throws ConfigError
};

// Built-in defaults: 20 pretraining epochs, 5 fine-tuning epochs.
TrainSpec default_pretrain_spec();
TrainSpec default_finetune_spec();

// Entailment probability logistic(w . phi + bias). Throws DataError when
// the model holds non-finite parameters; never returns NaN.
double score(const EntailModel& model, std::string_view premise, std::string_view hypothesis);
double score_features(const EntailModel& model, const SparseVec& features);

// Minibatch SGD on binary cross-entropy with a per-epoch seeded shuffle.
// Returns the updated copy; the input model is the starting point, so
// pretraining then fine-tuning composes by chaining calls. Appends one
// train_log entry per epoch. Throws TrainError naming the epoch if the
// loss goes non-finite.
EntailModel fit(EntailModel model, const PairSet& pairs, const TrainSpec& spec, TrainPhase phase);

// Checkpoint format: one JSON header line (format version, feature config,
// train log, meta) followed by little-endian binary doubles (bias, then
// weights). Round-trips bit-exactly.
void save_model(const EntailModel& model, const std::string& path);
EntailModel load_model(const std::string& path);

// Reads a pair JSONL file, additionally accepting 3-class NLI labels:
// "entailment" maps to positive, "neutral" and "contradiction" to negative.
PairSet import_nli_pairs(const std::string& path);

}  // namespace ifsc
