#include "ifsc/scorer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>

#include <json.hpp>

#include "ifsc/errors.hpp"
#include "ifsc/io.hpp"
#include "ifsc/rng.hpp"

namespace ifsc {

using nlohmann::json;

void FeatureConfig::validate() const {
  if (n_gram_sizes.empty()) throw ConfigError("n_gram_sizes must be non-empty");
  for (int n : n_gram_sizes)
    if (n < 1) throw ConfigError("n-gram sizes must be positive");
  if (hash_dim < 2 || (hash_dim & (hash_dim - 1)) != 0)
    throw ConfigError("hash_dim must be a power of two >= 2");
}

namespace {

// Disjoint hash namespaces for the three feature families.
constexpr std::string_view kPremiseSalt = "P\x1f";
constexpr std::string_view kHypothesisSalt = "H\x1f";
constexpr std::string_view kCrossSalt = "X\x1f";
constexpr std::string_view kJoin = "\x1f";

uint32_t bucket(uint64_t h, uint32_t hash_dim) {
  return static_cast<uint32_t>(h & (hash_dim - 1));
}

std::map<std::string, int> gram_counts(std::string_view text, const std::vector<int>& sizes) {
  std::map<std::string, int> counts;
  for (int n : sizes) {
    if (text.size() < static_cast<size_t>(n)) continue;
    for (size_t i = 0; i + static_cast<size_t>(n) <= text.size(); ++i)
      counts[std::string(text.substr(i, static_cast<size_t>(n)))] += 1;
  }
  return counts;
}

double stable_sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Binary cross-entropy from the logit, without forming exp overflow.
double bce_from_logit(double z, double y) {
  return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
}

}  // namespace

SparseVec featurize(std::string_view premise, std::string_view hypothesis,
                    const FeatureConfig& cfg) {
  cfg.validate();
  const auto premise_grams = gram_counts(premise, cfg.n_gram_sizes);
  const auto hypothesis_grams = gram_counts(hypothesis, cfg.n_gram_sizes);

  std::map<uint32_t, double> acc;
  for (const auto& [gram, count] : premise_grams)
    acc[bucket(fnv1a64(gram, fnv1a64(kPremiseSalt)), cfg.hash_dim)] += count;
  for (const auto& [gram, count] : hypothesis_grams)
    acc[bucket(fnv1a64(gram, fnv1a64(kHypothesisSalt)), cfg.hash_dim)] += count;
  if (cfg.use_cross_features) {
    for (const auto& [pg, pc] : premise_grams) {
      const uint64_t prefix = fnv1a64(kJoin, fnv1a64(pg, fnv1a64(kCrossSalt)));
      for (const auto& [hg, hc] : hypothesis_grams)
        acc[bucket(fnv1a64(hg, prefix), cfg.hash_dim)] += static_cast<double>(pc) * hc;
    }
  }

  double norm_sq = 0.0;
  for (const auto& [idx, v] : acc) norm_sq += v * v;
  SparseVec out;
  out.reserve(acc.size());
  if (norm_sq > 0.0) {
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (const auto& [idx, v] : acc) out.emplace_back(idx, v * inv);
  }
  return out;
}

std::string to_string(TrainPhase phase) {
  return phase == TrainPhase::kPretrain ? "pretrain" : "finetune";
}

TrainPhase train_phase_from_string(const std::string& s) {
  if (s == "pretrain") return TrainPhase::kPretrain;
  if (s == "finetune") return TrainPhase::kFinetune;
  throw ConfigError("unknown train phase '" + s + "'");
}

EntailModel EntailModel::fresh(const FeatureConfig& cfg) {
  cfg.validate();
  EntailModel model;
  model.feature_config = cfg;
  model.weights.assign(cfg.hash_dim, 0.0);
  model.bias = 0.0;
  return model;
}

void TrainSpec::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (batch_size < 1) throw ConfigError("batch_size must be positive");
  if (epochs < 0) throw ConfigError("epochs must be non-negative");
  if (l2 < 0.0) throw ConfigError("l2 must be non-negative");
}

TrainSpec default_pretrain_spec() {
  TrainSpec spec;
  spec.epochs = 20;
  return spec;
}

TrainSpec default_finetune_spec() {
  TrainSpec spec;
  spec.epochs = 5;
  return spec;
}

double score_features(const EntailModel& model, const SparseVec& features) {
  if (model.weights.size() != model.feature_config.hash_dim)
    throw DataError("model weight vector does not match hash_dim");
  if (!std::isfinite(model.bias)) throw DataError("model bias is not finite");
  double z = model.bias;
  for (const auto& [idx, v] : features) {
    const double w = model.weights[idx];
    if (!std::isfinite(w)) throw DataError("model weight is not finite");
    z += w * v;
  }
  if (!std::isfinite(z)) throw DataError("score logit is not finite");
  return stable_sigmoid(z);
}

double score(const EntailModel& model, std::string_view premise, std::string_view hypothesis) {
  return score_features(model, featurize(premise, hypothesis, model.feature_config));
}

EntailModel fit(EntailModel model, const PairSet& pairs, const TrainSpec& spec, TrainPhase phase) {
  spec.validate();
  if (pairs.empty()) throw DataError("fit: empty pair set");
  if (model.weights.size() != model.feature_config.hash_dim)
    throw DataError("model weight vector does not match hash_dim");

  const size_t n = pairs.pairs.size();
  std::vector<SparseVec> features;
  features.reserve(n);
  std::vector<double> targets;
  targets.reserve(n);
  for (const Pair& p : pairs.pairs) {
    features.push_back(featurize(p.premise, p.hypothesis, model.feature_config));
    targets.push_back(p.positive ? 1.0 : 0.0);
  }

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  SplitMix64 rng(spec.shuffle_seed);

  std::vector<double> coefs;
  const size_t batch = static_cast<size_t>(spec.batch_size);
  for (int epoch = 1; epoch <= spec.epochs; ++epoch) {
    seeded_shuffle(order, rng);
    double loss_sum = 0.0;
    for (size_t start = 0; start < n; start += batch) {
      const size_t end = std::min(start + batch, n);
      const double inv_b = 1.0 / static_cast<double>(end - start);
      // Forward over the whole batch before touching the weights.
      coefs.clear();
      for (size_t i = start; i < end; ++i) {
        const size_t idx = order[i];
        double z = model.bias;
        for (const auto& [fi, v] : features[idx]) z += model.weights[fi] * v;
        loss_sum += bce_from_logit(z, targets[idx]);
        coefs.push_back((stable_sigmoid(z) - targets[idx]) * inv_b);
      }
      for (size_t i = start; i < end; ++i) {
        const double step = spec.learning_rate * coefs[i - start];
        for (const auto& [fi, v] : features[order[i]]) model.weights[fi] -= step * v;
        model.bias -= step;
      }
      if (spec.l2 > 0.0) {
        const double decay = 1.0 - spec.learning_rate * spec.l2;
        for (double& w : model.weights) w *= decay;
      }
    }
    const double mean_loss = loss_sum / static_cast<double>(n);
    if (!std::isfinite(mean_loss))
      throw TrainError("training diverged at epoch " + std::to_string(epoch));
    model.train_log.push_back(TrainLogEntry{phase, epoch, mean_loss});
  }
  return model;
}

namespace {

constexpr int kModelVersion = 1;
constexpr std::string_view kModelKind = "ifsc-entail-model";

void append_le_double(std::string& out, double value) {
  uint64_t bits;
  std::memcpy(&bits, &value, sizeof(bits));
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  char buf[8];
  std::memcpy(buf, &bits, sizeof(buf));
  out.append(buf, sizeof(buf));
}

double read_le_double(const char* data) {
  uint64_t bits;
  std::memcpy(&bits, data, sizeof(bits));
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  double value;
  std::memcpy(&value, &bits, sizeof(value));
  return value;
}

}  // namespace

void save_model(const EntailModel& model, const std::string& path) {
  if (model.weights.size() != model.feature_config.hash_dim)
    throw DataError("model weight vector does not match hash_dim");
  json header{{"kind", kModelKind},
              {"format_version", kModelVersion},
              {"hash_dim", model.feature_config.hash_dim},
              {"n_gram_sizes", model.feature_config.n_gram_sizes},
              {"use_cross_features", model.feature_config.use_cross_features}};
  json log = json::array();
  for (const TrainLogEntry& e : model.train_log)
    log.push_back(json{{"phase", to_string(e.phase)}, {"epoch", e.epoch}, {"loss", e.mean_loss}});
  header["train_log"] = std::move(log);
  header["meta"] = model.meta;

  std::string out = header.dump();
  out += '\n';
  append_le_double(out, model.bias);
  for (double w : model.weights) append_le_double(out, w);
  write_text_file(path, out);
}

EntailModel load_model(const std::string& path) {
  const std::string blob = read_text_file(path);
  const size_t nl = blob.find('\n');
  if (nl == std::string::npos) throw DataError(path + ": truncated model file (no header)");

  json header;
  try {
    header = json::parse(blob.substr(0, nl));
  } catch (const json::exception& e) {
    throw DataError(path + ": bad model header: " + e.what());
  }

  EntailModel model;
  try {
    if (header.at("kind").get<std::string>() != kModelKind)
      throw DataError(path + ": not an entail model checkpoint");
    if (header.at("format_version").get<int>() != kModelVersion)
      throw DataError(path + ": unsupported model format_version " +
                      header.at("format_version").dump());
    model.feature_config.hash_dim = header.at("hash_dim").get<uint32_t>();
    model.feature_config.n_gram_sizes = header.at("n_gram_sizes").get<std::vector<int>>();
    model.feature_config.use_cross_features = header.at("use_cross_features").get<bool>();
    for (const auto& e : header.at("train_log"))
      model.train_log.push_back(TrainLogEntry{train_phase_from_string(e.at("phase")),
                                              e.at("epoch").get<int>(),
                                              e.at("loss").get<double>()});
    if (header.contains("meta"))
      model.meta = header.at("meta").get<std::map<std::string, std::string>>();
  } catch (const json::exception& e) {
    throw DataError(path + ": bad model header: " + e.what());
  }
  model.feature_config.validate();

  const size_t expected = (static_cast<size_t>(model.feature_config.hash_dim) + 1) * 8;
  const size_t have = blob.size() - nl - 1;
  if (have != expected)
    throw DataError(path + ": model payload has " + std::to_string(have) + " bytes, expected " +
                    std::to_string(expected));
  const char* data = blob.data() + nl + 1;
  model.bias = read_le_double(data);
  if (!std::isfinite(model.bias)) throw DataError(path + ": non-finite bias");
  model.weights.resize(model.feature_config.hash_dim);
  for (size_t i = 0; i < model.weights.size(); ++i) {
    model.weights[i] = read_le_double(data + 8 * (i + 1));
    if (!std::isfinite(model.weights[i]))
      throw DataError(path + ": non-finite weight at index " + std::to_string(i));
  }
  return model;
}

PairSet import_nli_pairs(const std::string& path) {
  PairSet out;
  const auto lines = split_lines(read_text_file(path));
  for (size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    json j;
    try {
      j = json::parse(lines[i]);
    } catch (const json::exception& e) {
      throw DataError(path + ": parse error at line " + std::to_string(i + 1) + ": " + e.what());
    }
    Pair p;
    try {
      p.premise = j.at("premise").get<std::string>();
      p.hypothesis = j.at("hypothesis").get<std::string>();
      const std::string label = j.at("label").get<std::string>();
      // Convention: 3-class NLI collapses to binary by treating anything
      // short of entailment as negative.
      if (label == "entail" || label == "entailment")
        p.positive = true;
      else if (label == "not_entail" || label == "neutral" || label == "contradiction")
        p.positive = false;
      else
        throw DataError(path + ": line " + std::to_string(i + 1) + ": unknown NLI label '" +
                        label + "'");
    } catch (const json::exception& e) {
      throw DataError(path + ": line " + std::to_string(i + 1) + ": " + e.what());
    }
    p.origin = PairOrigin::kEntailment;
    out.push(std::move(p));
  }
  if (out.empty()) throw DataError(path + ": empty pair file");
  return out;
}

}  // namespace ifsc
