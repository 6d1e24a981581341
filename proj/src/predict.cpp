#include "ifsc/predict.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <json.hpp>

#include "ifsc/errors.hpp"
#include "ifsc/io.hpp"
#include "ifsc/pairgen.hpp"

namespace ifsc {

using nlohmann::json;

std::string to_string(DecisionRule rule) {
  switch (rule) {
    case DecisionRule::kEntailArgmax: return "entail_argmax";
    case DecisionRule::kNearestNeighbor: return "nearest_neighbor";
    case DecisionRule::kNearestCentroid: return "nearest_centroid";
  }
  return "?";
}

namespace {

DecisionRule rule_from_string(const std::string& s) {
  if (s == "entail_argmax") return DecisionRule::kEntailArgmax;
  if (s == "nearest_neighbor") return DecisionRule::kNearestNeighbor;
  if (s == "nearest_centroid") return DecisionRule::kNearestCentroid;
  throw DataError("unknown decision rule '" + s + "'");
}

}  // namespace

std::string select_class(const std::vector<std::pair<std::string, double>>& scores,
                         double threshold) {
  if (scores.empty()) throw DataError("select_class: no scores");
  size_t best = 0;
  for (size_t i = 1; i < scores.size(); ++i)
    if (scores[i].second > scores[best].second) best = i;  // ties keep the earliest
  if (scores[best].second > threshold) return scores[best].first;
  return kOodMarker;
}

Prediction entail_predict(const SessionSnapshot& snapshot, const std::string& text,
                          double threshold) {
  if (snapshot.registry.size() == 0) throw DataError("entail_predict: empty registry");
  Prediction pred;
  pred.rule = DecisionRule::kEntailArgmax;
  pred.scores.reserve(snapshot.registry.size());
  for (const RegistryEntry& entry : snapshot.registry.entries()) {
    const std::string hypothesis =
        label_hypothesis(ClassDef{entry.class_id, entry.label_name});
    pred.scores.emplace_back(entry.class_id, snapshot.scorer->score(text, hypothesis));
  }
  pred.predicted = select_class(pred.scores, threshold);
  return pred;
}

Prediction dnnc_predict(const SessionSnapshot& snapshot, const std::string& text,
                        const std::vector<Example>& support, double threshold) {
  if (support.empty()) throw DataError("dnnc_predict: empty support set");

  // Per-class nearest neighbor: max over that class's support examples.
  std::map<std::string, double> best;
  for (const Example& ex : support) {
    if (!snapshot.registry.contains(ex.class_id))
      throw DataError("support example '" + ex.id + "' has unregistered class '" + ex.class_id +
                      "'");
    const double s = snapshot.scorer->score(text, ex.text);
    auto [it, inserted] = best.emplace(ex.class_id, s);
    if (!inserted) it->second = std::max(it->second, s);
  }

  Prediction pred;
  pred.rule = DecisionRule::kNearestNeighbor;
  for (const RegistryEntry& entry : snapshot.registry.entries()) {
    auto it = best.find(entry.class_id);
    if (it != best.end()) pred.scores.emplace_back(entry.class_id, it->second);
  }
  pred.predicted = select_class(pred.scores, threshold);
  return pred;
}

namespace {

double sparse_dot(const SparseVec& a, const SparseVec& b) {
  double dot = 0.0;
  size_t i = 0;
  size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first)
      ++i;
    else if (a[i].first > b[j].first)
      ++j;
    else
      dot += a[i++].second * b[j++].second;
  }
  return dot;
}

double sparse_norm(const SparseVec& v) {
  double n = 0.0;
  for (const auto& [idx, value] : v) n += value * value;
  return std::sqrt(n);
}

// 1 - cosine similarity; orthogonal-to-everything inputs land at distance 1.
double cosine_distance(const SparseVec& a, const SparseVec& b) {
  const double na = sparse_norm(a);
  const double nb = sparse_norm(b);
  if (na == 0.0 || nb == 0.0) return 1.0;
  return 1.0 - sparse_dot(a, b) / (na * nb);
}

}  // namespace

CentroidModel centroid_fit(const std::vector<Example>& examples, const FeatureConfig& cfg) {
  if (examples.empty()) throw DataError("centroid_fit: no examples");
  CentroidModel model;
  model.feature_config = cfg;

  std::vector<std::string> order;  // classes in first-seen order
  std::map<std::string, std::map<uint32_t, double>> sums;
  std::map<std::string, size_t> counts;
  for (const Example& ex : examples) {
    if (!counts.count(ex.class_id)) order.push_back(ex.class_id);
    counts[ex.class_id] += 1;
    for (const auto& [idx, v] : featurize(ex.text, "", cfg)) sums[ex.class_id][idx] += v;
  }

  for (const std::string& class_id : order) {
    const double inv = 1.0 / static_cast<double>(counts[class_id]);
    SparseVec centroid;
    centroid.reserve(sums[class_id].size());
    for (const auto& [idx, v] : sums[class_id]) centroid.emplace_back(idx, v * inv);
    model.centroids.emplace_back(class_id, std::move(centroid));
  }
  return model;
}

Prediction centroid_predict(const CentroidModel& model, const std::string& text) {
  if (model.centroids.empty()) throw DataError("centroid_predict: no centroids");
  const SparseVec features = featurize(text, "", model.feature_config);

  Prediction pred;
  pred.rule = DecisionRule::kNearestCentroid;
  size_t best = 0;
  double best_distance = 0.0;
  for (size_t i = 0; i < model.centroids.size(); ++i) {
    const double d = cosine_distance(features, model.centroids[i].second);
    pred.scores.emplace_back(model.centroids[i].first, -d);
    if (i == 0 || d < best_distance) {  // strict: ties keep the earliest class
      best = i;
      best_distance = d;
    }
  }
  if (model.ood_distance_threshold && best_distance > *model.ood_distance_threshold)
    pred.predicted = kOodMarker;
  else
    pred.predicted = model.centroids[best].first;
  return pred;
}

void write_predictions(const std::vector<PredRecord>& records, const std::string& path,
                       const std::map<std::string, std::string>& extra_meta) {
  std::string out;
  if (!extra_meta.empty()) {
    out += json{{"meta", extra_meta}}.dump();
    out += '\n';
  }
  for (const PredRecord& rec : records) {
    json scores = json::object();
    for (const auto& [class_id, s] : rec.scores) scores[class_id] = s;
    json j{{"id", rec.id},
           {"gold", rec.gold},
           {"pred", rec.pred},
           {"rule", to_string(rec.rule)},
           {"scores", std::move(scores)}};
    out += j.dump();
    out += '\n';
  }
  write_text_file(path, out);
}

std::vector<PredRecord> read_predictions(const std::string& path) {
  std::vector<PredRecord> records;
  const auto lines = split_lines(read_text_file(path));
  for (size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    json j;
    try {
      j = json::parse(lines[i]);
    } catch (const json::exception& e) {
      throw DataError(path + ": parse error at line " + std::to_string(i + 1) + ": " + e.what());
    }
    if (j.contains("meta")) continue;
    PredRecord rec;
    try {
      rec.id = j.at("id").get<std::string>();
      rec.gold = j.at("gold").get<std::string>();
      rec.pred = j.at("pred").get<std::string>();
      rec.rule = rule_from_string(j.value("rule", "entail_argmax"));
      if (j.contains("scores"))
        for (const auto& [class_id, s] : j.at("scores").items())
          rec.scores.emplace_back(class_id, s.get<double>());
    } catch (const json::exception& e) {
      throw DataError(path + ": line " + std::to_string(i + 1) + ": " + e.what());
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace ifsc
