#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ifsc/corpus.hpp"
#include "ifsc/scorer.hpp"
#include "ifsc/session.hpp"

namespace ifsc {

// Marker returned when every class scores at or below the threshold.
inline constexpr const char* kOodMarker = "__ood__";

enum class DecisionRule { kEntailArgmax, kNearestNeighbor, kNearestCentroid };

std::string to_string(DecisionRule rule);

struct Prediction {
  std::string predicted;  // class_id or kOodMarker
  std::vector<std::pair<std::string, double>> scores;  // registry order
  DecisionRule rule = DecisionRule::kEntailArgmax;
};

// The thresholded-argmax rule itself: scores must be listed in registry
// order; the winner is the first class attaining the maximum score, and the
// marker is returned unless that maximum exceeds the threshold.
std::string select_class(const std::vector<std::pair<std::string, double>>& scores,
                         double threshold);

// Scores (text, label_name) for every registered class and applies
// select_class. Throws DataError on an empty registry.
Prediction entail_predict(const SessionSnapshot& snapshot, const std::string& text,
                          double threshold = 0.5);

// Nearest-neighbor rule: scores (text, support example text) for every
// support example, aggregates per class by max, then applies the same
// threshold/argmax rule. Support classes must be registered.
Prediction dnnc_predict(const SessionSnapshot& snapshot, const std::string& text,
                        const std::vector<Example>& support, double threshold = 0.5);

// Nearest-centroid baseline over the premise-side feature vectors.
struct CentroidModel {
  FeatureConfig feature_config;
  std::vector<std::pair<std::string, SparseVec>> centroids;  // fit order
  // Cosine-distance cutoff for rejecting; disabled by default (the
  // baseline has no rejection rule of its own).
  std::optional<double> ood_distance_threshold;
};

// One centroid per class: the mean of featurize(text, "") over the class's
// examples. Classes appear in first-seen order. Throws DataError when any
// class ends up empty (cannot happen from well-formed input) or the input
// is empty.
CentroidModel centroid_fit(const std::vector<Example>& examples, const FeatureConfig& cfg);

// Nearest centroid by cosine distance; ties go to the earliest fitted
// class. scores hold negated distances so that argmax semantics line up.
Prediction centroid_predict(const CentroidModel& model, const std::string& text);

// Prediction dump record consumed by the metrics module.
struct PredRecord {
  std::string id;
  std::string gold;  // gold class id (OOD examples keep their true class id)
  std::string pred;  // class id or kOodMarker
  DecisionRule rule = DecisionRule::kEntailArgmax;
  std::vector<std::pair<std::string, double>> scores;
};

// JSONL {"id","gold","pred","rule","scores":{...}}; an optional first line
// {"meta":{...}} carries provenance.
void write_predictions(const std::vector<PredRecord>& records, const std::string& path,
                       const std::map<std::string, std::string>& extra_meta = {});
std::vector<PredRecord> read_predictions(const std::string& path);

}  // namespace ifsc
