#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ifsc/predict.hpp"

namespace ifsc {

// Accuracy over the records whose gold class belongs to `group`; the
// prediction must name the exact class. Throws DataError on an empty slice.
double group_accuracy(const std::vector<PredRecord>& records,
                      const std::set<std::string>& group);

// Binary F1 with "predicted OOD" as the positive class: gold-positive means
// the gold class is in ood_classes, predicted-positive means pred is the
// OOD marker. Zero when there are no true positives. Throws DataError when
// the records contain no gold-OOD example.
double ood_f1(const std::vector<PredRecord>& records,
              const std::set<std::string>& ood_classes);

// Average relative decline over consecutive pairs:
//   d = 1/(L-1) * sum_i (r_i - r_{i+1}) / r_i
// Requires at least two entries, all positive.
double drop_rate(const std::vector<double>& series);

struct EvalCell {
  std::vector<double> values;  // one per seed
  double mean() const;
  double stddev() const;  // population standard deviation
};

// Per-phase rows by per-group columns; lower-triangular (a row only has
// cells for groups introduced by then, plus C_o).
struct EvalReport {
  struct Row {
    std::string phase;  // named after the group introduced: "C_b", "C_n^1", ...
    std::map<std::string, EvalCell> cells;
  };
  std::map<std::string, std::string> metadata;  // seeds, mode, scorer, config hash
  std::vector<std::string> groups;  // column order: C_b?, C_n^1.., C_o
  std::vector<Row> rows;
};

enum class ReportFormat { kJson, kMarkdown };

// JSON is the machine form; markdown renders percentages with two decimals
// and mean+-std cells for multi-seed runs. Throws DataError when a row
// holds a cell for a group outside its lower-triangular span.
std::string render_report(const EvalReport& report, ReportFormat format);

void write_report(const EvalReport& report, const std::string& path);  // JSON
EvalReport load_report(const std::string& path);

// Column of per-round means for one group, top row first. Throws DataError
// when the group is absent from the report.
std::vector<double> report_column(const EvalReport& report, const std::string& group);

}  // namespace ifsc
