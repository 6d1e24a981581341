#include "ifsc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "ifsc/errors.hpp"
#include "ifsc/io.hpp"

namespace ifsc {

using nlohmann::json;

double group_accuracy(const std::vector<PredRecord>& records,
                      const std::set<std::string>& group) {
  size_t total = 0;
  size_t correct = 0;
  for (const PredRecord& rec : records) {
    if (!group.count(rec.gold)) continue;
    ++total;
    if (rec.pred == rec.gold) ++correct;
  }
  if (total == 0) throw DataError("group_accuracy: empty slice");
  return static_cast<double>(correct) / static_cast<double>(total);
}

double ood_f1(const std::vector<PredRecord>& records, const std::set<std::string>& ood_classes) {
  size_t tp = 0;
  size_t fp = 0;
  size_t fn = 0;
  size_t gold_ood = 0;
  for (const PredRecord& rec : records) {
    const bool is_ood = ood_classes.count(rec.gold) > 0;
    const bool said_ood = rec.pred == kOodMarker;
    gold_ood += is_ood;
    if (is_ood && said_ood) ++tp;
    if (!is_ood && said_ood) ++fp;
    if (is_ood && !said_ood) ++fn;
  }
  if (gold_ood == 0) throw DataError("ood_f1: no gold OOD examples in the slice");
  if (tp == 0) return 0.0;
  const double p = static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double r = static_cast<double>(tp) / static_cast<double>(tp + fn);
  return 2.0 * p * r / (p + r);
}

double drop_rate(const std::vector<double>& series) {
  if (series.size() < 2) throw DataError("drop_rate: need at least two values");
  for (double v : series)
    if (!(v > 0.0)) throw DataError("drop_rate: series values must be positive");
  double sum = 0.0;
  for (size_t i = 0; i + 1 < series.size(); ++i) sum += (series[i] - series[i + 1]) / series[i];
  return sum / static_cast<double>(series.size() - 1);
}

double EvalCell::mean() const {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double EvalCell::stddev() const {
  if (values.size() < 2) return 0.0;
  const double m = mean();
  double sq = 0.0;
  for (double v : values) sq += (v - m) * (v - m);
  return std::sqrt(sq / static_cast<double>(values.size()));
}

namespace {

constexpr int kReportVersion = 1;

// Groups a row may fill: everything introduced up to its phase, plus C_o.
void check_row_shape(const EvalReport& report, const EvalReport::Row& row) {
  const auto phase_pos =
      std::find(report.groups.begin(), report.groups.end(), row.phase);
  if (phase_pos == report.groups.end())
    throw DataError("report row '" + row.phase + "' does not match any group column");
  for (const auto& [group, cell] : row.cells) {
    if (group == "C_o") continue;
    const auto pos = std::find(report.groups.begin(), report.groups.end(), group);
    if (pos == report.groups.end())
      throw DataError("report cell group '" + group + "' missing from group list");
    if (pos > phase_pos)
      throw DataError("report row '" + row.phase + "' has a cell for later group '" + group +
                      "'");
  }
}

std::string format_cell(const EvalCell& cell) {
  char buf[64];
  if (cell.values.size() > 1) {
    std::snprintf(buf, sizeof(buf), "%.2f±%.2f", 100.0 * cell.mean(), 100.0 * cell.stddev());
  } else {
    std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * cell.mean());
  }
  return buf;
}

json report_to_json(const EvalReport& report) {
  json rows = json::array();
  for (const EvalReport::Row& row : report.rows) {
    json cells = json::object();
    for (const auto& [group, cell] : row.cells)
      cells[group] = json{{"values", cell.values},
                          {"mean", cell.mean()},
                          {"std", cell.stddev()}};
    rows.push_back(json{{"phase", row.phase}, {"cells", std::move(cells)}});
  }
  return json{{"format_version", kReportVersion},
              {"metadata", report.metadata},
              {"groups", report.groups},
              {"rows", std::move(rows)}};
}

EvalReport report_from_json(const json& j) {
  try {
    if (j.at("format_version").get<int>() != kReportVersion)
      throw DataError("unsupported report format_version");
    EvalReport report;
    report.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
    report.groups = j.at("groups").get<std::vector<std::string>>();
    for (const auto& row_json : j.at("rows")) {
      EvalReport::Row row;
      row.phase = row_json.at("phase").get<std::string>();
      for (const auto& [group, cell_json] : row_json.at("cells").items()) {
        EvalCell cell;
        cell.values = cell_json.at("values").get<std::vector<double>>();
        row.cells[group] = std::move(cell);
      }
      report.rows.push_back(std::move(row));
    }
    return report;
  } catch (const json::exception& e) {
    throw DataError(std::string("invalid report JSON: ") + e.what());
  }
}

}  // namespace

std::string render_report(const EvalReport& report, ReportFormat format) {
  for (const EvalReport::Row& row : report.rows) check_row_shape(report, row);

  if (format == ReportFormat::kJson) return report_to_json(report).dump(2) + "\n";

  std::string out = "|  |";
  for (const std::string& group : report.groups) out += " " + group + " |";
  out += "\n|---|";
  for (size_t i = 0; i < report.groups.size(); ++i) out += "---|";
  out += "\n";
  for (const EvalReport::Row& row : report.rows) {
    out += "| " + row.phase + " |";
    for (const std::string& group : report.groups) {
      auto it = row.cells.find(group);
      out += it == row.cells.end() ? " |" : " " + format_cell(it->second) + " |";
    }
    out += "\n";
  }
  return out;
}

void write_report(const EvalReport& report, const std::string& path) {
  write_text_file(path, render_report(report, ReportFormat::kJson));
}

EvalReport load_report(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw DataError(path + ": invalid report JSON: " + e.what());
  }
  return report_from_json(j);
}

std::vector<double> report_column(const EvalReport& report, const std::string& group) {
  if (std::find(report.groups.begin(), report.groups.end(), group) == report.groups.end())
    throw DataError("group '" + group + "' not in report");
  std::vector<double> column;
  for (const EvalReport::Row& row : report.rows) {
    auto it = row.cells.find(group);
    if (it != row.cells.end()) column.push_back(it->second.mean());
  }
  if (column.empty()) throw DataError("group '" + group + "' has no cells in report");
  return column;
}

}  // namespace ifsc
