#pragma once

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "signbench/error.hpp"
#include "signbench/image_codec.hpp"
#include "signbench/plot.hpp"
#include "signbench/trainer.hpp"

namespace signbench {

// Accuracies print as percentages with two decimals and training time as
// minutes with two decimals, the same precision the published tables use.
inline std::string format_pct(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", fraction * 100.0);
  return buf;
}

inline std::string format_minutes(double seconds) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", seconds / 60.0);
  return buf;
}

struct TableDocument {
  std::string csv;
  std::string markdown;
};

inline void write_table_document(const TableDocument& doc, const std::filesystem::path& out_dir,
                                 const std::string& name) {
  for (const auto& [ext, body] : {std::pair<const char*, const std::string&>{"csv", doc.csv},
                                  {"md", doc.markdown}}) {
    const auto path = out_dir / (name + "." + ext);
    std::ofstream out(path, std::ios::trunc);
    if (!out) raise(ErrorCode::IoError, "cannot write " + path.string());
    out << body;
  }
}

// ---------------------------------------------------------------------------
// results table (one row per run)

// Best value per numeric column is flagged in the markdown (bold), mirroring
// the published tables: highest accuracy, lowest training time. Ties flag
// every tied row.
inline TableDocument emit_results_table(const std::vector<RunRecord>& runs) {
  if (runs.empty()) raise(ErrorCode::ConfigError, "results table needs at least one run record");

  const std::size_t n = runs.size();
  auto best_mask = [&](auto value_of, bool lower_is_better) {
    std::vector<bool> mask(n, false);
    double best = value_of(runs[0]);
    for (const auto& r : runs) {
      best = lower_is_better ? std::min(best, value_of(r)) : std::max(best, value_of(r));
    }
    for (std::size_t i = 0; i < n; ++i) mask[i] = value_of(runs[i]) == best;
    return mask;
  };
  const auto best_train = best_mask([](const RunRecord& r) { return r.final_train_acc; }, false);
  const auto best_val = best_mask([](const RunRecord& r) { return r.final_val_acc; }, false);
  const auto best_test = best_mask([](const RunRecord& r) { return r.final_test_acc; }, false);
  const auto best_time = best_mask([](const RunRecord& r) { return r.total_train_time_s; }, true);

  TableDocument doc;
  doc.csv = "model,train_acc_pct,val_acc_pct,test_acc_pct,train_time_min\n";
  doc.markdown =
      "| Model | Train Acc | Val Acc | Test Acc | Train Time |\n"
      "|---|---|---|---|---|\n";
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = runs[i];
    char line[256];
    std::snprintf(line, sizeof(line), "%s,%.2f,%.2f,%.2f,%s\n", r.model_name.c_str(),
                  r.final_train_acc * 100.0, r.final_val_acc * 100.0, r.final_test_acc * 100.0,
                  format_minutes(r.total_train_time_s).c_str());
    doc.csv += line;

    auto cell = [](const std::string& text, bool flagged) {
      return flagged ? "**" + text + "**" : text;
    };
    doc.markdown += "| " + r.model_name + " | " + cell(format_pct(r.final_train_acc), best_train[i]) +
                    " | " + cell(format_pct(r.final_val_acc), best_val[i]) + " | " +
                    cell(format_pct(r.final_test_acc), best_test[i]) + " | " +
                    cell(format_minutes(r.total_train_time_s) + " minutes", best_time[i]) +
                    " |\n";
  }
  return doc;
}

// Round-trip helper used by the verification suite: rows of numeric values at
// table precision.
struct ResultsRow {
  std::string model;
  double train_acc_pct = 0, val_acc_pct = 0, test_acc_pct = 0, train_time_min = 0;
};

inline std::vector<ResultsRow> parse_results_csv(const std::string& csv) {
  std::vector<ResultsRow> rows;
  std::size_t pos = csv.find('\n');
  if (pos == std::string::npos) raise(ErrorCode::ParseError, "results csv has no header");
  ++pos;
  while (pos < csv.size()) {
    std::size_t eol = csv.find('\n', pos);
    if (eol == std::string::npos) eol = csv.size();
    const std::string line = csv.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty()) continue;
    ResultsRow row;
    std::size_t field = 0, start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        const std::string token = line.substr(start, i - start);
        switch (field) {
          case 0: row.model = token; break;
          case 1: row.train_acc_pct = std::stod(token); break;
          case 2: row.val_acc_pct = std::stod(token); break;
          case 3: row.test_acc_pct = std::stod(token); break;
          case 4: row.train_time_min = std::stod(token); break;
          default: raise(ErrorCode::ParseError, "results csv row has too many fields");
        }
        ++field;
        start = i + 1;
      }
    }
    if (field != 5) raise(ErrorCode::ParseError, "results csv row has too few fields");
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// accuracy curves (per-epoch data + rendered plot)

// Epoch values print with enough digits to round-trip doubles exactly.
inline std::string emit_curve_csv(const RunRecord& run) {
  if (run.history.empty()) raise(ErrorCode::ConfigError, "run record has an empty history");
  std::string csv = "epoch,train_acc,val_acc,lr\n";
  for (const auto& e : run.history) {
    char line[160];
    std::snprintf(line, sizeof(line), "%zu,%.17g,%.17g,%.17g\n", e.epoch, e.train_acc, e.val_acc,
                  e.lr);
    csv += line;
  }
  return csv;
}

struct CurvePoint {
  std::size_t epoch = 0;
  double train_acc = 0, val_acc = 0, lr = 0;
};

inline std::vector<CurvePoint> parse_curve_csv(const std::string& csv) {
  std::vector<CurvePoint> points;
  std::size_t pos = csv.find('\n');
  if (pos == std::string::npos) raise(ErrorCode::ParseError, "curve csv has no header");
  ++pos;
  while (pos < csv.size()) {
    std::size_t eol = csv.find('\n', pos);
    if (eol == std::string::npos) eol = csv.size();
    const std::string line = csv.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty()) continue;
    CurvePoint p;
    if (std::sscanf(line.c_str(), "%zu,%lg,%lg,%lg", &p.epoch, &p.train_acc, &p.val_acc, &p.lr) != 4) {
      raise(ErrorCode::ParseError, "bad curve csv row: " + line);
    }
    points.push_back(p);
  }
  return points;
}

inline RawImage render_accuracy_curves(const RunRecord& run) {
  PlotSeries train_series, val_series;
  for (const auto& e : run.history) {
    train_series.values.push_back(e.train_acc);
    val_series.values.push_back(e.val_acc);
  }
  train_series.r = 31, train_series.g = 119, train_series.b = 180;  // blue
  val_series.r = 255, val_series.g = 127, val_series.b = 14;        // orange
  return render_line_chart({train_series, val_series});
}

// Writes <stem>.curve.csv and <stem>.curve.png.
inline void emit_accuracy_curves(const RunRecord& run, const std::filesystem::path& out_dir,
                                 const std::string& stem) {
  const auto csv_path = out_dir / (stem + ".curve.csv");
  std::ofstream out(csv_path, std::ios::trunc);
  if (!out) raise(ErrorCode::IoError, "cannot write " + csv_path.string());
  out << emit_curve_csv(run);
  out.close();
  write_file_bytes(out_dir / (stem + ".curve.png"), encode_png(render_accuracy_curves(run)));
}

// ---------------------------------------------------------------------------
// baseline comparison (published accuracies vs this run)

struct BaselineEntry {
  std::string study;
  std::string dataset;       // "ArSL2018" or "AASL"
  double accuracy_pct = 0;
};

inline const std::vector<std::string>& known_baseline_datasets() {
  static const std::vector<std::string> kKnown = {"ArSL2018", "AASL"};
  return kKnown;
}

inline std::string dataset_display_key(const std::string& dataset_kind) {
  if (dataset_kind == "ARSL2018") return "ArSL2018";
  if (dataset_kind == "AASL") return "AASL";
  return dataset_kind;
}

// Baseline file: JSON object mapping study label -> {dataset, accuracy_pct}.
inline std::vector<BaselineEntry> load_baselines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open baselines file " + path.string());
  nlohmann::ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  std::vector<BaselineEntry> out;
  try {
    for (const auto& [study, value] : j.items()) {
      BaselineEntry entry;
      entry.study = study;
      entry.dataset = value.at("dataset").get<std::string>();
      entry.accuracy_pct = value.at("accuracy_pct").get<double>();
      const auto& known = known_baseline_datasets();
      if (std::find(known.begin(), known.end(), entry.dataset) == known.end()) {
        raise(ErrorCode::DatasetKeyError,
              "baseline '" + entry.study + "' names unknown dataset '" + entry.dataset + "'");
      }
      out.push_back(std::move(entry));
    }
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return out;
}

// Groups rows by dataset: every published baseline for that dataset, then the
// supplied runs. Run rows are flagged, mirroring the published layout.
inline TableDocument compare_with_baselines(const std::vector<RunRecord>& runs,
                                            const std::vector<BaselineEntry>& baselines) {
  TableDocument doc;
  doc.csv = "study,dataset,test_acc_pct,source\n";
  doc.markdown =
      "| Study | Dataset | Test Accuracy |\n"
      "|---|---|---|\n";

  std::vector<std::string> groups = known_baseline_datasets();
  for (const auto& r : runs) {
    const std::string key = dataset_display_key(r.dataset_kind);
    if (std::find(groups.begin(), groups.end(), key) == groups.end()) groups.push_back(key);
  }

  for (const auto& group : groups) {
    bool any = false;
    for (const auto& b : baselines) {
      if (b.dataset != group) continue;
      char pct[32];
      std::snprintf(pct, sizeof(pct), "%.2f", b.accuracy_pct);
      doc.csv += b.study + "," + b.dataset + "," + pct + ",published\n";
      doc.markdown += "| " + b.study + " | " + b.dataset + " | " + pct + "% |\n";
      any = true;
    }
    for (const auto& r : runs) {
      if (dataset_display_key(r.dataset_kind) != group) continue;
      char pct[32];
      std::snprintf(pct, sizeof(pct), "%.2f", r.final_test_acc * 100.0);
      doc.csv += "This work (" + r.model_name + ")," + group + "," + pct + ",this_work\n";
      doc.markdown += "| **This work (" + r.model_name + ")** | " + group + " | **" + pct +
                      "%** |\n";
      any = true;
    }
    if (any) doc.markdown += "| | | |\n";  // group separator
  }
  return doc;
}

}  // namespace signbench
