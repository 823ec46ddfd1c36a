#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dispcert/band.hpp"
#include "dispcert/samples.hpp"
#include "dispcert/selection.hpp"

namespace dispcert {

using Json = nlohmann::ordered_json;

enum class InputFormat { csv, jsonl };
InputFormat format_from_path(const std::filesystem::path& path);

// Rows of a header-first CSV. Fields may be double-quoted; no embedded newlines.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column index or ValidationError naming the missing column.
  std::size_t column(const std::string& name) const;
  std::optional<std::size_t> find(const std::string& name) const;
};

CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
// Writes to a sibling temporary file and renames it over path.
void write_atomic(const std::filesystem::path& path, const std::string& content);

// Shortest round-trip decimal form.
std::string format_double(double x);

// Losses with schema loss[,group] (CSV) or {"loss": x, "group": g} lines (JSONL).
// Non-finite or unparsable values are reported with their 1-based data row.
LossSamples read_losses(const std::filesystem::path& path, std::optional<double> support_max = std::nullopt,
                        bool nonneg = false);
LossSamples parse_losses_csv(const std::string& text, std::optional<double> support_max = std::nullopt,
                             bool nonneg = false);
LossSamples parse_losses_jsonl(const std::string& text, std::optional<double> support_max = std::nullopt,
                               bool nonneg = false);

std::string losses_to_csv(const LossSamples& samples);

// example_id,group?,h_<label>... one column per hypothesis.
HypothesisLossTable parse_hypothesis_csv(const std::string& text, std::optional<double> support_max = std::nullopt,
                                         bool nonneg = false);
HypothesisLossTable read_hypothesis_table(const std::filesystem::path& path,
                                          std::optional<double> support_max = std::nullopt, bool nonneg = false);

struct LossMetric {
  enum class Kind { brier, balanced_accuracy, prec_recall };
  Kind kind = Kind::brier;
  unsigned num_classes = 2;  // balanced_accuracy
  double alpha = 0.5;        // prec_recall
};
LossMetric parse_loss_metric(const std::string& name, unsigned num_classes, double alpha);

// Per-example losses.
double brier_loss(double confidence, double outcome);
double balanced_accuracy_loss(const std::vector<long>& prediction_set, long label, unsigned num_classes);
double prec_recall_loss(const std::vector<long>& recommended, const std::vector<long>& relevant, double alpha);

// Prediction CSV schemas (optional group column in each):
//   brier: confidence,outcome
//   balanced_accuracy: prediction_set,label  (set as space-separated class ids)
//   prec_recall: recommended,relevant        (space-separated item ids)
LossSamples compute_losses(const std::string& predictions_csv, const LossMetric& metric);

Json band_to_json(const CdfBand& band);
CdfBand band_from_json(const Json& j);
std::string band_to_string(const CdfBand& band);
CdfBand read_band(const std::filesystem::path& path);

}  // namespace dispcert
