#include "dispcert/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include "dispcert/errors.hpp"

namespace dispcert {
namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(field));
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) throw ValidationError("line " + std::to_string(line_no) + ": unterminated quote");
  out.push_back(trim(field));
  return out;
}

std::optional<double> parse_number(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return v;
}

std::string row_list(const std::vector<std::size_t>& rows) {
  std::ostringstream os;
  const std::size_t shown = std::min<std::size_t>(rows.size(), 20);
  for (std::size_t i = 0; i < shown; ++i) os << (i ? ", " : "") << rows[i];
  if (rows.size() > shown) os << ", ... (" << rows.size() << " total)";
  return os.str();
}

std::vector<long> parse_id_set(const std::string& s, std::size_t row) {
  std::vector<long> ids;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) {
    long v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw ValidationError("row " + std::to_string(row) + ": bad id '" + tok + "'");
    }
    ids.push_back(v);
  }
  return ids;
}

std::vector<double> json_doubles(const Json& j, const char* key) {
  std::vector<double> out;
  for (const auto& v : j.at(key)) out.push_back(v.get<double>());
  return out;
}

}  // namespace

InputFormat format_from_path(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".csv") return InputFormat::csv;
  if (ext == ".jsonl" || ext == ".ndjson") return InputFormat::jsonl;
  throw ValidationError("unknown input format for '" + path.string() + "' (expected .csv or .jsonl)");
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto idx = find(name);
  if (!idx) throw ValidationError("missing column '" + name + "'");
  return *idx;
}

std::optional<std::size_t> CsvTable::find(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) return std::nullopt;
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream is(text);
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    auto fields = split_line(line, line_no);
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw ValidationError("row " + std::to_string(t.rows.size() + 1) + ": expected " +
                            std::to_string(t.header.size()) + " fields, got " + std::to_string(fields.size()));
    }
    t.rows.push_back(std::move(fields));
  }
  if (!have_header) throw ValidationError("CSV is empty (a header row is required)");
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_text(path)); }

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

LossSamples parse_losses_csv(const std::string& text, std::optional<double> support_max, bool nonneg) {
  const CsvTable t = parse_csv(text);
  const std::size_t lc = t.column("loss");
  const auto gc = t.find("group");
  std::vector<double> values;
  std::vector<std::string> groups;
  std::vector<std::size_t> bad;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto v = parse_number(t.rows[r][lc]);
    if (!v || !std::isfinite(*v)) bad.push_back(r + 1);
    values.push_back(v.value_or(0.0));
    if (gc) groups.push_back(t.rows[r][*gc]);
  }
  if (!bad.empty()) throw ValidationError("non-finite or unparsable loss in data rows " + row_list(bad));
  return LossSamples(std::move(values), std::move(groups), support_max, nonneg);
}

LossSamples parse_losses_jsonl(const std::string& text, std::optional<double> support_max, bool nonneg) {
  std::istringstream is(text);
  std::string line;
  std::vector<double> values;
  std::vector<std::string> groups;
  std::vector<std::size_t> bad;
  std::size_t row = 0;
  bool any_group = false;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    ++row;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error&) {
      bad.push_back(row);
      continue;
    }
    if (!j.is_object() || !j.contains("loss") || !j["loss"].is_number()) {
      bad.push_back(row);
      continue;
    }
    const double v = j["loss"].get<double>();
    if (!std::isfinite(v)) bad.push_back(row);
    values.push_back(v);
    if (j.contains("group")) {
      any_group = true;
      groups.push_back(j["group"].is_string() ? j["group"].get<std::string>() : j["group"].dump());
    } else {
      groups.emplace_back();
    }
  }
  if (!bad.empty()) throw ValidationError("invalid loss in data rows " + row_list(bad));
  if (!any_group) groups.clear();
  return LossSamples(std::move(values), std::move(groups), support_max, nonneg);
}

LossSamples read_losses(const std::filesystem::path& path, std::optional<double> support_max, bool nonneg) {
  const std::string text = read_text(path);
  if (format_from_path(path) == InputFormat::jsonl) return parse_losses_jsonl(text, support_max, nonneg);
  return parse_losses_csv(text, support_max, nonneg);
}

std::string losses_to_csv(const LossSamples& samples) {
  std::string out = samples.has_groups() ? "loss,group\n" : "loss\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out += format_double(samples.values()[i]);
    if (samples.has_groups()) {
      const std::string& g = samples.groups()[i];
      if (g.find_first_of(",\"") != std::string::npos) {
        std::string q = "\"";
        for (char c : g) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        out += "," + q + "\"";
      } else {
        out += "," + g;
      }
    }
    out += "\n";
  }
  return out;
}

HypothesisLossTable parse_hypothesis_csv(const std::string& text, std::optional<double> support_max, bool nonneg) {
  const CsvTable t = parse_csv(text);
  const auto gc = t.find("group");
  std::vector<std::string> labels;
  std::vector<std::size_t> cols;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    if (t.header[c].rfind("h_", 0) == 0) {
      labels.push_back(t.header[c].substr(2));
      cols.push_back(c);
    }
  }
  if (labels.empty()) throw ValidationError("hypothesis table needs at least one h_<label> column");
  std::vector<std::vector<double>> columns(labels.size());
  std::vector<std::string> groups;
  std::vector<std::size_t> bad;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    bool ok = true;
    for (std::size_t h = 0; h < cols.size(); ++h) {
      const auto v = parse_number(t.rows[r][cols[h]]);
      if (!v || !std::isfinite(*v)) ok = false;
      columns[h].push_back(v.value_or(0.0));
    }
    if (!ok) bad.push_back(r + 1);
    if (gc) groups.push_back(t.rows[r][*gc]);
  }
  if (!bad.empty()) throw ValidationError("non-finite or unparsable loss in data rows " + row_list(bad));
  return HypothesisLossTable(std::move(labels), std::move(columns), std::move(groups), support_max, nonneg);
}

HypothesisLossTable read_hypothesis_table(const std::filesystem::path& path, std::optional<double> support_max,
                                          bool nonneg) {
  return parse_hypothesis_csv(read_text(path), support_max, nonneg);
}

LossMetric parse_loss_metric(const std::string& name, unsigned num_classes, double alpha) {
  LossMetric m;
  if (name == "brier") {
    m.kind = LossMetric::Kind::brier;
  } else if (name == "balanced_accuracy") {
    m.kind = LossMetric::Kind::balanced_accuracy;
    if (num_classes < 2) throw ValidationError("balanced_accuracy needs at least 2 classes");
  } else if (name == "prec_recall") {
    m.kind = LossMetric::Kind::prec_recall;
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("prec_recall alpha must lie in [0,1]");
  } else {
    throw ValidationError("unknown metric '" + name + "' (brier, balanced_accuracy, prec_recall)");
  }
  m.num_classes = num_classes;
  m.alpha = alpha;
  return m;
}

double brier_loss(double confidence, double outcome) {
  if (!(confidence >= 0.0 && confidence <= 1.0)) throw ValidationError("confidence must lie in [0,1]");
  if (outcome != 0.0 && outcome != 1.0) throw ValidationError("outcome must be 0 or 1");
  return (confidence - outcome) * (confidence - outcome);
}

double balanced_accuracy_loss(const std::vector<long>& prediction_set, long label, unsigned num_classes) {
  if (num_classes < 2) throw ValidationError("balanced_accuracy needs at least 2 classes");
  const auto in_range = [&](long c) { return c >= 0 && c < static_cast<long>(num_classes); };
  if (!in_range(label)) throw ValidationError("label out of range");
  const std::set<long> s(prediction_set.begin(), prediction_set.end());
  for (long c : s) {
    if (!in_range(c)) throw ValidationError("predicted class out of range");
  }
  const double sensitivity = s.count(label) ? 1.0 : 0.0;
  const double false_positives = static_cast<double>(s.size()) - sensitivity;
  const double negatives = static_cast<double>(num_classes) - 1.0;
  const double specificity = (negatives - false_positives) / negatives;
  return 1.0 - (sensitivity + specificity) / 2.0;
}

double prec_recall_loss(const std::vector<long>& recommended, const std::vector<long>& relevant, double alpha) {
  const std::set<long> rec(recommended.begin(), recommended.end());
  const std::set<long> rel(relevant.begin(), relevant.end());
  if (rec.empty() || rel.empty()) throw ValidationError("recommendation and test sets must be nonempty");
  double hits = 0.0;
  for (long i : rec) hits += rel.count(i);
  const double l_r = 1.0 - hits / static_cast<double>(rel.size());
  const double l_p = 1.0 - hits / static_cast<double>(rec.size());
  return alpha * l_r * l_r + (1.0 - alpha) * l_p * l_p;
}

LossSamples compute_losses(const std::string& predictions_csv, const LossMetric& metric) {
  const CsvTable t = parse_csv(predictions_csv);
  const auto gc = t.find("group");
  std::vector<double> losses;
  std::vector<std::string> groups;
  std::vector<std::size_t> bad;
  std::string first_error;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    try {
      switch (metric.kind) {
        case LossMetric::Kind::brier: {
          const auto f = parse_number(row[t.column("confidence")]);
          const auto o = parse_number(row[t.column("outcome")]);
          if (!f || !o) throw ValidationError("unparsable number");
          losses.push_back(brier_loss(*f, *o));
          break;
        }
        case LossMetric::Kind::balanced_accuracy: {
          const auto set = parse_id_set(row[t.column("prediction_set")], r + 1);
          const auto label = parse_id_set(row[t.column("label")], r + 1);
          if (label.size() != 1) throw ValidationError("label must be a single class id");
          losses.push_back(balanced_accuracy_loss(set, label.front(), metric.num_classes));
          break;
        }
        case LossMetric::Kind::prec_recall:
          losses.push_back(prec_recall_loss(parse_id_set(row[t.column("recommended")], r + 1),
                                            parse_id_set(row[t.column("relevant")], r + 1), metric.alpha));
          break;
      }
    } catch (const ValidationError& e) {
      if (first_error.empty()) first_error = e.what();
      bad.push_back(r + 1);
      losses.push_back(0.0);
    }
    if (gc) groups.push_back(row[*gc]);
  }
  if (!bad.empty()) throw ValidationError("invalid predictions in data rows " + row_list(bad) + ": " + first_error);
  return LossSamples(std::move(losses), std::move(groups), std::nullopt, true);
}

Json band_to_json(const CdfBand& band) {
  std::vector<double> bp = band.lower().breakpoints();
  bp.insert(bp.end(), band.upper().breakpoints().begin(), band.upper().breakpoints().end());
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  Json lower = Json::array(), upper = Json::array();
  for (double x : bp) {
    lower.push_back(band.lower()(x));
    upper.push_back(band.upper()(x));
  }
  Json j;
  j["delta"] = band.delta();
  j["method"] = to_string(band.method());
  j["n"] = band.n();
  j["L"] = band.bounds().values();
  j["breakpoints"] = bp;
  j["lower_levels"] = std::move(lower);
  j["upper_levels"] = std::move(upper);
  j["support_max"] = std::isfinite(band.support_max()) ? Json(band.support_max()) : Json(nullptr);
  j["lower_before"] = band.lower().level_before();
  j["upper_before"] = band.upper().level_before();
  j["nonneg"] = band.nonneg();
  j["order_stats"] = band.order_stats().sorted();
  return j;
}

CdfBand band_from_json(const Json& j) {
  try {
    const std::vector<double> bp = json_doubles(j, "breakpoints");
    StepCdf lower(j.at("lower_before").get<double>(), bp, json_doubles(j, "lower_levels"));
    StepCdf upper(j.at("upper_before").get<double>(), bp, json_doubles(j, "upper_levels"));
    const double delta = j.at("delta").get<double>();
    const BandMethod method = parse_band_method(j.at("method").get<std::string>());
    const std::vector<double> stats = json_doubles(j, "order_stats");
    if (stats.size() != j.at("n").get<std::size_t>()) throw ValidationError("n does not match order_stats");
    const double B = j.at("support_max").is_null() ? kInf : j.at("support_max").get<double>();
    return CdfBand(std::move(lower), std::move(upper), delta, method, stats.empty() ? OrderStats() : OrderStats(stats),
                   BoundVector(json_doubles(j, "L"), delta, method), B, j.at("nonneg").get<bool>());
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed band JSON: ") + e.what());
  }
}

std::string band_to_string(const CdfBand& band) { return band_to_json(band).dump(2) + "\n"; }

CdfBand read_band(const std::filesystem::path& path) {
  try {
    return band_from_json(Json::parse(read_text(path)));
  } catch (const Json::parse_error& e) {
    throw ValidationError("cannot parse '" + path.string() + "': " + e.what());
  }
}

}  // namespace dispcert
