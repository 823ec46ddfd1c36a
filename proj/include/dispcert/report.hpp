#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dispcert/band.hpp"
#include "dispcert/coverage.hpp"
#include "dispcert/io.hpp"
#include "dispcert/optimizer.hpp"
#include "dispcert/selection.hpp"
#include "dispcert/weight.hpp"

namespace dispcert {

// Config fragments. Unknown kinds and missing parameters throw ValidationError.
WeightFunction weight_from_json(const Json& j);
Distribution distribution_from_json(const Json& j);
MeasureSpec measure_spec_from_json(const Json& j);
ObjectiveSpec objective_from_json(const Json& j);
OptimizerConfig optimizer_config_from_json(const Json& j, OptimizerConfig base = {});
Json optimizer_config_to_json(const OptimizerConfig& c);

struct MeasureResult {
  std::string measure;
  Json params;
  std::optional<double> bound_lo;
  double bound_hi;
  std::vector<std::string> flags;
  Json extra = Json::object();
};

struct MeasureBoundReport {
  double delta_effective;
  BandMethod method;
  std::size_t n;
  std::vector<MeasureResult> measures;
};

// One measure on an existing band. The request is {"name": ..., params...}.
MeasureResult evaluate_measure(const CdfBand& band, const Json& request);

// All requests against one band.
MeasureBoundReport measure_report(const CdfBand& band, const Json& requests);

Json to_json(const MeasureBoundReport& r);
Json to_json(const SelectionReport& r);
Json to_json(const CoverageReport& r);
Json to_json(const TrainedBound& t);

}  // namespace dispcert
