#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "lvar/estimate.hpp"
#include "lvar/model.hpp"
#include "lvar/simulate.hpp"

namespace lvar::cli {

using Json = nlohmann::ordered_json;

/// First row holds the series names, every further row one time step.
/// Throws InvalidArgument on malformed input.
TimeSeriesPanel read_csv(std::istream& in);
void write_csv(std::ostream& out, const TimeSeriesPanel& panel);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const char* what);

/// {"n", "names", "supports"} with supports[k] = S_k row-major.
Json to_json(const LinearMeasurements& meas);
LinearMeasurements measurements_from_json(const Json& j);

/// {"observed", "latent_count", "edges": [["src", "dst"], ...]} with latent
/// nodes named L0..L{m-1}.
Json to_json(const UnobservedNetwork& network);
UnobservedNetwork network_from_json(const Json& j);

struct NamedModel {
  LatentVarModel model;
  std::vector<std::string> names;
};
Json to_json(const LatentVarModel& model, const std::vector<std::string>& names);
NamedModel model_from_json(const Json& j);
/// True when `j` looks like a model document rather than a network.
bool is_model_json(const Json& j);

Json to_json(const EstimationReport& report);

/// Observed nodes as filled boxes, latent nodes as dashed circles.
std::string to_dot(const UnobservedNetwork& network, const std::string& graph_name = "network");

Json parse_json(std::istream& in, const std::string& source);

}  // namespace lvar::cli
