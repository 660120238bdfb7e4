#include "serialize.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "lvar/errors.hpp"

namespace lvar::cli {

namespace {

[[noreturn]] void input_error(const std::string& what) {
  throw Error(ErrorKind::InvalidArgument, what);
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_double(const std::string& cell, int row, int col) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    input_error("row " + std::to_string(row) + ", column " + std::to_string(col) +
                ": not a finite number: '" + cell + "'");
  }
  return value;
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <class T>
T get_field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) input_error(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    input_error(std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace

TimeSeriesPanel read_csv(std::istream& in) {
  std::string line;
  std::vector<std::string> names;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    names = split_row(line);
    break;
  }
  if (names.empty()) input_error("CSV input is empty");
  if (!names.empty() && names.front().rfind("\xEF\xBB\xBF", 0) == 0) names.front().erase(0, 3);
  for (const auto& name : names) {
    if (name.empty()) input_error("CSV header has an empty series name");
  }

  std::vector<std::vector<double>> rows;
  int row_number = 1;
  while (std::getline(in, line)) {
    ++row_number;
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    if (cells.size() != names.size()) {
      input_error("row " + std::to_string(row_number) + " has " + std::to_string(cells.size()) +
                  " fields, header has " + std::to_string(names.size()));
    }
    std::vector<double> values;
    values.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      values.push_back(parse_double(cells[c], row_number, static_cast<int>(c) + 1));
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) input_error("CSV input has no data rows");

  TimeSeriesPanel panel{names, Matrix(rows.size(), names.size())};
  for (std::size_t t = 0; t < rows.size(); ++t) {
    for (std::size_t i = 0; i < names.size(); ++i) panel.data(t, i) = rows[t][i];
  }
  return panel;
}

void write_csv(std::ostream& out, const TimeSeriesPanel& panel) {
  for (std::size_t i = 0; i < panel.names.size(); ++i) {
    out << (i ? "," : "") << panel.names[i];
  }
  out << '\n';
  for (int t = 0; t < panel.length(); ++t) {
    for (int i = 0; i < panel.series_count(); ++i) {
      out << (i ? "," : "") << format_double(panel.data(t, i));
    }
    out << '\n';
  }
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, const char* what) {
  if (!j.is_array()) input_error(std::string(what) + " must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j.at(0).size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j.at(r);
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      input_error(std::string(what) + " rows must have equal length");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!row.at(c).is_number()) input_error(std::string(what) + " entries must be numbers");
      m(r, c) = row.at(c).get<double>();
    }
  }
  return m;
}

Json to_json(const LinearMeasurements& meas) {
  Json supports = Json::array();
  const int n = meas.observed_count();
  for (const auto& s : meas.supports()) {
    Json rows = Json::array();
    for (int r = 0; r < n; ++r) {
      Json row = Json::array();
      for (int c = 0; c < n; ++c) row.push_back(static_cast<int>(s(r, c)));
      rows.push_back(std::move(row));
    }
    supports.push_back(std::move(rows));
  }
  return Json{{"n", n}, {"names", meas.names()}, {"supports", std::move(supports)}};
}

LinearMeasurements measurements_from_json(const Json& j) {
  const int n = get_field<int>(j, "n");
  if (n < 0) input_error("'n' must be non-negative");
  std::vector<std::string> names;
  if (j.contains("names")) names = get_field<std::vector<std::string>>(j, "names");
  const Json& raw = j.contains("supports") ? j.at("supports") : Json();
  if (!raw.is_array()) input_error("'supports' must be a list of matrices");
  std::vector<Support> supports;
  for (const auto& mat : raw) {
    if (!mat.is_array() || static_cast<int>(mat.size()) != n) {
      input_error("every support must be an n x n matrix");
    }
    Support s(n, n);
    for (int r = 0; r < n; ++r) {
      const Json& row = mat.at(r);
      if (!row.is_array() || static_cast<int>(row.size()) != n) {
        input_error("every support must be an n x n matrix");
      }
      for (int c = 0; c < n; ++c) {
        const Json& v = row.at(c);
        if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1)) {
          input_error("support entries must be 0 or 1");
        }
        s(r, c) = static_cast<std::uint8_t>(v.get<int>());
      }
    }
    supports.push_back(std::move(s));
  }
  return LinearMeasurements(n, std::move(supports), std::move(names));
}

Json to_json(const UnobservedNetwork& network) {
  Json edges = Json::array();
  for (const auto& [u, v] : network.edges()) {
    edges.push_back(Json::array({network.node_name(u), network.node_name(v)}));
  }
  return Json{{"observed", network.observed()},
              {"latent_count", network.latent_count()},
              {"edges", std::move(edges)}};
}

UnobservedNetwork network_from_json(const Json& j) {
  auto observed = get_field<std::vector<std::string>>(j, "observed");
  const int m = get_field<int>(j, "latent_count");
  if (m < 0) input_error("'latent_count' must be non-negative");
  UnobservedNetwork network(observed, m);

  std::map<std::string, int> ids;
  for (int i = 0; i < network.observed_count(); ++i) {
    if (!ids.emplace(observed[i], i).second) input_error("duplicate observed name '" + observed[i] + "'");
  }
  for (int k = 0; k < m; ++k) {
    const int id = network.latent_node(k);
    if (!ids.emplace(network.node_name(id), id).second) {
      input_error("observed name '" + network.node_name(id) + "' clashes with a latent node");
    }
  }
  const Json& edges = j.contains("edges") ? j.at("edges") : Json::array();
  if (!edges.is_array()) input_error("'edges' must be a list of [src, dst] pairs");
  for (const auto& e : edges) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
      input_error("'edges' must be a list of [src, dst] pairs");
    }
    const auto u = ids.find(e[0].get<std::string>());
    const auto v = ids.find(e[1].get<std::string>());
    if (u == ids.end() || v == ids.end()) {
      input_error("edge refers to unknown node: " + e.dump());
    }
    network.add_edge(u->second, v->second);
  }
  return network;
}

Json to_json(const LatentVarModel& model, const std::vector<std::string>& names) {
  return Json{{"n", model.observed_count()},
              {"m", model.latent_count()},
              {"names", names},
              {"a11", matrix_to_json(model.blocks.a11)},
              {"a12", matrix_to_json(model.blocks.a12)},
              {"a21", matrix_to_json(model.blocks.a21)},
              {"a22", matrix_to_json(model.blocks.a22)},
              {"sigma_x2", model.sigma_x2},
              {"sigma_z2", model.sigma_z2}};
}

bool is_model_json(const Json& j) { return j.is_object() && j.contains("a11"); }

NamedModel model_from_json(const Json& j) {
  const int n = get_field<int>(j, "n");
  const int m = get_field<int>(j, "m");
  if (n < 0 || m < 0) input_error("'n' and 'm' must be non-negative");
  NamedModel out;
  auto block = [&](const char* key, int rows, int cols) {
    if (!j.contains(key)) input_error(std::string("missing field '") + key + "'");
    Matrix mat = matrix_from_json(j.at(key), key);
    // Empty blocks may be written as [] regardless of their other dimension.
    if (mat.size() == 0 && rows * cols == 0) return Matrix(rows, cols);
    if (mat.rows() != rows || mat.cols() != cols) {
      input_error(std::string("'") + key + "' must be " + std::to_string(rows) + " x " +
                  std::to_string(cols));
    }
    return mat;
  };
  out.model.blocks.a11 = block("a11", n, n);
  out.model.blocks.a12 = block("a12", n, m);
  out.model.blocks.a21 = block("a21", m, n);
  out.model.blocks.a22 = block("a22", m, m);
  out.model.sigma_x2 = j.contains("sigma_x2") ? get_field<double>(j, "sigma_x2") : 1.0;
  out.model.sigma_z2 = j.contains("sigma_z2") ? get_field<double>(j, "sigma_z2") : 1.0;
  if (!(out.model.sigma_x2 > 0.0) || !(out.model.sigma_z2 > 0.0)) {
    input_error("noise variances must be positive");
  }
  out.names = j.contains("names") ? get_field<std::vector<std::string>>(j, "names")
                                  : default_names(n);
  if (static_cast<int>(out.names.size()) != n) input_error("'names' must have n entries");
  return out;
}

Json to_json(const EstimationReport& report) {
  Json b_hat = Json::array();
  Json stderr_json = Json::array();
  for (const auto& b : report.b_hat) b_hat.push_back(matrix_to_json(b));
  for (const auto& s : report.entry_stderr) stderr_json.push_back(matrix_to_json(s));
  Json out{{"lag", report.lag},
           {"sample_size", report.sample_size},
           {"names", report.names},
           {"alpha", report.alpha},
           {"decision_rule", report.priors ? "z-test and latent bound" : "z-test"},
           {"ridge_applied", report.ridge_applied},
           {"gamma0_min_eigenvalue", report.gamma0_min_eigenvalue},
           {"b_hat", std::move(b_hat)},
           {"entry_stderr", std::move(stderr_json)},
           {"residual_cov", matrix_to_json(report.residual_cov)}};
  if (report.priors) {
    out["priors"] = Json{{"rho12", report.priors->rho12},
                         {"rho22", report.priors->rho22},
                         {"sigma_z2_max", report.priors->sigma_z2_max},
                         {"a_min", report.priors->a_min}};
    out["bounds"] = report.bounds;
    if (!report.recoverable.empty()) {
      Json flags = Json::array();
      for (bool b : report.recoverable) flags.push_back(b);
      out["recoverable"] = std::move(flags);
    }
  } else {
    out["priors"] = nullptr;
  }
  out["supports"] = report.supports ? to_json(*report.supports) : Json(nullptr);
  return out;
}

std::string to_dot(const UnobservedNetwork& network, const std::string& graph_name) {
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') q += '\\';
      q += c;
    }
    return q + '"';
  };
  std::ostringstream out;
  out << "digraph " << quote(graph_name) << " {\n";
  for (int id = 0; id < network.node_count(); ++id) {
    out << "  " << quote(network.node_name(id))
        << (network.is_latent(id) ? " [shape=circle, style=dashed];\n"
                                  : " [shape=box, style=filled, fillcolor=lightgray];\n");
  }
  for (const auto& [u, v] : network.edges()) {
    out << "  " << quote(network.node_name(u)) << " -> " << quote(network.node_name(v)) << ";\n";
  }
  out << "}\n";
  return out.str();
}

Json parse_json(std::istream& in, const std::string& source) {
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    input_error(source + ": invalid JSON: " + e.what());
  }
}

}  // namespace lvar::cli
