#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "lvar/errors.hpp"
#include "lvar/estimate.hpp"
#include "lvar/recover.hpp"
#include "lvar/simulate.hpp"
#include "serialize.hpp"

namespace lvar::cli {

namespace {

/// File-system problems are input errors.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

/// Writes `text` to `path`, or to `out` when the path is empty or "-".
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  file << text;
  if (!file) throw IoError("failed writing '" + path + "'");
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

TimeSeriesPanel load_panel(const std::string& path) {
  auto in = open_input(path);
  return read_csv(in);
}

Json load_json(const std::string& path) {
  auto in = open_input(path);
  return parse_json(in, path);
}

// --- option sets -----------------------------------------------------------

struct SimulateOptions {
  DrgConfig drg;
  double p_obs = -1.0;
  int t_len = 1000;
  int burn_in = kDefaultBurnIn;
  std::string model_path;
  std::string panel_path;
};

struct EstimateOptions {
  std::string panel_path;
  int lag = 0;
  int lag_max = 4;
  LagCriterion criterion = LagCriterion::Aic;
  double alpha = 0.05;
  double rho12 = 0.0;
  double rho22 = 0.0;
  double sigma_z2_max = 0.0;
  std::vector<double> a_min;
  std::string measurements_path;
  std::string report_path;
  CLI::Option* lag_option = nullptr;
  CLI::Option* prior_options[3] = {nullptr, nullptr, nullptr};
};

enum class Mode { Tree, Dtr, Nm };

struct RecoverOptions {
  std::string measurements_path;
  Mode mode = Mode::Dtr;
  int cap = kDefaultMergeCap;
  unsigned threads = 1;
  std::string out_path;
  std::string dot_path;
};

struct CensusOptions {
  std::string input_path;
  int max_len = 0;
  std::string out_path;
};

void add_estimate_options(CLI::App& sub, EstimateOptions& o) {
  sub.add_option("--panel", o.panel_path, "CSV panel: header of series names, one row per time step")
      ->required()
      ->check(CLI::ExistingFile);
  o.lag_option = sub.add_option("--lag", o.lag, "Fixed lag l (skips lag selection)")
                     ->check(CLI::NonNegativeNumber);
  sub.add_option("--lag-max", o.lag_max, "Largest lag considered by lag selection")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  const std::map<std::string, LagCriterion> criteria{{"aic", LagCriterion::Aic},
                                                    {"fpe", LagCriterion::Fpe}};
  sub.add_option("--criterion", o.criterion, "Lag selection criterion")
      ->transform(CLI::CheckedTransformer(criteria, CLI::ignore_case))
      ->default_str("aic");
  sub.add_option("--alpha", o.alpha, "Significance level of the entrywise z-test")
      ->capture_default_str();
  o.prior_options[0] = sub.add_option("--rho12", o.rho12, "Prior bound on ||A12||_2");
  o.prior_options[1] = sub.add_option("--rho22", o.rho22, "Prior bound on ||A22||_2 (< 1)");
  o.prior_options[2] =
      sub.add_option("--sigma-z2-max", o.sigma_z2_max, "Prior bound on the latent noise variance");
  sub.add_option("--a-min", o.a_min, "Per-lag minimum nonzero magnitude of A*_k")->delimiter(',');
  sub.add_option("--measurements", o.measurements_path,
                 "Output path of the measurements JSON (default: stdout)");
  sub.add_option("--report", o.report_path, "Output path of the estimation report JSON");
}

std::optional<BoundPriors> priors_of(const EstimateOptions& o) {
  const int given = static_cast<int>(std::count_if(std::begin(o.prior_options),
                                                   std::end(o.prior_options),
                                                   [](CLI::Option* opt) { return opt->count() > 0; }));
  if (given == 0) {
    if (!o.a_min.empty()) {
      throw Error(ErrorKind::InvalidArgument, "--a-min needs --rho12, --rho22 and --sigma-z2-max");
    }
    return std::nullopt;
  }
  if (given != 3) {
    throw Error(ErrorKind::InvalidArgument,
                "--rho12, --rho22 and --sigma-z2-max must be given together");
  }
  BoundPriors priors{o.rho12, o.rho22, o.sigma_z2_max, o.a_min};
  priors.validate();
  return priors;
}

struct Estimate {
  EstimationReport report;
  LinearMeasurements measurements{0};
  Json lag_selection;
};

Estimate run_estimation(const EstimateOptions& o) {
  const auto priors = priors_of(o);
  const TimeSeriesPanel panel = load_panel(o.panel_path);
  Estimate result;
  int lag = o.lag;
  if (o.lag_option->count() == 0) {
    const auto values = lag_criterion_values(panel, o.lag_max, o.criterion);
    lag = select_lag(panel, o.lag_max, o.criterion);
    result.lag_selection = Json{{"criterion", o.criterion == LagCriterion::Aic ? "aic" : "fpe"},
                                {"lag_max", o.lag_max},
                                {"values", values}};
  } else {
    result.lag_selection = Json{{"criterion", "fixed"}, {"lag", lag}};
  }
  result.report = fit_coefficients(panel, lag);
  result.measurements = extract_support(result.report, o.alpha, priors);
  return result;
}

Json report_json(const Estimate& e) {
  Json j = to_json(e.report);
  j["lag_selection"] = e.lag_selection;
  return j;
}

void add_recover_options(CLI::App& sub, RecoverOptions& o, bool with_input) {
  if (with_input) {
    sub.add_option("--measurements", o.measurements_path, "Measurements JSON")
        ->required()
        ->check(CLI::ExistingFile);
  }
  const std::map<std::string, Mode> modes{{"tree", Mode::Tree}, {"dtr", Mode::Dtr}, {"nm", Mode::Nm}};
  sub.add_option("--mode", o.mode, "Recovery algorithm: tree, dtr or nm")
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case))
      ->default_str("dtr");
  sub.add_option("--cap", o.cap, "Largest initial latent count accepted by node merging")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub.add_option("--threads", o.threads, "Worker threads for node merging (0 = all cores)")
      ->capture_default_str();
  sub.add_option("--out", o.out_path, "Output JSON path (default: stdout)");
  sub.add_option("--dot", o.dot_path, "Also write the recovered network(s) as Graphviz DOT");
}

std::vector<UnobservedNetwork> recover_networks(const LinearMeasurements& meas,
                                                const RecoverOptions& o) {
  switch (o.mode) {
    case Mode::Tree:
      return {recover_tree(meas, o.cap)};
    case Mode::Dtr:
      return {dtr(meas)};
    case Mode::Nm:
      return nm(meas, NmOptions{o.cap, o.threads});
  }
  return {};
}

const char* mode_name(Mode mode) {
  switch (mode) {
    case Mode::Tree:
      return "tree";
    case Mode::Dtr:
      return "dtr";
    case Mode::Nm:
      return "nm";
  }
  return "";
}

void write_dot(const std::string& path, const std::vector<UnobservedNetwork>& networks,
               std::ostream& out) {
  if (path.empty()) return;
  std::string text;
  for (std::size_t i = 0; i < networks.size(); ++i) {
    text += to_dot(networks[i], networks.size() == 1 ? "network" : "network_" + std::to_string(i));
  }
  emit(path, text, out);
}

// --- commands --------------------------------------------------------------

void cmd_simulate(SimulateOptions& o, std::ostream& out) {
  if (o.p_obs >= 0.0) o.drg.p_obs = o.p_obs;
  o.drg.validate();
  if (o.t_len < 1) throw Error(ErrorKind::InvalidArgument, "--T must be at least 1");
  if (o.burn_in < 0) throw Error(ErrorKind::InvalidArgument, "--burn-in must be non-negative");
  const LatentVarModel model = gen_drg(o.drg);
  // The noise stream is seeded independently of the structure stream.
  const TimeSeriesPanel panel = simulate(model, o.t_len, o.burn_in, o.drg.seed ^ 0x9E3779B97F4A7C15ULL);
  std::ostringstream csv;
  write_csv(csv, panel);
  emit(o.model_path, dump(to_json(model, panel.names)), out);
  emit(o.panel_path, csv.str(), out);
}

void cmd_estimate(const EstimateOptions& o, std::ostream& out) {
  const Estimate e = run_estimation(o);
  emit(o.measurements_path, dump(to_json(e.measurements)), out);
  if (!o.report_path.empty()) emit(o.report_path, dump(report_json(e)), out);
}

void cmd_recover(const RecoverOptions& o, std::ostream& out) {
  const LinearMeasurements meas = measurements_from_json(load_json(o.measurements_path));
  const auto networks = recover_networks(meas, o);
  Json j;
  if (o.mode == Mode::Nm) {
    j = Json::array();
    for (const auto& g : networks) j.push_back(to_json(g));
  } else {
    j = to_json(networks.front());
  }
  emit(o.out_path, dump(j), out);
  write_dot(o.dot_path, networks, out);
}

void cmd_pipeline(const EstimateOptions& e, const RecoverOptions& r, std::ostream& out) {
  const Estimate est = run_estimation(e);
  const auto networks = recover_networks(est.measurements, r);
  Json list = Json::array();
  for (const auto& g : networks) list.push_back(to_json(g));
  const Json bundle{{"report", report_json(est)},
                    {"measurements", to_json(est.measurements)},
                    {"mode", mode_name(r.mode)},
                    {"networks", std::move(list)}};
  emit(r.out_path, dump(bundle), out);
  write_dot(r.dot_path, networks, out);
}

void cmd_census(const CensusOptions& o, std::ostream& out) {
  const Json j = load_json(o.input_path);
  LinearMeasurements meas(0);
  if (is_model_json(j)) {
    const NamedModel named = model_from_json(j);
    const LinearMeasurements exact = true_linear_measurements(named.model);
    meas = LinearMeasurements(exact.observed_count(), exact.supports(), named.names);
  } else {
    const UnobservedNetwork network = network_from_json(j);
    meas = o.max_len > 0 ? path_census(network, o.max_len) : path_census(network);
  }
  emit(o.out_path, dump(to_json(meas)), out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structure learning for vector autoregressions with latent processes", "lvar"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file supplying option values; flags override it");
  app.set_version_flag("--version", "lvar 0.1.0");

  SimulateOptions sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Draw a DRG(p, q) model and simulate a panel");
  simulate_cmd->add_option("--n", sim.drg.n, "Observed node count")->required()->check(CLI::NonNegativeNumber);
  simulate_cmd->add_option("--m", sim.drg.m, "Latent node count")->required()->check(CLI::NonNegativeNumber);
  simulate_cmd->add_option("--p", sim.drg.p, "Observed<->latent link probability")->capture_default_str();
  simulate_cmd->add_option("--q", sim.drg.q, "Latent->latent link probability")->capture_default_str();
  simulate_cmd->add_option("--p-obs", sim.p_obs, "Observed->observed link probability (default: p)");
  simulate_cmd->add_option("--a", sim.drg.a, "Weights are uniform on [-a, a]")->capture_default_str();
  simulate_cmd->add_option("--sigma-x2", sim.drg.sigma_x2, "Observed noise variance")->capture_default_str();
  simulate_cmd->add_option("--sigma-z2", sim.drg.sigma_z2, "Latent noise variance")->capture_default_str();
  simulate_cmd->add_option("-T,--T,--length", sim.t_len, "Number of samples")->capture_default_str();
  simulate_cmd->add_option("--burn-in", sim.burn_in, "Discarded leading samples")->capture_default_str();
  simulate_cmd->add_option("--seed", sim.drg.seed, "Random seed")->envname("LVL_SEED")->capture_default_str();
  simulate_cmd->add_option("--model", sim.model_path, "Output path of the model JSON")->required();
  simulate_cmd->add_option("--panel", sim.panel_path, "Output path of the panel CSV")->required();

  EstimateOptions est;
  auto* estimate_cmd =
      app.add_subcommand("estimate", "Estimate linear measurements from an observed panel");
  add_estimate_options(*estimate_cmd, est);

  RecoverOptions rec;
  auto* recover_cmd =
      app.add_subcommand("recover", "Reconstruct unobserved networks from linear measurements");
  add_recover_options(*recover_cmd, rec, true);

  EstimateOptions pipe_est;
  RecoverOptions pipe_rec;
  auto* pipeline_cmd = app.add_subcommand("pipeline", "Estimate then recover in one run");
  add_estimate_options(*pipeline_cmd, pipe_est);
  pipeline_cmd->remove_option(pipeline_cmd->get_option("--measurements"));
  pipeline_cmd->remove_option(pipeline_cmd->get_option("--report"));
  add_recover_options(*pipeline_cmd, pipe_rec, false);

  CensusOptions cen;
  auto* census_cmd =
      app.add_subcommand("census", "Exact linear measurements of a model or network JSON");
  census_cmd->add_option("--input", cen.input_path, "Model or network JSON")
      ->required()
      ->check(CLI::ExistingFile);
  census_cmd->add_option("--max-len", cen.max_len, "Longest latent path length counted (default: all)")
      ->check(CLI::NonNegativeNumber);
  census_cmd->add_option("--out", cen.out_path, "Output JSON path (default: stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*simulate_cmd) cmd_simulate(sim, out);
    if (*estimate_cmd) cmd_estimate(est, out);
    if (*recover_cmd) cmd_recover(rec, out);
    if (*pipeline_cmd) cmd_pipeline(pipe_est, pipe_rec, out);
    if (*census_cmd) cmd_census(cen, out);
  } catch (const Error& e) {
    err << "lvar: error: " << e.what() << "\n";
    return e.kind() == ErrorKind::InvalidArgument ? kExitInput : kExitAlgorithm;
  } catch (const IoError& e) {
    err << "lvar: error: " << e.what() << "\n";
    return kExitInput;
  } catch (const nlohmann::json::exception& e) {
    err << "lvar: error: malformed JSON: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}

}  // namespace lvar::cli
