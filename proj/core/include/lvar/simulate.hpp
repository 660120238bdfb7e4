#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lvar/model.hpp"

namespace lvar {

/// Directed random graph family DRG(p, q) over n observed and m latent nodes.
struct DrgConfig {
  int n = 0;
  int m = 0;
  double p = 0.4;                ///< each observed->latent and latent->observed link
  double q = 0.4;                ///< each latent->latent link (below a random topological order)
  std::optional<double> p_obs;   ///< each observed->observed link; defaults to p
  double a = 0.1;                ///< nonzero weights are uniform on [-a, a]
  double sigma_x2 = 1.0;
  double sigma_z2 = 1.0;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument on out-of-range parameters.
  void validate() const;
};

/// Observed series, rows time-ascending.
struct TimeSeriesPanel {
  std::vector<std::string> names;
  Matrix data;  // T x n

  int length() const { return static_cast<int>(data.rows()); }
  int series_count() const { return static_cast<int>(data.cols()); }
  void validate() const;
};

inline constexpr int kDefaultBurnIn = 500;
inline constexpr double kStationaryRadius = 0.95;

LatentVarModel gen_drg(const DrgConfig& cfg);

/// Iterates the joint VAR with Gaussian noise and returns the observed
/// coordinates after discarding `burn_in` leading samples.
TimeSeriesPanel simulate(const LatentVarModel& model, int t_len, int burn_in, std::uint64_t seed,
                         std::vector<std::string> names = {});

/// Stationary covariance Gamma = A Gamma A' + Sigma of the joint process.
Matrix population_covariance(const LatentVarModel& model);

/// Population autocovariances gamma_X(h) = E[X(t) X(t-h)'] for h = 0..max_lag.
std::vector<Matrix> population_autocovariances(const LatentVarModel& model, int max_lag);

struct MlRatio {
  double m = 0.0;  ///< largest eigenvalue of the latent noise covariance
  double l = 0.0;  ///< smallest eigenvalue of the observed stationary covariance

  double ratio() const { return m / l; }
};

MlRatio compute_ml_ratio(const LatentVarModel& model);

}  // namespace lvar
