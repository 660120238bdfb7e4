#include "lvar/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

#include "lvar/errors.hpp"

namespace lvar {

namespace {

void require_probability(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, std::string(name) + " must lie in [0, 1]");
  }
}

void require_stationary(const LatentVarModel& model) {
  const double rho = model.spectral_radius();
  if (!(rho < 1.0)) {
    throw Error(ErrorKind::NonStationary,
                "spectral radius " + std::to_string(rho) + " is not below 1");
  }
}

}  // namespace

void DrgConfig::validate() const {
  if (n < 0 || m < 0) throw Error(ErrorKind::InvalidArgument, "node counts must be non-negative");
  require_probability(p, "p");
  require_probability(q, "q");
  require_probability(p_obs.value_or(p), "p_obs");
  if (!(a > 0.0)) throw Error(ErrorKind::InvalidArgument, "a must be positive");
  if (!(sigma_x2 > 0.0) || !(sigma_z2 > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "noise variances must be positive");
  }
}

void TimeSeriesPanel::validate() const {
  if (data.rows() < 1) throw Error(ErrorKind::InsufficientData, "panel has no samples");
  if (static_cast<int>(names.size()) != series_count()) {
    throw Error(ErrorKind::InvalidArgument, "panel names do not match column count");
  }
  if (!data.allFinite()) throw Error(ErrorKind::InvalidArgument, "panel has non-finite entries");
}

LatentVarModel gen_drg(const DrgConfig& cfg) {
  cfg.validate();
  const int n = cfg.n;
  const int m = cfg.m;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> weight(-cfg.a, cfg.a);
  auto draw_weight = [&] {
    double w = 0.0;
    while (w == 0.0) w = weight(rng);
    return w;
  };
  std::bernoulli_distribution obs_link(cfg.p_obs.value_or(cfg.p));
  std::bernoulli_distribution cross_link(cfg.p);
  std::bernoulli_distribution latent_link(cfg.q);

  LatentVarModel model;
  model.blocks = BlockTransitionMatrix::zeros(n, m);
  model.sigma_x2 = cfg.sigma_x2;
  model.sigma_z2 = cfg.sigma_z2;
  auto& b = model.blocks;

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (obs_link(rng)) b.a11(i, j) = draw_weight();
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int h = 0; h < m; ++h) {
      if (cross_link(rng)) b.a12(i, h) = draw_weight();
    }
  }
  for (int h = 0; h < m; ++h) {
    for (int i = 0; i < n; ++i) {
      if (cross_link(rng)) b.a21(h, i) = draw_weight();
    }
  }
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  for (int u = 0; u < m; ++u) {
    for (int v = u + 1; v < m; ++v) {
      if (latent_link(rng)) b.a22(order[v], order[u]) = draw_weight();
    }
  }

  const double rho = model.spectral_radius();
  if (rho >= 1.0) {
    const double scale = kStationaryRadius / rho;
    b.a11 *= scale;
    b.a12 *= scale;
    b.a21 *= scale;
    b.a22 *= scale;
  }
  return model;
}

TimeSeriesPanel simulate(const LatentVarModel& model, int t_len, int burn_in, std::uint64_t seed,
                         std::vector<std::string> names) {
  if (t_len < 1) throw Error(ErrorKind::InvalidArgument, "series length must be positive");
  if (burn_in < 0) throw Error(ErrorKind::InvalidArgument, "burn-in must be non-negative");
  require_stationary(model);
  const int n = model.observed_count();
  const int m = model.latent_count();
  if (names.empty()) {
    for (int i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
  }

  const Matrix a = model.transition();
  Vector scale(n + m);
  scale.head(n).setConstant(std::sqrt(model.sigma_x2));
  scale.tail(m).setConstant(std::sqrt(model.sigma_z2));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector state = Vector::Zero(n + m);
  Vector noise(n + m);

  TimeSeriesPanel panel{std::move(names), Matrix(t_len, n)};
  for (int t = 0; t < burn_in + t_len; ++t) {
    for (int k = 0; k < n + m; ++k) noise(k) = scale(k) * gauss(rng);
    state = a * state + noise;
    if (t >= burn_in) panel.data.row(t - burn_in) = state.head(n).transpose();
  }
  return panel;
}

Matrix population_covariance(const LatentVarModel& model) {
  require_stationary(model);
  const Matrix a = model.transition();
  const Matrix sigma = model.noise_covariance();
  if (a.size() == 0) return sigma;

  // Doubling form of the fixed point Gamma <- A Gamma A' + Sigma:
  // Gamma_{k+1} = Gamma_k + A^(2^k) Gamma_k A^(2^k)'.
  Matrix gamma = sigma;
  Matrix power = a;
  for (int iter = 0; iter < 200; ++iter) {
    Matrix next = gamma + power * gamma * power.transpose();
    const double change = (next - gamma).cwiseAbs().maxCoeff();
    gamma = std::move(next);
    power = power * power;
    if (change < 1e-12 || power.cwiseAbs().maxCoeff() == 0.0) break;
  }
  // Plain fixed-point sweeps to settle the last ulps.
  for (int iter = 0; iter < 1000; ++iter) {
    Matrix next = a * gamma * a.transpose() + sigma;
    const double change = (next - gamma).cwiseAbs().maxCoeff();
    gamma = std::move(next);
    if (change < 1e-12) break;
  }
  return 0.5 * (gamma + gamma.transpose());
}

std::vector<Matrix> population_autocovariances(const LatentVarModel& model, int max_lag) {
  if (max_lag < 0) throw Error(ErrorKind::InvalidArgument, "max_lag must be non-negative");
  const int n = model.observed_count();
  const Matrix a = model.transition();
  Matrix lagged = population_covariance(model);  // A^h Gamma
  std::vector<Matrix> out;
  out.reserve(max_lag + 1);
  for (int h = 0; h <= max_lag; ++h) {
    out.push_back(lagged.topLeftCorner(n, n));
    lagged = a * lagged;
  }
  return out;
}

MlRatio compute_ml_ratio(const LatentVarModel& model) {
  const Matrix gamma = population_covariance(model);
  const int n = model.observed_count();
  MlRatio out;
  out.m = model.latent_count() > 0 ? model.sigma_z2 : 0.0;
  if (n > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(gamma.topLeftCorner(n, n), Eigen::EigenvaluesOnly);
    out.l = solver.eigenvalues().minCoeff();
  }
  return out;
}

}  // namespace lvar
