#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lvar/model.hpp"
#include "lvar/simulate.hpp"

namespace lvar {

enum class LagCriterion { Aic, Fpe };

/// Prior bounds used to evaluate the latent-interference bound from data:
/// ||A12||_2 <= rho12, ||A22||_2 <= rho22 < 1, latent noise variance <=
/// sigma_z2_max, and |nonzero entries of A*_k| >= a_min[k].
struct BoundPriors {
  double rho12 = 0.0;
  double rho22 = 0.0;
  double sigma_z2_max = 0.0;
  std::vector<double> a_min;

  void validate() const;
};

/// Coefficients of the regression of X(t+1) on [X(t); ...; X(t-l)].
struct CoefficientFit {
  std::vector<Matrix> b_hat;  ///< B_0..B_l, each n x n
  Matrix residual_cov;
  Matrix toeplitz_inverse;    ///< inverse of the (possibly ridged) block Toeplitz matrix
  bool ridge_applied = false;
};

struct EstimationReport {
  int lag = 0;
  int sample_size = 0;
  std::vector<Matrix> b_hat;
  std::vector<Matrix> entry_stderr;
  Matrix residual_cov;
  bool ridge_applied = false;
  /// Smallest eigenvalue of the lag-0 sample autocovariance.
  double gamma0_min_eigenvalue = 0.0;
  std::vector<std::string> names;

  // Filled by extract_support.
  double alpha = 0.05;
  std::optional<BoundPriors> priors;
  std::vector<double> bounds;        ///< per-k latent-interference bound; empty without priors
  std::vector<bool> recoverable;     ///< per-k recoverability_check; empty without a_min
  std::optional<LinearMeasurements> supports;
};

/// Biased (1/T) sample autocovariance of the mean-centred panel at lag h.
Matrix autocov(const TimeSeriesPanel& panel, int h);
/// autocov(panel, 0..max_lag), centring once.
std::vector<Matrix> autocovariances(const TimeSeriesPanel& panel, int max_lag);

/// Covariance of the stacked regressor [X(t); X(t-1); ...; X(t-l)]: block
/// (r, c) is gamma(c - r) for r <= c and gamma(r - c)' otherwise.
Matrix block_toeplitz(std::span<const Matrix> gammas, int l);

/// B = [gamma(1), ..., gamma(l+1)] * Gamma(l)^-1 with residual covariance
/// gamma(0) - B [gamma(1), ..., gamma(l+1)]'. Needs gammas 0..l+1. A ridge of
/// 1e-8 trace/dim is added when the condition number reaches 1e12.
CoefficientFit fit_from_autocovariances(std::span<const Matrix> gammas, int l);

/// Sample fit at lag l with residual covariance from the in-sample residuals
/// and entry standard errors from (Gamma^-1 kron Sigma) / T.
EstimationReport fit_coefficients(const TimeSeriesPanel& panel, int l);

/// Criterion value for every candidate lag 1..l_max.
std::vector<double> lag_criterion_values(const TimeSeriesPanel& panel, int l_max,
                                         LagCriterion criterion);
/// Argmin over 1..l_max; the smallest lag wins ties.
int select_lag(const TimeSeriesPanel& panel, int l_max, LagCriterion criterion);

/// sqrt(n (l-k-1) M/L) rho12 rho22^(k+1); zero when k >= l-1.
double prop1_bound(int n, int l, int k, double m_over_l, double rho12, double rho22);

/// 4 n (l-k-1) rho12^2 / a_min_k^2 * rho22^(2(k+1)) <= L / sigma_z2_max.
bool recoverability_check(const BoundPriors& priors, int n, int l, int k, double l_hat);

/// Two-sided z-test on every entry of B_k at level alpha, conjoined with the
/// magnitude bound when priors are supplied. Records alpha, bounds and the
/// supports in `report`.
LinearMeasurements extract_support(EstimationReport& report, double alpha = 0.05,
                                   const std::optional<BoundPriors>& priors = std::nullopt);

/// Upper quantile z_{1 - alpha/2} of the standard normal.
double two_sided_critical_value(double alpha);

}  // namespace lvar
