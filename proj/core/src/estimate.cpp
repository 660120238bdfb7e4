#include "lvar/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <boost/math/distributions/normal.hpp>

#include "lvar/errors.hpp"

namespace lvar {

namespace {

constexpr double kMaxCondition = 1e12;
constexpr double kRidgeScale = 1e-8;

Matrix centred(const TimeSeriesPanel& panel) {
  const Eigen::RowVectorXd mean = panel.data.colwise().mean();
  return panel.data.rowwise() - mean;
}

Matrix lagged_product(const Matrix& x, int h) {
  const int t_len = static_cast<int>(x.rows());
  // sum_{t=h}^{T-1} x(t) x(t-h)' / T
  return x.bottomRows(t_len - h).transpose() * x.topRows(t_len - h) / static_cast<double>(t_len);
}

bool well_conditioned(const Matrix& sym, double* min_eig) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  const double lo = solver.eigenvalues().minCoeff();
  const double hi = solver.eigenvalues().maxCoeff();
  if (min_eig != nullptr) *min_eig = lo;
  return lo > 0.0 && hi / lo < kMaxCondition;
}

}  // namespace

void BoundPriors::validate() const {
  if (!(rho22 > 0.0 && rho22 < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "rho22 must lie in (0, 1)");
  }
  if (!(rho12 > 0.0) || !(sigma_z2_max > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "rho12 and sigma_z2_max must be positive");
  }
  for (double v : a_min) {
    if (!(v > 0.0)) throw Error(ErrorKind::InvalidArgument, "a_min entries must be positive");
  }
}

Matrix autocov(const TimeSeriesPanel& panel, int h) {
  if (h < 0) throw Error(ErrorKind::InvalidArgument, "negative lag");
  if (panel.length() <= h) {
    throw Error(ErrorKind::InsufficientData, "lag " + std::to_string(h) + " needs more than " +
                                                 std::to_string(panel.length()) + " samples");
  }
  return lagged_product(centred(panel), h);
}

std::vector<Matrix> autocovariances(const TimeSeriesPanel& panel, int max_lag) {
  if (max_lag < 0) throw Error(ErrorKind::InvalidArgument, "negative lag");
  if (panel.length() <= max_lag) {
    throw Error(ErrorKind::InsufficientData, "lag " + std::to_string(max_lag) +
                                                 " needs more than " +
                                                 std::to_string(panel.length()) + " samples");
  }
  const Matrix x = centred(panel);
  std::vector<Matrix> out;
  out.reserve(max_lag + 1);
  for (int h = 0; h <= max_lag; ++h) out.push_back(lagged_product(x, h));
  return out;
}

Matrix block_toeplitz(std::span<const Matrix> gammas, int l) {
  if (l < 0 || static_cast<int>(gammas.size()) < l + 1) {
    throw Error(ErrorKind::InvalidArgument, "block_toeplitz needs gammas 0..l");
  }
  const auto n = gammas[0].rows();
  Matrix out(n * (l + 1), n * (l + 1));
  for (int r = 0; r <= l; ++r) {
    for (int c = 0; c <= l; ++c) {
      out.block(r * n, c * n, n, n) = r <= c ? gammas[c - r] : Matrix(gammas[r - c].transpose());
    }
  }
  return out;
}

CoefficientFit fit_from_autocovariances(std::span<const Matrix> gammas, int l) {
  if (l < 0 || static_cast<int>(gammas.size()) < l + 2) {
    throw Error(ErrorKind::InvalidArgument, "fit needs autocovariances 0..l+1");
  }
  const auto n = gammas[0].rows();
  Matrix big = block_toeplitz(gammas, l);
  const auto dim = big.rows();

  CoefficientFit fit;
  if (!well_conditioned(big, nullptr)) {
    const double eps = kRidgeScale * big.trace() / static_cast<double>(dim);
    big.diagonal().array() += eps;
    fit.ridge_applied = true;
    if (!(eps > 0.0) || !well_conditioned(big, nullptr)) {
      throw Error(ErrorKind::SingularCovariance,
                  "lagged covariance is singular even after ridge regularisation");
    }
  }
  fit.toeplitz_inverse = big.ldlt().solve(Matrix::Identity(dim, dim));
  fit.toeplitz_inverse = 0.5 * (fit.toeplitz_inverse + fit.toeplitz_inverse.transpose());

  Matrix cross(n, dim);  // [gamma(1), ..., gamma(l+1)]
  for (int k = 0; k <= l; ++k) cross.middleCols(k * n, n) = gammas[k + 1];
  const Matrix b = cross * fit.toeplitz_inverse;
  for (int k = 0; k <= l; ++k) fit.b_hat.push_back(b.middleCols(k * n, n));
  fit.residual_cov = gammas[0] - b * cross.transpose();
  fit.residual_cov = 0.5 * (fit.residual_cov + fit.residual_cov.transpose());
  return fit;
}

EstimationReport fit_coefficients(const TimeSeriesPanel& panel, int l) {
  panel.validate();
  if (l < 0) throw Error(ErrorKind::InvalidArgument, "negative lag");
  const int t_len = panel.length();
  const int n = panel.series_count();
  if (t_len < l + 3) {
    throw Error(ErrorKind::InsufficientData,
                "lag " + std::to_string(l) + " needs at least " + std::to_string(l + 3) +
                    " samples");
  }
  const auto gammas = autocovariances(panel, l + 1);
  CoefficientFit fit = fit_from_autocovariances(gammas, l);

  EstimationReport report;
  report.lag = l;
  report.sample_size = t_len;
  report.names = panel.names;
  report.ridge_applied = fit.ridge_applied;
  {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(gammas[0], Eigen::EigenvaluesOnly);
    report.gamma0_min_eigenvalue = n > 0 ? solver.eigenvalues().minCoeff() : 0.0;
  }

  // In-sample residuals x(t+1) - B [x(t); ...; x(t-l)], t = l..T-2.
  const Matrix x = centred(panel);
  const int samples = t_len - l - 1;
  Matrix predicted = Matrix::Zero(samples, n);
  for (int k = 0; k <= l; ++k) {
    predicted += x.middleRows(l - k, samples) * fit.b_hat[k].transpose();
  }
  const Matrix resid = x.bottomRows(samples) - predicted;
  report.residual_cov = resid.transpose() * resid / static_cast<double>(samples);

  for (int k = 0; k <= l; ++k) {
    Matrix se(n, n);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const int c = k * n + i;
        se(j, i) = std::sqrt(std::max(0.0, fit.toeplitz_inverse(c, c) * report.residual_cov(j, j) /
                                               static_cast<double>(t_len)));
      }
    }
    report.entry_stderr.push_back(std::move(se));
  }
  report.b_hat = std::move(fit.b_hat);
  return report;
}

std::vector<double> lag_criterion_values(const TimeSeriesPanel& panel, int l_max,
                                         LagCriterion criterion) {
  panel.validate();
  if (l_max < 1) throw Error(ErrorKind::InvalidArgument, "l_max must be at least 1");
  const int n = panel.series_count();
  const double t_len = panel.length();
  if (!(static_cast<double>(l_max) * n < t_len / 2.0)) {
    throw Error(ErrorKind::InsufficientData, "l_max * n must stay below T / 2");
  }
  std::vector<double> values;
  for (int l = 1; l <= l_max; ++l) {
    const auto report = fit_coefficients(panel, l);
    const double det = report.residual_cov.determinant();
    if (criterion == LagCriterion::Aic) {
      values.push_back(std::log(det) + 2.0 * l * n * n / t_len);
    } else {
      const double nl = static_cast<double>(n) * l;
      values.push_back(std::pow((t_len + nl + 1.0) / (t_len - nl - 1.0), n) * det);
    }
  }
  return values;
}

int select_lag(const TimeSeriesPanel& panel, int l_max, LagCriterion criterion) {
  const auto values = lag_criterion_values(panel, l_max, criterion);
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i) {
    if (values[i] < values[best]) best = i;
  }
  return best + 1;
}

double prop1_bound(int n, int l, int k, double m_over_l, double rho12, double rho22) {
  const int depth = std::max(0, l - k - 1);
  return std::sqrt(static_cast<double>(n) * depth * m_over_l) * rho12 * std::pow(rho22, k + 1);
}

bool recoverability_check(const BoundPriors& priors, int n, int l, int k, double l_hat) {
  const int depth = std::max(0, l - k - 1);
  if (depth == 0 || priors.rho12 == 0.0) return true;
  const double a_min = k < static_cast<int>(priors.a_min.size())
                           ? priors.a_min[k]
                           : std::numeric_limits<double>::infinity();
  const double lhs = 4.0 * n * depth * priors.rho12 * priors.rho12 / (a_min * a_min) *
                     std::pow(priors.rho22, 2 * (k + 1));
  return lhs <= l_hat / priors.sigma_z2_max;
}

double two_sided_critical_value(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");
  }
  return boost::math::quantile(boost::math::normal_distribution<double>(), 1.0 - alpha / 2.0);
}

LinearMeasurements extract_support(EstimationReport& report, double alpha,
                                   const std::optional<BoundPriors>& priors) {
  const double z = two_sided_critical_value(alpha);
  const int l = report.lag;
  const int n = report.b_hat.empty() ? 0 : static_cast<int>(report.b_hat[0].rows());

  report.alpha = alpha;
  report.priors = priors;
  report.bounds.clear();
  report.recoverable.clear();
  if (priors) {
    priors->validate();
    const double m_over_l = priors->sigma_z2_max / report.gamma0_min_eigenvalue;
    for (int k = 0; k <= l; ++k) {
      report.bounds.push_back(prop1_bound(n, l, k, m_over_l, priors->rho12, priors->rho22));
    }
    if (!priors->a_min.empty()) {
      for (int k = 0; k <= l; ++k) {
        report.recoverable.push_back(
            recoverability_check(*priors, n, l, k, report.gamma0_min_eigenvalue));
      }
    }
  }

  std::vector<Support> supports;
  for (int k = 0; k <= l; ++k) {
    Support s = Support::Zero(n, n);
    const Matrix& b = report.b_hat[k];
    const Matrix& se = report.entry_stderr[k];
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const double mag = std::abs(b(j, i));
        bool keep = se(j, i) > 0.0 ? mag / se(j, i) > z : mag > 0.0;
        if (priors) keep = keep && mag > report.bounds[k];
        s(j, i) = keep ? 1 : 0;
      }
    }
    supports.push_back(std::move(s));
  }
  LinearMeasurements meas(n, std::move(supports), report.names);
  report.supports = meas;
  return meas;
}

}  // namespace lvar
