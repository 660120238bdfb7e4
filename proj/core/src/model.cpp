#include "lvar/model.hpp"

#include <algorithm>
#include <queue>

#include <Eigen/Eigenvalues>

#include "lvar/errors.hpp"

namespace lvar {

namespace {

using IntMatrix = Eigen::MatrixXi;

IntMatrix clamp01(const IntMatrix& m) { return (m.array() > 0).cast<int>(); }

void check_square(const Support& s, int n) {
  if (s.rows() != n || s.cols() != n) {
    throw Error(ErrorKind::InvalidArgument, "support matrix must be " + std::to_string(n) +
                                                "x" + std::to_string(n));
  }
  if ((s.array() > 1).any()) {
    throw Error(ErrorKind::InvalidArgument, "support entries must be 0 or 1");
  }
}

}  // namespace

Support support_of(const Matrix& m, double threshold) {
  return (m.array().abs() > threshold).cast<std::uint8_t>();
}

// --- BlockTransitionMatrix -------------------------------------------------

BlockTransitionMatrix BlockTransitionMatrix::zeros(int n, int m) {
  return {Matrix::Zero(n, n), Matrix::Zero(n, m), Matrix::Zero(m, n), Matrix::Zero(m, m)};
}

void BlockTransitionMatrix::validate() const {
  const auto n = a11.rows();
  const auto m = a22.rows();
  const bool ok = a11.cols() == n && a22.cols() == m && a12.rows() == n && a12.cols() == m &&
                  a21.rows() == m && a21.cols() == n;
  if (!ok) throw Error(ErrorKind::InvalidArgument, "inconsistent transition block shapes");
}

Matrix BlockTransitionMatrix::assemble() const {
  validate();
  const int n = observed_count();
  const int m = latent_count();
  Matrix a(n + m, n + m);
  a.topLeftCorner(n, n) = a11;
  a.topRightCorner(n, m) = a12;
  a.bottomLeftCorner(m, n) = a21;
  a.bottomRightCorner(m, m) = a22;
  return a;
}

// --- LatentVarModel --------------------------------------------------------

Matrix LatentVarModel::noise_covariance() const {
  const int n = observed_count();
  const int m = latent_count();
  Vector diag(n + m);
  diag.head(n).setConstant(sigma_x2);
  diag.tail(m).setConstant(sigma_z2);
  return diag.asDiagonal();
}

double LatentVarModel::spectral_radius() const {
  const Matrix a = transition();
  if (a.size() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> solver(a, /*computeEigenvectors=*/false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

// --- LinearMeasurements ----------------------------------------------------

std::vector<std::string> default_names(int n) {
  std::vector<std::string> names;
  names.reserve(n);
  for (int i = 0; i < n; ++i) names.push_back(std::to_string(i + 1));
  return names;
}

LinearMeasurements::LinearMeasurements(int n)
    : n_(n), supports_{Support::Zero(n, n)}, names_(default_names(n)) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "negative node count");
}

LinearMeasurements::LinearMeasurements(int n, std::vector<Support> supports,
                                       std::vector<std::string> names)
    : n_(n), supports_(std::move(supports)), names_(std::move(names)) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "negative node count");
  if (supports_.empty()) supports_.push_back(Support::Zero(n, n));
  for (const auto& s : supports_) check_square(s, n);
  while (supports_.size() > 1 && (supports_.back().array() == 0).all()) supports_.pop_back();
  if (names_.empty()) names_ = default_names(n);
  if (static_cast<int>(names_.size()) != n) {
    throw Error(ErrorKind::InvalidArgument, "names must have one entry per observed node");
  }
}

Support LinearMeasurements::at_or_zero(int k) const {
  if (k >= 0 && k < size()) return supports_[k];
  return Support::Zero(n_, n_);
}

LinearMeasurements LinearMeasurements::latent_part() const {
  auto supports = supports_;
  supports.front().setZero();
  return LinearMeasurements(n_, std::move(supports), names_);
}

// --- UnobservedNetwork -----------------------------------------------------

UnobservedNetwork::UnobservedNetwork(std::vector<std::string> observed, int latent_count)
    : observed_(std::move(observed)), latent_count_(latent_count) {
  if (latent_count < 0) throw Error(ErrorKind::InvalidArgument, "negative latent count");
}

std::string UnobservedNetwork::node_name(int id) const {
  check_id(id);
  if (!is_latent(id)) return observed_[id];
  return "L" + std::to_string(id - observed_count());
}

void UnobservedNetwork::check_id(int id) const {
  if (id < 0 || id >= node_count()) {
    throw Error(ErrorKind::InvalidArgument, "node id " + std::to_string(id) + " out of range");
  }
}

void UnobservedNetwork::add_edge(int u, int v) {
  check_id(u);
  check_id(v);
  if (u == v && is_latent(u)) {
    throw Error(ErrorKind::InvalidArgument, "self-loop on latent node " + node_name(u));
  }
  edges_.emplace(u, v);
}

bool UnobservedNetwork::remove_edge(int u, int v) { return edges_.erase({u, v}) != 0; }

int UnobservedNetwork::add_latent() { return observed_count() + latent_count_++; }

std::vector<int> UnobservedNetwork::parents(int id) const {
  std::vector<int> out;
  for (const auto& [u, v] : edges_) {
    if (v == id) out.push_back(u);
  }
  return out;
}

std::vector<int> UnobservedNetwork::children(int id) const {
  std::vector<int> out;
  auto it = edges_.lower_bound({id, -1});
  for (; it != edges_.end() && it->first == id; ++it) out.push_back(it->second);
  return out;
}

bool UnobservedNetwork::has_observed_edges() const {
  return std::any_of(edges_.begin(), edges_.end(),
                     [&](const Edge& e) { return !is_latent(e.first) && !is_latent(e.second); });
}

bool UnobservedNetwork::latent_subgraph_acyclic() const {
  const int n = observed_count();
  const int m = latent_count_;
  std::vector<int> indegree(m, 0);
  std::vector<std::vector<int>> out(m);
  for (const auto& [u, v] : edges_) {
    if (is_latent(u) && is_latent(v)) {
      out[u - n].push_back(v - n);
      ++indegree[v - n];
    }
  }
  std::queue<int> ready;
  for (int h = 0; h < m; ++h) {
    if (indegree[h] == 0) ready.push(h);
  }
  int visited = 0;
  while (!ready.empty()) {
    const int h = ready.front();
    ready.pop();
    ++visited;
    for (int g : out[h]) {
      if (--indegree[g] == 0) ready.push(g);
    }
  }
  return visited == m;
}

// --- operations --------------------------------------------------------------

int nilpotency_index(const Matrix& a22) {
  if (a22.rows() != a22.cols()) throw Error(ErrorKind::InvalidArgument, "a22 must be square");
  const int m = static_cast<int>(a22.rows());
  if (m == 0) return 1;
  // Structural powers: (Supp a22)^l == 0 iff the support graph has no path
  // with l edges.
  const IntMatrix s = support_of(a22).cast<int>();
  IntMatrix power = s;
  for (int l = 1; l <= m; ++l) {
    if ((power.array() == 0).all()) return l;
    power = clamp01(power * s);
  }
  throw Error(ErrorKind::CyclicLatent, "a22 is not nilpotent (latent subgraph has a cycle)");
}

std::vector<Matrix> latent_path_coefficients(const LatentVarModel& model) {
  const auto& b = model.blocks;
  b.validate();
  const int l = nilpotency_index(b.a22);
  std::vector<Matrix> coeffs;
  coeffs.reserve(l + 1);
  coeffs.push_back(b.a11);
  Matrix tail = b.a21;  // A22^(k-1) A21
  for (int k = 1; k <= l; ++k) {
    coeffs.push_back(b.a12 * tail);
    tail = b.a22 * tail;
  }
  return coeffs;
}

LinearMeasurements true_linear_measurements(const LatentVarModel& model) {
  const auto coeffs = latent_path_coefficients(model);
  std::vector<Support> supports;
  supports.reserve(coeffs.size());
  for (const auto& c : coeffs) supports.push_back(support_of(c));
  return LinearMeasurements(model.observed_count(), std::move(supports));
}

UnobservedNetwork network_of(const LatentVarModel& model, std::vector<std::string> names) {
  const auto& b = model.blocks;
  b.validate();
  const int n = b.observed_count();
  const int m = b.latent_count();
  if (names.empty()) names = default_names(n);
  for (int h = 0; h < m; ++h) {
    if (std::abs(b.a22(h, h)) > kZeroThreshold) {
      throw Error(ErrorKind::CyclicLatent, "a22 has a nonzero diagonal entry");
    }
  }
  UnobservedNetwork net(std::move(names), m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (std::abs(b.a11(i, j)) > kZeroThreshold) net.add_edge(j, i);
    }
    for (int h = 0; h < m; ++h) {
      if (std::abs(b.a12(i, h)) > kZeroThreshold) net.add_edge(n + h, i);
      if (std::abs(b.a21(h, i)) > kZeroThreshold) net.add_edge(i, n + h);
    }
  }
  for (int g = 0; g < m; ++g) {
    for (int h = 0; h < m; ++h) {
      if (std::abs(b.a22(g, h)) > kZeroThreshold) net.add_edge(n + h, n + g);
    }
  }
  return net;
}

LinearMeasurements path_census(const UnobservedNetwork& network, int max_len) {
  if (!network.latent_subgraph_acyclic()) {
    throw Error(ErrorKind::CyclicLatent, "latent subgraph has a cycle");
  }
  const int n = network.observed_count();
  const int m = network.latent_count();
  IntMatrix direct = IntMatrix::Zero(n, n);
  IntMatrix p21 = IntMatrix::Zero(m, n);  // observed -> latent
  IntMatrix p12 = IntMatrix::Zero(n, m);  // latent -> observed
  IntMatrix p22 = IntMatrix::Zero(m, m);
  for (const auto& [u, v] : network.edges()) {
    const bool lu = network.is_latent(u);
    const bool lv = network.is_latent(v);
    if (!lu && !lv) direct(v, u) = 1;
    if (!lu && lv) p21(v - n, u) = 1;
    if (lu && !lv) p12(v, u - n) = 1;
    if (lu && lv) p22(v - n, u - n) = 1;
  }
  std::vector<Support> supports{direct.cast<std::uint8_t>()};
  IntMatrix reach = p21;  // (Supp A22)^(k-1) Supp A21
  for (int k = 1; k + 1 <= max_len && k <= m; ++k) {
    if ((reach.array() == 0).all()) break;
    supports.push_back(clamp01(p12 * reach).cast<std::uint8_t>());
    reach = clamp01(p22 * reach);
  }
  return LinearMeasurements(n, std::move(supports), network.observed());
}

LinearMeasurements path_census(const UnobservedNetwork& network) {
  return path_census(network, network.latent_count() + 1);
}

bool consistent(const UnobservedNetwork& network, const LinearMeasurements& meas) {
  if (network.observed_count() != meas.observed_count()) return false;
  if (!network.latent_subgraph_acyclic()) return false;
  const auto census = path_census(network);
  const int upto = std::max(census.max_index(), meas.max_index());
  const int first = network.has_observed_edges() ? 0 : 1;
  for (int k = first; k <= upto; ++k) {
    if (census.at_or_zero(k) != meas.at_or_zero(k)) return false;
  }
  return true;
}

}  // namespace lvar
