#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace lvar {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
/// 0/1 matrix. Entry (j, i) refers to an influence from node i on node j.
using Support = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Magnitudes at or below this are treated as structural zeros.
inline constexpr double kZeroThreshold = 1e-12;

Support support_of(const Matrix& m, double threshold = kZeroThreshold);

/// The four blocks of the joint transition matrix [a11 a12; a21 a22], where
/// the first n coordinates are observed and the remaining m are latent.
struct BlockTransitionMatrix {
  Matrix a11;
  Matrix a12;
  Matrix a21;
  Matrix a22;

  static BlockTransitionMatrix zeros(int n, int m);

  int observed_count() const { return static_cast<int>(a11.rows()); }
  int latent_count() const { return static_cast<int>(a22.rows()); }

  /// Throws InvalidArgument when the block shapes disagree.
  void validate() const;
  Matrix assemble() const;
};

struct LatentVarModel {
  BlockTransitionMatrix blocks;
  double sigma_x2 = 1.0;
  double sigma_z2 = 1.0;

  int observed_count() const { return blocks.observed_count(); }
  int latent_count() const { return blocks.latent_count(); }

  Matrix transition() const { return blocks.assemble(); }
  /// Block-diagonal noise covariance diag(sigma_x2 I_n, sigma_z2 I_m).
  Matrix noise_covariance() const;
  double spectral_radius() const;
  bool is_stationary() const { return spectral_radius() < 1.0; }
};

/// Supports S_0..S_K. S_k(j, i) == 1 iff there is a directed path i -> j of
/// length k + 1 whose interior nodes are all latent; S_0 holds the direct
/// observed-to-observed influences. Trailing all-zero S_k (k >= 1) are dropped
/// on construction.
class LinearMeasurements {
 public:
  explicit LinearMeasurements(int n);
  LinearMeasurements(int n, std::vector<Support> supports,
                     std::vector<std::string> names = {});

  int observed_count() const { return n_; }
  /// Index K of the last stored support.
  int max_index() const { return static_cast<int>(supports_.size()) - 1; }
  int size() const { return static_cast<int>(supports_.size()); }

  const Support& operator[](int k) const { return supports_[k]; }
  /// S_k, or an all-zero matrix when k exceeds max_index().
  Support at_or_zero(int k) const;
  const std::vector<Support>& supports() const { return supports_; }
  const std::vector<std::string>& names() const { return names_; }

  bool has_latent_paths() const { return max_index() >= 1; }
  /// Copy with S_0 cleared.
  LinearMeasurements latent_part() const;

  friend bool operator==(const LinearMeasurements& a, const LinearMeasurements& b) {
    return a.n_ == b.n_ && a.supports_ == b.supports_;
  }

 private:
  int n_;
  std::vector<Support> supports_;
  std::vector<std::string> names_;
};

std::vector<std::string> default_names(int n);

/// Directed graph over n labeled observed nodes (ids 0..n-1) and m anonymous
/// latent nodes (ids n..n+m-1). An edge (u, v) means "u influences v".
/// Observed-to-observed edges may be present and stand for Supp(A11).
class UnobservedNetwork {
 public:
  using Edge = std::pair<int, int>;

  UnobservedNetwork() = default;
  UnobservedNetwork(std::vector<std::string> observed, int latent_count);

  int observed_count() const { return static_cast<int>(observed_.size()); }
  int latent_count() const { return latent_count_; }
  int node_count() const { return observed_count() + latent_count_; }

  bool is_latent(int id) const { return id >= observed_count(); }
  int latent_node(int k) const { return observed_count() + k; }
  const std::vector<std::string>& observed() const { return observed_; }
  /// Observed label, or "L<k>" for latent node k.
  std::string node_name(int id) const;

  /// Inserts u -> v. Throws InvalidArgument on out-of-range ids or latent
  /// self-loops.
  void add_edge(int u, int v);
  bool remove_edge(int u, int v);
  bool has_edge(int u, int v) const { return edges_.count({u, v}) != 0; }
  const std::set<Edge>& edges() const { return edges_; }

  /// Appends a latent node and returns its id.
  int add_latent();

  std::vector<int> parents(int id) const;
  std::vector<int> children(int id) const;

  bool has_observed_edges() const;
  bool latent_subgraph_acyclic() const;

  friend bool operator==(const UnobservedNetwork&, const UnobservedNetwork&) = default;

 private:
  void check_id(int id) const;

  std::vector<std::string> observed_;
  int latent_count_ = 0;
  std::set<Edge> edges_;
};

/// Smallest l with a22^l == 0 (entries below the zero threshold count as
/// zero). Throws CyclicLatent when no such l <= m exists.
int nilpotency_index(const Matrix& a22);

/// A*_0 = A11 and A*_k = A12 A22^(k-1) A21 for 1 <= k <= l.
std::vector<Matrix> latent_path_coefficients(const LatentVarModel& model);

LinearMeasurements true_linear_measurements(const LatentVarModel& model);

UnobservedNetwork network_of(const LatentVarModel& model,
                             std::vector<std::string> names = {});

/// Supports of all latent paths of length <= max_len (S_0 is always the
/// observed adjacency). Throws CyclicLatent if the latent subgraph has a cycle.
LinearMeasurements path_census(const UnobservedNetwork& network, int max_len);
/// Census over every path length the network can realise.
LinearMeasurements path_census(const UnobservedNetwork& network);

/// True iff the network reproduces the latent-path supports of `meas`
/// exactly. S_0 is compared only when the network carries observed edges.
bool consistent(const UnobservedNetwork& network, const LinearMeasurements& meas);

}  // namespace lvar
