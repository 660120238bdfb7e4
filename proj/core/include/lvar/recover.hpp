#pragma once

#include <set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lvar/canonical.hpp"
#include "lvar/model.hpp"

namespace lvar {

/// Latent-path summary of one observed node.
struct NodeProfile {
  int node = 0;
  /// Length of the longest latent path leaving the node (0 when none).
  int longest = 0;
  /// Observed nodes reached by a latent path of length `longest`.
  std::set<int> reach;
  /// All (target, path length) pairs reached through latent paths.
  std::set<std::pair<int, int>> paths;
};

std::vector<NodeProfile> node_profiles(const LinearMeasurements& meas);

/// Observed nodes detected as the unique observed parent of some latent node.
/// Among nodes sharing identical (reach, paths) only the smallest id is kept.
std::set<int> unique_parents(const std::vector<NodeProfile>& profiles);

/// Directed-tree recovery. One latent node per unique parent, latent edges
/// from the depth/reach nesting, observed children from S_1 and widened
/// observed parent sets. Observed edges from S_0 are carried over. Throws
/// InconsistentRecovery when the result does not reproduce `meas`.
UnobservedNetwork dtr(const LinearMeasurements& meas);

struct DistanceMatrix {
  Eigen::MatrixXi d;  ///< d(i, j) = length of the latent path i -> j, 0 if none
};

/// Throws AmbiguousDistance when some ordered pair has latent paths of
/// several lengths.
DistanceMatrix distance_matrix(const LinearMeasurements& meas);

/// Partition of the observed nodes touched by latent paths into the
/// components of the undirected "shares a latent path" graph. Each class is
/// sorted; classes are ordered by their smallest member.
std::vector<std::vector<int>> connected_classes(const LinearMeasurements& meas);

inline constexpr int kDefaultMergeCap = 40;

/// One private latent path per nonzero S_r(j, i), r >= 1, with i, j in `cls`.
/// Throws CapExceeded when more than `cap` latent nodes would be created.
UnobservedNetwork init_graph(const LinearMeasurements& meas, const std::vector<int>& cls,
                             int cap = kDefaultMergeCap);

/// Removes latent node `drop`, deletes edges between `keep` and `drop`, and
/// hands every remaining parent and child of `drop` to `keep`. Latent ids
/// above `drop` shift down by one.
UnobservedNetwork merge(const UnobservedNetwork& g, int keep, int drop);

/// merge(g, keep, drop) has an acyclic latent subgraph and is consistent
/// with `meas`.
bool check(const UnobservedNetwork& g, int keep, int drop, const LinearMeasurements& meas);

/// One level of the node-merging search: networks with equal latent count,
/// deduplicated and sorted by canonical form.
struct MergeSearchState {
  int level = 0;
  std::vector<UnobservedNetwork> frontier;
};

struct NmOptions {
  int cap = kDefaultMergeCap;
  /// Worker threads for evaluating merges within a level; 0 picks the
  /// hardware concurrency. Output does not depend on this.
  unsigned threads = 1;
};

/// All levels of the merge search for one connected class.
std::vector<MergeSearchState> merge_levels(const LinearMeasurements& meas,
                                           const std::vector<int>& cls,
                                           const NmOptions& options = {});

/// Node-merging search: every minimal network consistent with `meas` under
/// the one-path-per-length condition. Per-class results are combined by
/// disjoint union; S_0 edges are attached; output sorted by canonical form.
std::vector<UnobservedNetwork> nm(const LinearMeasurements& meas, const NmOptions& options = {});
std::vector<UnobservedNetwork> nm(const LinearMeasurements& meas, int cap);

/// Unique directed-tree network whose latent nodes each have at least two
/// parents and two children. Throws NotIdentifiable when zero or several
/// candidates remain.
UnobservedNetwork recover_tree(const LinearMeasurements& meas, int cap = kDefaultMergeCap);

/// True iff the network (ignoring observed-to-observed edges) has a forest
/// skeleton and every latent node has >= 2 parents and >= 2 children.
bool is_hakimi_tree(const UnobservedNetwork& network);

struct OracleOptions {
  int m_max = 5;
  /// Keep only networks with at most one latent path of each length per
  /// ordered observed pair.
  bool unique_paths_only = false;
};

inline constexpr int kOracleMaxObserved = 6;
inline constexpr int kOracleMaxLatent = 5;
inline constexpr int kOracleMaxIndex = 4;

/// Exhaustive search for the consistent networks with the fewest latent
/// nodes (at most m_max). Empty when none exists within m_max. Throws
/// ScaleExceeded outside n <= 6, m_max <= 5, K <= 4.
std::vector<UnobservedNetwork> oracle_minimal(const LinearMeasurements& meas,
                                              const OracleOptions& options);
std::vector<UnobservedNetwork> oracle_minimal(const LinearMeasurements& meas, int m_max);

/// At most one latent path of each length between every ordered pair of
/// observed nodes.
bool has_unique_latent_paths(const UnobservedNetwork& network);

/// Adds the S_0 edges of `meas` as observed-to-observed edges.
void attach_direct_edges(UnobservedNetwork& network, const LinearMeasurements& meas);

}  // namespace lvar
