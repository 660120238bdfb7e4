#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "lvar/model.hpp"
#include "lvar/simulate.hpp"

namespace lvar::testing {

// Two structurally different networks over observed {1,2,3,4} that induce
// S_1 = {(3,2)} and S_2 = {(4,1),(4,2)}.
UnobservedNetwork ambiguous_left();
UnobservedNetwork ambiguous_right();
LinearMeasurements ambiguous_measurements();

// Four-latent tree over observed {1..5} with unique parents 1,3,2,4 for a,b,c,d;
// the `minus_edge` variant drops the edge 5 -> d.
UnobservedNetwork unique_parent_tree();
UnobservedNetwork unique_parent_tree_minus_edge();

// Milk/cheese observed, butter latent.
LinearMeasurements dairy_measurements();
LatentVarModel dairy_model();

// Expenditure/investment observed, income latent.
LinearMeasurements west_german_measurements();
LatentVarModel west_german_model();

/// Random network whose latent part is a directed tree in which every
/// latent node has a unique observed parent and every latent leaf a unique
/// observed child, plus random extra links that keep those properties.
struct TreeInstance {
  UnobservedNetwork network;
  /// unique_parent[k] is an observed node whose only latent child is k.
  std::vector<int> unique_parent;
};
TreeInstance random_unique_parent_tree(std::mt19937_64& rng, int n, int m);

/// Random network with an acyclic latent part, at least one latent path, at
/// most one latent path of each length between any observed pair, and an
/// initial merge graph of at most `max_init` latent nodes.
UnobservedNetwork random_unique_path_network(std::mt19937_64& rng, int n, int m, int max_init);

/// Random network whose edges touching latent nodes form a forest and where
/// every latent node has at least two parents and two children. Redrawn until
/// every connected class needs at most `max_class_init` initial merge nodes.
UnobservedNetwork random_hakimi_tree(std::mt19937_64& rng, int m, int max_class_init);

/// Total latent count of the initial merge graph, sum of r over S_r ones.
int init_latent_count(const LinearMeasurements& meas);

/// Model with the support of `network`, weights of magnitude in [lo, hi] with
/// random signs, rescaled to spectral radius 0.9 when needed.
LatentVarModel random_model_for(const UnobservedNetwork& network, std::mt19937_64& rng,
                                double lo = 0.2, double hi = 0.6);

/// Random dense-ish model with n observed and m latent nodes and nilpotent
/// latent block.
LatentVarModel random_small_model(std::mt19937_64& rng, int n, int m, double p = 0.5);

/// Latent k -> recovered latent with the same set of (observed target, path
/// length) pairs reachable from it; empty when no bijection exists.
std::vector<int> match_latents(const UnobservedNetwork& reference,
                               const UnobservedNetwork& recovered);

/// Ground-truth relation between a recovered network and a reference:
/// latent edges and latent-to-observed edges equal, observed-to-latent edges
/// of the reference contained in the recovered ones, under `mapping`
/// (reference latent k -> recovered latent mapping[k]).
bool matches_up_to_parent_widening(const UnobservedNetwork& reference,
                                   const UnobservedNetwork& recovered,
                                   const std::vector<int>& mapping);

}  // namespace lvar::testing
