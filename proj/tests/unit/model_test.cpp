#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "lvar/canonical.hpp"
#include "lvar/errors.hpp"
#include "lvar/model.hpp"
#include "lvar/simulate.hpp"

namespace lvar {
namespace {

Support support(int n, std::initializer_list<std::pair<int, int>> ones) {
  Support s = Support::Zero(n, n);
  for (auto [row, col] : ones) s(row, col) = 1;
  return s;
}

std::set<std::pair<std::string, std::string>> named_edges(const UnobservedNetwork& g) {
  std::set<std::pair<std::string, std::string>> out;
  for (auto [u, v] : g.edges()) out.emplace(g.node_name(u), g.node_name(v));
  return out;
}

// --- nilpotency -------------------------------------------------------------

TEST(Nilpotency, ZeroMatrixHasIndexOne) { EXPECT_EQ(nilpotency_index(Matrix::Zero(2, 2)), 1); }

TEST(Nilpotency, FullChainHasIndexThree) {
  Matrix a = Matrix::Zero(3, 3);
  a(1, 0) = 0.1;
  a(2, 0) = 0.1;
  a(2, 1) = 0.1;
  EXPECT_EQ(nilpotency_index(a), 3);
}

TEST(Nilpotency, TwoCycleIsRejected) {
  Matrix a(2, 2);
  a << 0, 0.5, 0.5, 0;
  try {
    nilpotency_index(a);
    FAIL() << "expected CyclicLatent";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CyclicLatent);
  }
}

TEST(Nilpotency, EmptyLatentBlock) { EXPECT_EQ(nilpotency_index(Matrix(0, 0)), 1); }

// --- linear measurements ----------------------------------------------------

TEST(LinearMeasurements, TrailingZeroSupportsAreTrimmed) {
  const LinearMeasurements meas(2, {support(2, {{0, 1}}), Support::Zero(2, 2), Support::Zero(2, 2)});
  EXPECT_EQ(meas.size(), 1);
  EXPECT_FALSE(meas.has_latent_paths());
  const LinearMeasurements inner(2, {Support::Zero(2, 2), Support::Zero(2, 2), support(2, {{1, 0}})});
  EXPECT_EQ(inner.max_index(), 2);
}

TEST(LinearMeasurements, RejectsBadShapes) {
  EXPECT_THROW(LinearMeasurements(2, {Support::Zero(3, 3)}), Error);
}

TEST(LinearMeasurements, DefaultNamesAndAtOrZero) {
  const LinearMeasurements meas(3);
  EXPECT_EQ(meas.names().size(), 3u);
  EXPECT_EQ(meas.at_or_zero(5).cast<int>().sum(), 0);
}

// --- true measurements ------------------------------------------------------

TEST(TrueLinearMeasurements, NoLatentInfluenceLeavesOnlyDirectSupport) {
  std::mt19937_64 rng(1);
  LatentVarModel model = testing::random_small_model(rng, 4, 3);
  model.blocks.a12.setZero();
  const LinearMeasurements meas = true_linear_measurements(model);
  ASSERT_EQ(meas.size(), 1);
  EXPECT_EQ(meas[0], support_of(model.blocks.a11));
}

TEST(TrueLinearMeasurements, SingleLatentChain) {
  LatentVarModel model;
  model.blocks = BlockTransitionMatrix::zeros(2, 1);
  model.blocks.a21(0, 0) = 0.5;  // observed 1 -> h
  model.blocks.a12(1, 0) = 0.5;  // h -> observed 2
  const LinearMeasurements meas = true_linear_measurements(model);
  ASSERT_EQ(meas.size(), 2);
  EXPECT_EQ(meas[1], support(2, {{1, 0}}));
  const auto coeffs = latent_path_coefficients(model);
  EXPECT_DOUBLE_EQ(coeffs[1](1, 0), 0.25);
}

TEST(TrueLinearMeasurements, AgreesWithPathCensusForGenericWeights) {
  std::mt19937_64 rng(2);
  int compared = 0;
  for (int t = 0; t < 150; ++t) {
    DrgConfig cfg;
    cfg.n = std::uniform_int_distribution<int>(1, 6)(rng);
    cfg.m = std::uniform_int_distribution<int>(0, 5)(rng);
    cfg.p = 0.4;
    cfg.q = 0.4;
    cfg.a = 0.5;
    cfg.seed = rng();
    const LatentVarModel model = gen_drg(cfg);
    bool generic = true;
    for (const Matrix& c : latent_path_coefficients(model)) {
      generic = generic && !((c.array().abs() > 0.0) && (c.array().abs() < 1e-9)).any();
    }
    if (!generic) continue;
    ++compared;
    EXPECT_EQ(true_linear_measurements(model), path_census(network_of(model)));
  }
  EXPECT_GE(compared, 100);
}

// --- network_of -------------------------------------------------------------

TEST(NetworkOf, ZeroBlocksGiveEdgelessNetwork) {
  LatentVarModel model;
  model.blocks = BlockTransitionMatrix::zeros(3, 2);
  const UnobservedNetwork g = network_of(model);
  EXPECT_TRUE(g.edges().empty());
  EXPECT_EQ(g.latent_count(), 2);
}

TEST(NetworkOf, DairyStructure) {
  const UnobservedNetwork g = network_of(testing::dairy_model(), {"milk", "cheese"});
  const std::set<std::pair<std::string, std::string>> expected{
      {"milk", "L0"}, {"milk", "cheese"}, {"L0", "cheese"}, {"cheese", "milk"}, {"milk", "milk"}};
  EXPECT_EQ(named_edges(g), expected);
}

TEST(NetworkOf, DiagonalA11GivesSelfLoops) {
  LatentVarModel model;
  model.blocks = BlockTransitionMatrix::zeros(3, 1);
  model.blocks.a11 = Matrix::Identity(3, 3) * 0.3;
  const UnobservedNetwork g = network_of(model);
  ASSERT_EQ(g.edges().size(), 3u);
  for (auto [u, v] : g.edges()) EXPECT_EQ(u, v);
}

// --- path census ------------------------------------------------------------

TEST(PathCensus, SingleLatentPath) {
  UnobservedNetwork g({"1", "2"}, 1);
  g.add_edge(0, 2);
  g.add_edge(2, 1);
  const LinearMeasurements meas = path_census(g, 3);
  ASSERT_EQ(meas.size(), 2);
  EXPECT_EQ(meas[0].cast<int>().sum(), 0);
  EXPECT_EQ(meas[1], support(2, {{1, 0}}));
}

TEST(PathCensus, AmbiguousPairShareMeasurements) {
  const LinearMeasurements expected = testing::ambiguous_measurements();
  EXPECT_EQ(path_census(testing::ambiguous_left()), expected);
  EXPECT_EQ(path_census(testing::ambiguous_right()), expected);
}

TEST(PathCensus, NoLatentsGivesAdjacencyOnly) {
  UnobservedNetwork g({"a", "b", "c"}, 0);
  g.add_edge(0, 1);
  g.add_edge(2, 2);
  const LinearMeasurements meas = path_census(g);
  ASSERT_EQ(meas.size(), 1);
  EXPECT_EQ(meas[0], support(3, {{1, 0}, {2, 2}}));
}

TEST(PathCensus, MaxLengthTruncates) {
  const LinearMeasurements meas = path_census(testing::ambiguous_left(), 2);
  EXPECT_EQ(meas.max_index(), 1);
}

TEST(PathCensus, CyclicLatentSubgraphIsRejected) {
  UnobservedNetwork g({"1"}, 2);
  g.add_edge(1, 2);
  g.add_edge(2, 1);
  try {
    path_census(g);
    FAIL() << "expected CyclicLatent";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CyclicLatent);
  }
}

TEST(PathCensus, MonotoneUnderEdgeAddition) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const UnobservedNetwork g = testing::random_unique_path_network(rng, 4, 3, 40);
    UnobservedNetwork h = g;
    const int n = g.observed_count();
    const int u = std::uniform_int_distribution<int>(0, g.node_count() - 1)(rng);
    int v = std::uniform_int_distribution<int>(0, g.node_count() - 1)(rng);
    if (u == v && g.is_latent(u)) continue;
    if (g.is_latent(u) && g.is_latent(v) && u > v) continue;  // keep latent edges forward
    h.add_edge(u, v);
    const LinearMeasurements before = path_census(g);
    const LinearMeasurements after = path_census(h);
    for (int k = 0; k <= before.max_index(); ++k) {
      const Support lost = (before[k].array() > after.at_or_zero(k).array()).cast<std::uint8_t>();
      EXPECT_EQ(lost.cast<int>().sum(), 0) << "k = " << k << ", n = " << n;
    }
  }
}

// --- consistency ------------------------------------------------------------

TEST(Consistent, AmbiguousPairBothConsistent) {
  const LinearMeasurements meas = testing::ambiguous_measurements();
  EXPECT_TRUE(consistent(testing::ambiguous_left(), meas));
  EXPECT_TRUE(consistent(testing::ambiguous_right(), meas));
}

TEST(Consistent, RemovingAPathBreaksConsistency) {
  UnobservedNetwork g = testing::ambiguous_left();
  ASSERT_TRUE(g.remove_edge(1, 4));  // observed 2 -> first latent
  EXPECT_FALSE(consistent(g, testing::ambiguous_measurements()));
}

TEST(Consistent, ObservedEdgesAreComparedOnlyWhenPresent) {
  const LinearMeasurements meas = testing::dairy_measurements();
  UnobservedNetwork g(meas.names(), 1);
  g.add_edge(0, 2);
  g.add_edge(2, 1);
  EXPECT_TRUE(consistent(g, meas));
  g.add_edge(1, 1);  // wrong direct edge set
  EXPECT_FALSE(consistent(g, meas));
}

TEST(Consistent, HoldsForOwnCensus) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 100; ++t) {
    const LatentVarModel model = testing::random_small_model(rng, 5, 4, 0.4);
    const UnobservedNetwork g = network_of(model);
    EXPECT_TRUE(consistent(g, path_census(g)));
  }
}

// --- canonical form ---------------------------------------------------------

TEST(CanonicalForm, InvariantUnderLatentPermutation) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    const UnobservedNetwork g = network_of(testing::random_small_model(rng, 4, 5, 0.4));
    std::vector<int> perm(g.latent_count());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    EXPECT_EQ(canonical_form(g), canonical_form(relabel_latents(g, perm)));
  }
}

TEST(CanonicalForm, HighlySymmetricNetworks) {
  // Six interchangeable latents between the same pair of observed nodes.
  UnobservedNetwork g({"1", "2"}, 6);
  for (int k = 0; k < 6; ++k) {
    g.add_edge(0, 2 + k);
    g.add_edge(2 + k, 1);
  }
  UnobservedNetwork h = relabel_latents(g, {5, 3, 1, 0, 2, 4});
  EXPECT_EQ(canonical_form(g), canonical_form(h));
}

TEST(CanonicalForm, SeparatesAmbiguousPair) {
  EXPECT_NE(canonical_form(testing::ambiguous_left()), canonical_form(testing::ambiguous_right()));
}

TEST(CanonicalForm, EdgelessNetworksWithEqualShapeAgree) {
  EXPECT_EQ(canonical_form(UnobservedNetwork({"a", "b"}, 3)),
            canonical_form(UnobservedNetwork({"a", "b"}, 3)));
  EXPECT_NE(canonical_form(UnobservedNetwork({"a", "b"}, 3)),
            canonical_form(UnobservedNetwork({"a", "b"}, 2)));
}

TEST(CanonicalForm, SeparatesDifferentObservedEndpoints) {
  UnobservedNetwork g({"1", "2", "3"}, 1);
  g.add_edge(0, 3);
  g.add_edge(3, 1);
  UnobservedNetwork h({"1", "2", "3"}, 1);
  h.add_edge(0, 3);
  h.add_edge(3, 2);
  EXPECT_NE(canonical_form(g), canonical_form(h));
}

TEST(CanonicalForm, EqualKeysImplyIsomorphism) {
  // Brute-force check on small random networks: equal keys iff some latent
  // permutation maps one edge set onto the other.
  std::mt19937_64 rng(6);
  int equal_keys = 0;
  for (int t = 0; t < 300; ++t) {
    const UnobservedNetwork g = network_of(testing::random_small_model(rng, 2, 4, 0.4));
    std::vector<int> perm{0, 1, 2, 3};
    std::shuffle(perm.begin(), perm.end(), rng);
    UnobservedNetwork h = relabel_latents(g, perm);
    if (t % 2) {
      // Toggle one latent-touching edge.
      const int u = std::uniform_int_distribution<int>(0, 5)(rng);
      const int v = std::uniform_int_distribution<int>(2, 5)(rng);
      if (u != v && !h.remove_edge(u, v)) h.add_edge(u, v);
    }
    perm = {0, 1, 2, 3};
    bool isomorphic = false;
    do {
      isomorphic = isomorphic || relabel_latents(h, perm) == g;
    } while (std::next_permutation(perm.begin(), perm.end()));
    equal_keys += canonical_form(g) == canonical_form(h);
    EXPECT_EQ(canonical_form(g) == canonical_form(h), isomorphic);
  }
  EXPECT_GT(equal_keys, 100);
  EXPECT_LT(equal_keys, 300);
}

// --- network ----------------------------------------------------------------

TEST(UnobservedNetwork, RejectsLatentSelfLoopsAndBadIds) {
  UnobservedNetwork g({"1"}, 1);
  EXPECT_THROW(g.add_edge(1, 1), Error);
  EXPECT_THROW(g.add_edge(0, 2), Error);
  EXPECT_NO_THROW(g.add_edge(0, 0));
}

TEST(UnobservedNetwork, NamesAndAdjacency) {
  const UnobservedNetwork g = testing::ambiguous_right();
  EXPECT_EQ(g.node_name(0), "1");
  EXPECT_EQ(g.node_name(6), "L2");
  EXPECT_EQ(g.parents(5), (std::vector<int>{4, 6}));
  EXPECT_TRUE(g.latent_subgraph_acyclic());
  EXPECT_FALSE(g.has_observed_edges());
}

}  // namespace
}  // namespace lvar
