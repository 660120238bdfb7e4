#include "fixtures.hpp"

#include <algorithm>
#include <numeric>

#include "lvar/recover.hpp"

namespace lvar::testing {

namespace {

std::vector<std::string> numbered(int n) {
  std::vector<std::string> names;
  for (int i = 1; i <= n; ++i) names.push_back(std::to_string(i));
  return names;
}

// Observed label "k" has id k - 1.
constexpr int obs(int label) { return label - 1; }

Support support_from(int n, std::initializer_list<std::pair<int, int>> ones) {
  Support s = Support::Zero(n, n);
  for (auto [row, col] : ones) s(row, col) = 1;
  return s;
}

bool chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

}  // namespace

UnobservedNetwork ambiguous_left() {
  UnobservedNetwork g(numbered(4), 3);
  const int l1 = 4, l2 = 5, l3 = 6;
  g.add_edge(obs(1), l1);
  g.add_edge(l1, l2);
  g.add_edge(l2, obs(4));
  g.add_edge(obs(2), l3);
  g.add_edge(l3, obs(3));
  g.add_edge(obs(2), l1);
  return g;
}

UnobservedNetwork ambiguous_right() {
  UnobservedNetwork g(numbered(4), 3);
  const int l1 = 4, l2 = 5, l3 = 6;
  g.add_edge(obs(1), l1);
  g.add_edge(l1, l2);
  g.add_edge(l2, obs(4));
  g.add_edge(obs(2), l3);
  g.add_edge(l3, l2);
  g.add_edge(l3, obs(3));
  return g;
}

LinearMeasurements ambiguous_measurements() {
  const int n = 4;
  return LinearMeasurements(n,
                            {Support::Zero(n, n), support_from(n, {{obs(3), obs(2)}}),
                             support_from(n, {{obs(4), obs(1)}, {obs(4), obs(2)}})},
                            numbered(n));
}

UnobservedNetwork unique_parent_tree() {
  UnobservedNetwork g = unique_parent_tree_minus_edge();
  g.add_edge(obs(5), 5 + 3);
  return g;
}

UnobservedNetwork unique_parent_tree_minus_edge() {
  UnobservedNetwork g(numbered(5), 4);
  const int a = 5, b = 6, c = 7, d = 8;
  g.add_edge(obs(1), a);
  g.add_edge(obs(3), b);
  g.add_edge(obs(4), d);
  g.add_edge(obs(2), c);
  g.add_edge(a, b);
  g.add_edge(a, c);
  g.add_edge(b, d);
  g.add_edge(b, obs(4));
  g.add_edge(d, obs(2));
  g.add_edge(d, obs(4));
  g.add_edge(c, obs(5));
  g.add_edge(obs(5), b);
  return g;
}

LinearMeasurements dairy_measurements() {
  Support s0(2, 2);
  s0 << 1, 1, 1, 0;
  Support s1(2, 2);
  s1 << 0, 0, 1, 0;
  return LinearMeasurements(2, {s0, s1}, {"milk", "cheese"});
}

LatentVarModel dairy_model() {
  LatentVarModel model;
  model.blocks = BlockTransitionMatrix::zeros(2, 1);
  model.blocks.a11 << 0.5, 0.3, 0.4, 0.0;  // milk self-loop, cheese -> milk, milk -> cheese
  model.blocks.a21 << 0.6, 0.0;            // milk -> butter
  model.blocks.a12 << 0.0, 0.5;            // butter -> cheese
  model.sigma_x2 = 1.0;
  model.sigma_z2 = 0.1;
  return model;
}

LinearMeasurements west_german_measurements() {
  Support s0(2, 2);
  s0 << 0, 0, 1, 1;
  Support s1(2, 2);
  s1 << 1, 0, 1, 0;
  return LinearMeasurements(2, {s0, s1}, {"expend", "invest"});
}

LatentVarModel west_german_model() {
  LatentVarModel model;
  model.blocks = BlockTransitionMatrix::zeros(2, 1);
  model.blocks.a11 << 0.0, 0.0, 0.4, 0.5;  // expend -> invest, invest self-loop
  model.blocks.a21 << 0.6, 0.0;            // expend -> income
  model.blocks.a12 << 0.5, 0.4;            // income -> expend, income -> invest
  model.sigma_x2 = 1.0;
  model.sigma_z2 = 0.1;
  return model;
}

TreeInstance random_unique_parent_tree(std::mt19937_64& rng, int n, int m) {
  UnobservedNetwork g(numbered(n), m);
  std::vector<int> observed(n);
  std::iota(observed.begin(), observed.end(), 0);

  // Latent tree rooted at latent 0: node k > 0 hangs below a random earlier
  // node.
  std::vector<bool> leaf(m, true);
  for (int k = 1; k < m; ++k) {
    const int parent = std::uniform_int_distribution<int>(0, k - 1)(rng);
    g.add_edge(n + parent, n + k);
    leaf[parent] = false;
  }

  std::shuffle(observed.begin(), observed.end(), rng);
  std::vector<int> unique_parent(observed.begin(), observed.begin() + m);
  for (int k = 0; k < m; ++k) g.add_edge(unique_parent[k], n + k);

  std::shuffle(observed.begin(), observed.end(), rng);
  std::vector<int> unique_child(m, -1);
  std::vector<bool> reserved_child(n, false);
  int next = 0;
  for (int k = 0; k < m; ++k) {
    if (!leaf[k]) continue;
    unique_child[k] = observed[next++];
    reserved_child[unique_child[k]] = true;
    g.add_edge(n + k, unique_child[k]);
  }

  std::vector<bool> is_unique_parent(n, false);
  for (int u : unique_parent) is_unique_parent[u] = true;

  for (int k = 0; k < m; ++k) {
    for (int i = 0; i < n; ++i) {
      // Shared parents never touch a reserved unique parent.
      if (!is_unique_parent[i] && chance(rng, 0.25)) g.add_edge(i, n + k);
      // Extra children avoid the unique children of the leaves.
      const bool blocked = reserved_child[i] && unique_child[k] != i;
      if (!blocked && chance(rng, 0.25)) g.add_edge(n + k, i);
    }
  }
  return {std::move(g), std::move(unique_parent)};
}

int init_latent_count(const LinearMeasurements& meas) {
  int total = 0;
  for (int r = 1; r <= meas.max_index(); ++r) total += r * static_cast<int>(meas[r].cast<int>().sum());
  return total;
}

UnobservedNetwork random_unique_path_network(std::mt19937_64& rng, int n, int m, int max_init) {
  while (true) {
    UnobservedNetwork g(numbered(n), m);
    for (int a = 0; a < m; ++a) {
      for (int b = a + 1; b < m; ++b) {
        if (chance(rng, 0.3)) g.add_edge(n + a, n + b);
      }
      for (int i = 0; i < n; ++i) {
        if (chance(rng, 0.3)) g.add_edge(i, n + a);
        if (chance(rng, 0.3)) g.add_edge(n + a, i);
      }
    }
    if (!has_unique_latent_paths(g)) continue;
    const LinearMeasurements meas = path_census(g);
    if (!meas.has_latent_paths() || init_latent_count(meas) > max_init) continue;
    return g;
  }
}

UnobservedNetwork random_hakimi_tree(std::mt19937_64& rng, int m, int max_class_init) {
  while (true) {
    // Random latent forest with random edge directions, then fresh observed
    // leaves until every latent node has two parents and two children.
    std::vector<std::pair<int, int>> latent_edges;
    std::vector<int> in(m, 0), out(m, 0);
    for (int k = 1; k < m; ++k) {
      if (!chance(rng, 0.3)) continue;
      const int other = std::uniform_int_distribution<int>(0, k - 1)(rng);
      const bool down = chance(rng, 0.5);
      const int u = down ? other : k;
      const int v = down ? k : other;
      latent_edges.emplace_back(u, v);
      ++out[u];
      ++in[v];
    }
    std::vector<std::pair<int, bool>> leaves;  // (latent, observed is parent)
    for (int k = 0; k < m; ++k) {
      const int parents = std::max(2 - in[k], 0) + (chance(rng, 0.2) ? 1 : 0);
      const int children = std::max(2 - out[k], 0) + (chance(rng, 0.2) ? 1 : 0);
      for (int p = 0; p < parents; ++p) leaves.emplace_back(k, true);
      for (int c = 0; c < children; ++c) leaves.emplace_back(k, false);
    }
    const int n = static_cast<int>(leaves.size());
    std::vector<int> label(n);
    std::iota(label.begin(), label.end(), 0);
    std::shuffle(label.begin(), label.end(), rng);

    UnobservedNetwork g(numbered(n), m);
    for (auto [u, v] : latent_edges) g.add_edge(n + u, n + v);
    for (int i = 0; i < n; ++i) {
      const auto [k, is_parent] = leaves[i];
      if (is_parent) {
        g.add_edge(label[i], n + k);
      } else {
        g.add_edge(n + k, label[i]);
      }
    }
    const LinearMeasurements meas = path_census(g);
    bool small = true;
    for (const auto& cls : connected_classes(meas)) {
      std::vector<bool> member(n, false);
      for (int i : cls) member[i] = true;
      int count = 0;
      for (int r = 1; r <= meas.max_index(); ++r) {
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) count += (member[i] && meas[r](j, i)) ? r : 0;
        }
      }
      small = small && count <= max_class_init;
    }
    if (small) return g;
  }
}

LatentVarModel random_model_for(const UnobservedNetwork& network, std::mt19937_64& rng,
                                double lo, double hi) {
  const int n = network.observed_count();
  const int m = network.latent_count();
  std::uniform_real_distribution<double> magnitude(lo, hi);
  LatentVarModel model;
  model.blocks = BlockTransitionMatrix::zeros(n, m);
  Matrix a = Matrix::Zero(n + m, n + m);
  for (auto [u, v] : network.edges()) a(v, u) = (chance(rng, 0.5) ? 1.0 : -1.0) * magnitude(rng);
  model.blocks.a11 = a.topLeftCorner(n, n);
  model.blocks.a12 = a.topRightCorner(n, m);
  model.blocks.a21 = a.bottomLeftCorner(m, n);
  model.blocks.a22 = a.bottomRightCorner(m, m);
  const double rho = model.spectral_radius();
  if (rho >= 0.9) {
    const double scale = 0.9 / rho;
    model.blocks.a11 *= scale;
    model.blocks.a12 *= scale;
    model.blocks.a21 *= scale;
    model.blocks.a22 *= scale;
  }
  return model;
}

LatentVarModel random_small_model(std::mt19937_64& rng, int n, int m, double p) {
  UnobservedNetwork g(numbered(n), m);
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      if (chance(rng, p)) g.add_edge(n + a, n + b);
    }
    for (int i = 0; i < n; ++i) {
      if (chance(rng, p)) g.add_edge(i, n + a);
      if (chance(rng, p)) g.add_edge(n + a, i);
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (chance(rng, p)) g.add_edge(i, j);
    }
  }
  return random_model_for(g, rng);
}

namespace {

std::vector<std::set<std::pair<int, int>>> downstream_paths(const UnobservedNetwork& g) {
  const int n = g.observed_count();
  const int m = g.latent_count();
  std::vector<std::set<std::pair<int, int>>> out(m);
  for (int k = 0; k < m; ++k) {
    std::vector<int> frontier{n + k};
    for (int length = 2; !frontier.empty() && length <= m + 1; ++length) {
      std::vector<int> next;
      for (int v : frontier) {
        for (int c : g.children(v)) {
          if (g.is_latent(c)) {
            next.push_back(c);
          } else {
            out[k].emplace(c, length);
          }
        }
      }
      frontier = std::move(next);
    }
  }
  return out;
}

}  // namespace

std::vector<int> match_latents(const UnobservedNetwork& reference,
                               const UnobservedNetwork& recovered) {
  const int m = reference.latent_count();
  if (recovered.latent_count() != m) return {};
  const auto ref = downstream_paths(reference);
  const auto rec = downstream_paths(recovered);
  std::vector<int> mapping(m, -1);
  std::vector<bool> used(m, false);
  for (int k = 0; k < m; ++k) {
    for (int r = 0; r < m; ++r) {
      if (!used[r] && ref[k] == rec[r]) {
        mapping[k] = r;
        used[r] = true;
        break;
      }
    }
    if (mapping[k] < 0) return {};
  }
  return mapping;
}

bool matches_up_to_parent_widening(const UnobservedNetwork& reference,
                                   const UnobservedNetwork& recovered,
                                   const std::vector<int>& mapping) {
  const int n = reference.observed_count();
  if (recovered.observed_count() != n || recovered.latent_count() != reference.latent_count()) {
    return false;
  }
  auto map_id = [&](int id) { return id < n ? id : n + mapping[id - n]; };
  std::set<std::pair<int, int>> exact_ref, exact_rec, parents_ref, parents_rec;
  for (auto [u, v] : reference.edges()) {
    if (!reference.is_latent(u) && !reference.is_latent(v)) continue;
    auto& bucket = reference.is_latent(u) ? exact_ref : parents_ref;
    bucket.emplace(map_id(u), map_id(v));
  }
  for (auto [u, v] : recovered.edges()) {
    if (!recovered.is_latent(u) && !recovered.is_latent(v)) continue;
    auto& bucket = recovered.is_latent(u) ? exact_rec : parents_rec;
    bucket.emplace(u, v);
  }
  return exact_ref == exact_rec &&
         std::includes(parents_rec.begin(), parents_rec.end(), parents_ref.begin(),
                       parents_ref.end());
}

}  // namespace lvar::testing
