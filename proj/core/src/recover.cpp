#include "lvar/recover.hpp"

#include <algorithm>
#include <numeric>

#include "lvar/errors.hpp"

namespace lvar {

std::vector<NodeProfile> node_profiles(const LinearMeasurements& meas) {
  const int n = meas.observed_count();
  std::vector<NodeProfile> profiles(n);
  for (int i = 0; i < n; ++i) profiles[i].node = i;
  for (int k = 1; k <= meas.max_index(); ++k) {
    const Support& s = meas[k];
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (s(j, i) != 0) profiles[i].paths.emplace(j, k + 1);
      }
    }
  }
  for (auto& p : profiles) {
    for (const auto& [target, length] : p.paths) p.longest = std::max(p.longest, length);
    for (const auto& [target, length] : p.paths) {
      if (length == p.longest) p.reach.insert(target);
    }
  }
  return profiles;
}

std::set<int> unique_parents(const std::vector<NodeProfile>& profiles) {
  auto subset = [](const auto& a, const auto& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
  };
  std::set<int> out;
  const int n = static_cast<int>(profiles.size());
  for (int i = 0; i < n; ++i) {
    const auto& pi = profiles[i];
    if (pi.longest == 0) continue;
    bool candidate = true;
    for (int j = 0; j < n && candidate; ++j) {
      const auto& pj = profiles[j];
      if (j == i || pj.longest != pi.longest) continue;
      candidate = !subset(pj.reach, pi.reach) || (pj.reach == pi.reach && subset(pi.paths, pj.paths));
    }
    if (!candidate) continue;
    int first = i;
    for (int k = 0; k < i; ++k) {
      if (profiles[k].reach == pi.reach && profiles[k].paths == pi.paths) {
        first = k;
        break;
      }
    }
    if (first == i) out.insert(i);
  }
  return out;
}

DistanceMatrix distance_matrix(const LinearMeasurements& meas) {
  const int n = meas.observed_count();
  DistanceMatrix dm{Eigen::MatrixXi::Zero(n, n)};
  for (int k = 1; k <= meas.max_index(); ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (meas[k](j, i) == 0) continue;
        if (dm.d(i, j) != 0) {
          throw Error(ErrorKind::AmbiguousDistance,
                      "latent paths of lengths " + std::to_string(dm.d(i, j)) + " and " +
                          std::to_string(k + 1) + " from " + meas.names()[i] + " to " +
                          meas.names()[j]);
        }
        dm.d(i, j) = k + 1;
      }
    }
  }
  return dm;
}

std::vector<std::vector<int>> connected_classes(const LinearMeasurements& meas) {
  const int n = meas.observed_count();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<bool> touched(n, false);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int k = 1; k <= meas.max_index(); ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (meas[k](j, i) == 0) continue;
        touched[i] = touched[j] = true;
        const int a = find(i);
        const int b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  std::vector<std::vector<int>> classes;
  std::vector<int> slot(n, -1);
  for (int i = 0; i < n; ++i) {
    if (!touched[i]) continue;
    const int root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<int>(classes.size());
      classes.emplace_back();
    }
    classes[slot[root]].push_back(i);
  }
  return classes;
}

bool has_unique_latent_paths(const UnobservedNetwork& network) {
  const int n = network.observed_count();
  const int m = network.latent_count();
  if (!network.latent_subgraph_acyclic()) return false;
  Eigen::MatrixXi p21 = Eigen::MatrixXi::Zero(m, n);
  Eigen::MatrixXi p12 = Eigen::MatrixXi::Zero(n, m);
  Eigen::MatrixXi p22 = Eigen::MatrixXi::Zero(m, m);
  for (const auto& [u, v] : network.edges()) {
    const bool lu = network.is_latent(u);
    const bool lv = network.is_latent(v);
    if (!lu && lv) p21(v - n, u) = 1;
    if (lu && !lv) p12(v, u - n) = 1;
    if (lu && lv) p22(v - n, u - n) = 1;
  }
  // Path counts; m <= a few dozen keeps these far from overflow.
  Eigen::MatrixXi walk = p21;
  for (int k = 1; k <= m; ++k) {
    if ((p12 * walk).maxCoeff() > 1) return false;
    walk = p22 * walk;
    if ((walk.array() == 0).all()) break;
  }
  return true;
}

void attach_direct_edges(UnobservedNetwork& network, const LinearMeasurements& meas) {
  const int n = meas.observed_count();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (meas[0](j, i) != 0) network.add_edge(i, j);
    }
  }
}

bool is_hakimi_tree(const UnobservedNetwork& network) {
  const int total = network.node_count();
  std::vector<int> parent(total);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<int> indegree(total, 0);
  std::vector<int> outdegree(total, 0);
  for (const auto& [u, v] : network.edges()) {
    if (!network.is_latent(u) && !network.is_latent(v)) continue;
    ++outdegree[u];
    ++indegree[v];
    const int a = find(u);
    const int b = find(v);
    if (a == b) return false;  // skeleton cycle, including u <-> v pairs
    parent[a] = b;
  }
  for (int k = 0; k < network.latent_count(); ++k) {
    const int id = network.latent_node(k);
    if (indegree[id] < 2 || outdegree[id] < 2) return false;
  }
  return true;
}

UnobservedNetwork recover_tree(const LinearMeasurements& meas, int cap) {
  distance_matrix(meas);  // rejects pairs joined by paths of several lengths
  const auto candidates = nm(meas, cap);
  std::vector<const UnobservedNetwork*> trees;
  for (const auto& g : candidates) {
    if (is_hakimi_tree(g)) trees.push_back(&g);
  }
  if (trees.size() != 1) {
    throw Error(ErrorKind::NotIdentifiable,
                std::to_string(trees.size()) + " tree-shaped minimal networks (of " +
                    std::to_string(candidates.size()) + " minimal networks) match the measurements");
  }
  return *trees.front();
}

}  // namespace lvar
