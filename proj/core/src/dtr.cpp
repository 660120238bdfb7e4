#include <algorithm>
#include <map>
#include <optional>

#include "lvar/errors.hpp"
#include "lvar/recover.hpp"

namespace lvar {

namespace {

using PathSet = std::set<std::pair<int, int>>;

template <class Set>
bool subset(const Set& a, const Set& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

PathSet lengthen(const PathSet& paths) {
  PathSet out;
  for (const auto& [target, length] : paths) out.emplace(target, length + 1);
  return out;
}

/// Chooses the latent forest. Latent s has path set T_s (the paths of its
/// unique parent); its observed children give the length-2 pairs and every
/// latent child c contributes T_c lengthened by one. A parent assignment is
/// accepted when it reproduces every T_s exactly.
class ForestSearch {
 public:
  ForestSearch(std::vector<PathSet> paths, std::vector<std::vector<int>> preferred)
      : paths_(std::move(paths)), count_(static_cast<int>(paths_.size())), parent_(count_, -1) {
    lengthened_.reserve(count_);
    for (const auto& t : paths_) lengthened_.push_back(lengthen(t));
    options_.resize(count_);
    last_decider_.assign(count_, -1);
    for (int s = 0; s < count_; ++s) {
      // Candidates satisfying the depth/reach nesting first, then any other
      // latent whose paths contain the lengthened paths of s, then none.
      auto& opts = options_[s];
      for (int k : preferred[s]) {
        if (k != s && subset(lengthened_[s], paths_[k])) opts.push_back(k);
      }
      for (int k = 0; k < count_; ++k) {
        if (k != s && subset(lengthened_[s], paths_[k]) &&
            std::find(opts.begin(), opts.end(), k) == opts.end()) {
          opts.push_back(k);
        }
      }
      for (int k : opts) last_decider_[k] = std::max(last_decider_[k], s);
      opts.push_back(-1);
    }
  }

  template <class Accept>
  bool run(Accept&& accept) {
    for (int k = 0; k < count_; ++k) {
      if (last_decider_[k] < 0 && !covered(k)) return false;
    }
    return descend(0, accept);
  }

  const std::vector<int>& parents() const { return parent_; }

 private:
  bool covered(int k) const {
    PathSet built;
    for (const auto& p : paths_[k]) {
      if (p.second == 2) built.insert(p);
    }
    for (int s = 0; s < count_; ++s) {
      if (parent_[s] == k) built.insert(lengthened_[s].begin(), lengthened_[s].end());
    }
    return built == paths_[k];
  }

  template <class Accept>
  bool descend(int s, Accept& accept) {
    if (++visited_ > kBudget) return false;
    if (s == count_) return accept(parent_);
    for (int k : options_[s]) {
      parent_[s] = k;
      bool ok = true;
      for (int q = 0; q < count_ && ok; ++q) {
        if (last_decider_[q] == s) ok = covered(q);
      }
      if (ok && descend(s + 1, accept)) return true;
    }
    parent_[s] = -1;
    return false;
  }

  static constexpr long kBudget = 1'000'000;

  std::vector<PathSet> paths_;
  std::vector<PathSet> lengthened_;
  int count_;
  std::vector<int> parent_;
  std::vector<std::vector<int>> options_;
  std::vector<int> last_decider_;
  long visited_ = 0;
};

}  // namespace

UnobservedNetwork dtr(const LinearMeasurements& meas) {
  const int n = meas.observed_count();
  const auto profiles = node_profiles(meas);
  const auto parent_set = unique_parents(profiles);
  const std::vector<int> parents(parent_set.begin(), parent_set.end());
  const int m = static_cast<int>(parents.size());

  std::vector<PathSet> paths;
  std::vector<std::vector<int>> preferred(m);
  for (int s = 0; s < m; ++s) {
    const auto& ps = profiles[parents[s]];
    paths.push_back(ps.paths);
    for (int k = 0; k < m; ++k) {
      const auto& pk = profiles[parents[k]];
      if (k != s && pk.longest == ps.longest + 1 && subset(ps.reach, pk.reach)) {
        preferred[s].push_back(k);
      }
    }
  }

  auto build = [&](const std::vector<int>& latent_parent) {
    UnobservedNetwork net(meas.names(), m);
    for (int s = 0; s < m; ++s) {
      if (latent_parent[s] >= 0) net.add_edge(n + latent_parent[s], n + s);
      for (const auto& [target, length] : paths[s]) {
        if (length == 2) net.add_edge(n + s, target);
      }
      for (int i = 0; i < n; ++i) {
        if (subset(paths[s], profiles[i].paths)) net.add_edge(i, n + s);
      }
    }
    attach_direct_edges(net, meas);
    return net;
  };

  // Several forests can reproduce the measurements when a latent subtree's
  // paths are already covered by a sibling; a single tree is preferred.
  std::optional<UnobservedNetwork> forest;
  std::optional<UnobservedNetwork> tree;
  ForestSearch search(paths, preferred);
  search.run([&](const std::vector<int>& latent_parent) {
    UnobservedNetwork candidate = build(latent_parent);
    if (!consistent(candidate, meas)) return false;
    if (std::count(latent_parent.begin(), latent_parent.end(), -1) <= 1) {
      tree = std::move(candidate);
      return true;
    }
    if (!forest) forest = std::move(candidate);
    return false;
  });
  if (tree) return *tree;
  if (!forest) {
    throw Error(ErrorKind::InconsistentRecovery,
                "no directed latent tree over the detected unique parents reproduces the "
                "measurements; the network violates the unique parent / unique leaf child "
                "conditions");
  }
  return *forest;
}

}  // namespace lvar
