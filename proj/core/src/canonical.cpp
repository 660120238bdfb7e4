#include "lvar/canonical.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <tuple>

#include "lvar/errors.hpp"

namespace lvar {

namespace {

struct LatentNeighbourhood {
  std::vector<int> observed_parents;
  std::vector<int> observed_children;
  std::vector<int> latent_parents;   // latent indices 0..m-1
  std::vector<int> latent_children;
};

class Canonicaliser {
 public:
  explicit Canonicaliser(const UnobservedNetwork& net) : net_(net), m_(net.latent_count()) {
    const int n = net.observed_count();
    hood_.resize(m_);
    for (const auto& [u, v] : net.edges()) {
      const bool lu = net.is_latent(u);
      const bool lv = net.is_latent(v);
      if (!lu && lv) hood_[v - n].observed_parents.push_back(u);
      if (lu && !lv) hood_[u - n].observed_children.push_back(v);
      if (lu && lv) {
        hood_[u - n].latent_children.push_back(v - n);
        hood_[v - n].latent_parents.push_back(u - n);
      }
    }
    for (auto& h : hood_) {
      std::sort(h.observed_parents.begin(), h.observed_parents.end());
      std::sort(h.observed_children.begin(), h.observed_children.end());
    }
  }

  std::string run() {
    std::vector<int> colours(m_, 0);
    {
      using Sig = std::pair<std::vector<int>, std::vector<int>>;
      std::vector<Sig> sigs(m_);
      for (int h = 0; h < m_; ++h) sigs[h] = {hood_[h].observed_parents, hood_[h].observed_children};
      colours = rank(sigs);
    }
    search(refine(colours));
    return *best_;  // every search branch ends in a discrete colouring
  }

 private:
  template <typename Sig>
  static std::vector<int> rank(const std::vector<Sig>& sigs) {
    std::vector<Sig> distinct = sigs;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::vector<int> out(sigs.size());
    for (std::size_t i = 0; i < sigs.size(); ++i) {
      out[i] = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), sigs[i]) -
                                distinct.begin());
    }
    return out;
  }

  static int class_count(const std::vector<int>& colours) {
    return colours.empty() ? 0 : *std::max_element(colours.begin(), colours.end()) + 1;
  }

  std::vector<int> refine(std::vector<int> colours) const {
    using Sig = std::tuple<int, std::vector<int>, std::vector<int>>;
    int classes = class_count(colours);
    while (true) {
      std::vector<Sig> sigs(m_);
      for (int h = 0; h < m_; ++h) {
        std::vector<int> up;
        std::vector<int> down;
        for (int g : hood_[h].latent_parents) up.push_back(colours[g]);
        for (int g : hood_[h].latent_children) down.push_back(colours[g]);
        std::sort(up.begin(), up.end());
        std::sort(down.begin(), down.end());
        sigs[h] = {colours[h], std::move(up), std::move(down)};
      }
      auto next = rank(sigs);
      const int next_classes = class_count(next);
      colours = std::move(next);
      if (next_classes == classes) return colours;
      classes = next_classes;
    }
  }

  bool twins(int a, int b) const {
    auto sorted = [](std::vector<int> v) {
      std::sort(v.begin(), v.end());
      return v;
    };
    const auto& x = hood_[a];
    const auto& y = hood_[b];
    if (x.observed_parents != y.observed_parents || x.observed_children != y.observed_children) {
      return false;
    }
    return sorted(x.latent_parents) == sorted(y.latent_parents) &&
           sorted(x.latent_children) == sorted(y.latent_children);
  }

  void search(const std::vector<int>& colours) {
    const int classes = class_count(colours);
    if (classes == m_) {
      auto key = encode(colours);
      if (!best_ || key < *best_) best_ = std::move(key);
      return;
    }
    // First non-singleton cell, in colour order.
    std::vector<int> sizes(classes, 0);
    for (int c : colours) ++sizes[c];
    int target = 0;
    while (sizes[target] < 2) ++target;

    std::vector<int> tried;
    for (int v = 0; v < m_; ++v) {
      if (colours[v] != target) continue;
      if (std::any_of(tried.begin(), tried.end(), [&](int t) { return twins(t, v); })) continue;
      tried.push_back(v);
      std::vector<std::pair<int, int>> sigs(m_);
      for (int h = 0; h < m_; ++h) sigs[h] = {colours[h], h == v ? 0 : 1};
      search(refine(rank(sigs)));
    }
  }

  std::string encode(const std::vector<int>& order) const {
    const int n = net_.observed_count();
    auto map_id = [&](int id) { return net_.is_latent(id) ? n + order[id - n] : id; };
    std::vector<std::pair<int, int>> edges;
    edges.reserve(net_.edges().size());
    for (const auto& [u, v] : net_.edges()) edges.emplace_back(map_id(u), map_id(v));
    std::sort(edges.begin(), edges.end());

    std::string key = std::to_string(n) + ';' + std::to_string(m_) + ';';
    for (const auto& name : net_.observed()) {
      key += name;
      key += '\x1f';
    }
    key += ';';
    for (const auto& [u, v] : edges) {
      key += std::to_string(u);
      key += '>';
      key += std::to_string(v);
      key += ',';
    }
    return key;
  }

  const UnobservedNetwork& net_;
  int m_;
  std::vector<LatentNeighbourhood> hood_;
  std::optional<std::string> best_;
};

}  // namespace

CanonicalForm canonical_form(const UnobservedNetwork& network) {
  return CanonicalForm{Canonicaliser(network).run()};
}

UnobservedNetwork relabel_latents(const UnobservedNetwork& network, const std::vector<int>& perm) {
  const int n = network.observed_count();
  const int m = network.latent_count();
  if (static_cast<int>(perm.size()) != m) {
    throw Error(ErrorKind::InvalidArgument, "permutation size differs from latent count");
  }
  UnobservedNetwork out(network.observed(), m);
  auto map_id = [&](int id) { return network.is_latent(id) ? n + perm[id - n] : id; };
  for (const auto& [u, v] : network.edges()) out.add_edge(map_id(u), map_id(v));
  return out;
}

}  // namespace lvar
