#include <algorithm>
#include <map>
#include <thread>

#include "lvar/errors.hpp"
#include "lvar/recover.hpp"

namespace lvar {

namespace {

using Frontier = std::map<std::string, UnobservedNetwork>;

/// Latent-path part of `meas` restricted to sources in `cls`.
LinearMeasurements class_measurements(const LinearMeasurements& meas, const std::vector<int>& cls) {
  const int n = meas.observed_count();
  std::vector<bool> member(n, false);
  for (int i : cls) member[i] = true;
  std::vector<Support> supports{Support::Zero(n, n)};
  for (int k = 1; k <= meas.max_index(); ++k) {
    Support s = Support::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      if (!member[i]) continue;
      for (int j = 0; j < n; ++j) s(j, i) = meas[k](j, i);
    }
    supports.push_back(std::move(s));
  }
  return LinearMeasurements(n, std::move(supports), meas.names());
}

void expand(const std::vector<const UnobservedNetwork*>& parents, const LinearMeasurements& meas,
            Frontier& out) {
  for (const UnobservedNetwork* g : parents) {
    const int n = g->observed_count();
    const int m = g->latent_count();
    for (int a = 0; a < m; ++a) {
      for (int b = a + 1; b < m; ++b) {
        UnobservedNetwork merged = merge(*g, n + a, n + b);
        if (!merged.latent_subgraph_acyclic() || !consistent(merged, meas)) continue;
        auto key = canonical_form(merged).key;
        out.try_emplace(std::move(key), std::move(merged));
      }
    }
  }
}

Frontier next_level(const std::vector<UnobservedNetwork>& frontier, const LinearMeasurements& meas,
                    unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(frontier.size()));
  std::vector<std::vector<const UnobservedNetwork*>> shards(std::max(1u, threads));
  for (std::size_t i = 0; i < frontier.size(); ++i) shards[i % shards.size()].push_back(&frontier[i]);

  std::vector<Frontier> partial(shards.size());
  if (shards.size() == 1) {
    expand(shards[0], meas, partial[0]);
  } else {
    std::vector<std::jthread> workers;
    for (std::size_t t = 0; t < shards.size(); ++t) {
      workers.emplace_back([&, t] { expand(shards[t], meas, partial[t]); });
    }
  }
  Frontier merged;
  for (auto& p : partial) merged.merge(p);
  return merged;
}

}  // namespace

UnobservedNetwork init_graph(const LinearMeasurements& meas, const std::vector<int>& cls, int cap) {
  const int n = meas.observed_count();
  std::vector<bool> member(n, false);
  for (int i : cls) member[i] = true;

  int needed = 0;
  for (int r = 1; r <= meas.max_index(); ++r) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (member[i] && member[j] && meas[r](j, i) != 0) needed += r;
      }
    }
  }
  if (needed > cap) {
    throw Error(ErrorKind::CapExceeded, "initial graph needs " + std::to_string(needed) +
                                            " latent nodes, cap is " + std::to_string(cap));
  }

  UnobservedNetwork g(meas.names(), 0);
  for (int r = 1; r <= meas.max_index(); ++r) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (!member[i] || !member[j] || meas[r](j, i) == 0) continue;
        int prev = i;
        for (int step = 0; step < r; ++step) {
          const int h = g.add_latent();
          g.add_edge(prev, h);
          prev = h;
        }
        g.add_edge(prev, j);
      }
    }
  }
  return g;
}

UnobservedNetwork merge(const UnobservedNetwork& g, int keep, int drop) {
  if (!g.is_latent(keep) || !g.is_latent(drop) || keep == drop || drop >= g.node_count() ||
      keep >= g.node_count()) {
    throw Error(ErrorKind::InvalidArgument, "merge needs two distinct latent nodes");
  }
  auto remap = [&](int id) {
    if (id == drop) id = keep;
    return id > drop ? id - 1 : id;
  };
  UnobservedNetwork out(g.observed(), g.latent_count() - 1);
  for (const auto& [u, v] : g.edges()) {
    if ((u == keep && v == drop) || (u == drop && v == keep)) continue;
    out.add_edge(remap(u), remap(v));
  }
  return out;
}

bool check(const UnobservedNetwork& g, int keep, int drop, const LinearMeasurements& meas) {
  const UnobservedNetwork merged = merge(g, keep, drop);
  return merged.latent_subgraph_acyclic() && consistent(merged, meas);
}

std::vector<MergeSearchState> merge_levels(const LinearMeasurements& meas,
                                           const std::vector<int>& cls, const NmOptions& options) {
  const LinearMeasurements target = class_measurements(meas, cls);
  std::vector<MergeSearchState> levels;
  levels.push_back({0, {init_graph(target, cls, options.cap)}});
  while (true) {
    Frontier next = next_level(levels.back().frontier, target, options.threads);
    if (next.empty()) break;
    MergeSearchState state{levels.back().level + 1, {}};
    state.frontier.reserve(next.size());
    for (auto& [key, g] : next) state.frontier.push_back(std::move(g));
    levels.push_back(std::move(state));
  }
  return levels;
}

std::vector<UnobservedNetwork> nm(const LinearMeasurements& meas, const NmOptions& options) {
  const int n = meas.observed_count();
  const auto classes = connected_classes(meas);

  // Cartesian product of the per-class minimal sets, joined by disjoint union.
  std::vector<UnobservedNetwork> combined{UnobservedNetwork(meas.names(), 0)};
  for (const auto& cls : classes) {
    auto levels = merge_levels(meas, cls, options);
    const auto& minimal = levels.back().frontier;
    std::vector<UnobservedNetwork> next;
    next.reserve(combined.size() * minimal.size());
    for (const auto& base : combined) {
      for (const auto& part : minimal) {
        UnobservedNetwork g(meas.names(), base.latent_count() + part.latent_count());
        const int offset = base.latent_count();
        for (const auto& [u, v] : base.edges()) g.add_edge(u, v);
        auto shift = [&](int id) { return id >= n ? id + offset : id; };
        for (const auto& [u, v] : part.edges()) g.add_edge(shift(u), shift(v));
        next.push_back(std::move(g));
      }
    }
    combined = std::move(next);
  }

  std::vector<std::pair<CanonicalForm, UnobservedNetwork>> keyed;
  keyed.reserve(combined.size());
  for (auto& g : combined) {
    attach_direct_edges(g, meas);
    keyed.emplace_back(canonical_form(g), std::move(g));
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<UnobservedNetwork> out;
  out.reserve(keyed.size());
  for (auto& [key, g] : keyed) out.push_back(std::move(g));
  return out;
}

std::vector<UnobservedNetwork> nm(const LinearMeasurements& meas, int cap) {
  NmOptions options;
  options.cap = cap;
  return nm(meas, options);
}

}  // namespace lvar
