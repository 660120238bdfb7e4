#include <algorithm>
#include <cstdint>
#include <map>

#include "lvar/errors.hpp"
#include "lvar/recover.hpp"

namespace lvar {

namespace {

using Bits = std::uint64_t;

/// Exhaustive enumeration of networks with exactly m latent nodes, labelled
/// so that latent edges only run from lower to higher index. A latent node's
/// reach is encoded as bits (t-1)*n + j for a path to observed j through t
/// latent nodes.
class MinimalNetworkSearch {
 public:
  MinimalNetworkSearch(const LinearMeasurements& meas, int m)
      : meas_(meas), n_(meas.observed_count()), k_max_(meas.max_index()), m_(m),
        column_(n_, 0), child_sets_(m), observed_children_(m), reach_(m) {
    for (int t = 1; t <= k_max_; ++t) {
      for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
          if (meas[t](j, i) != 0) {
            column_[i] |= bit(t, j);
            targets_ |= Bits{1} << j;
          }
        }
      }
    }
    for (int i = 0; i < n_; ++i) {
      if (column_[i] != 0) sources_.push_back(i);
    }
    valid_mask_ = k_max_ * n_ >= 64 ? ~Bits{0} : (Bits{1} << (k_max_ * n_)) - 1;
  }

  std::map<std::string, UnobservedNetwork> run() {
    assign(m_ - 1);
    return found_;
  }

 private:
  Bits bit(int t, int j) const { return Bits{1} << ((t - 1) * n_ + j); }

  Bits shifted(Bits reach, int latents) const {
    const int amount = latents * n_;
    if (amount >= 64) return reach == 0 ? 0 : ~Bits{0};
    const Bits moved = reach << amount;
    // Anything pushed past K latent nodes is unrealisable.
    if ((moved >> amount) != reach || (moved & ~valid_mask_) != 0) return ~Bits{0};
    return moved;
  }

  /// Some observed node could sit d-1 latent steps above h without creating
  /// a path outside the measurements.
  bool feasible(int h, Bits reach) const {
    for (int i : sources_) {
      for (int d = 1; d <= h + 1; ++d) {
        const Bits need = shifted(reach, d - 1);
        if ((need & ~column_[i]) == 0) return true;
      }
    }
    return false;
  }

  void assign(int h) {
    if (h < 0) {
      choose_parents();
      return;
    }
    const int later = m_ - 1 - h;
    for (Bits lc = 0; lc < (Bits{1} << later); ++lc) {
      Bits through = 0;
      for (int g = 0; g < later; ++g) {
        if ((lc >> g) & 1) through |= shifted(reach_[h + 1 + g], 1);
      }
      if ((through & ~valid_mask_) != 0) continue;
      // Observed children: subsets of the nodes that receive latent paths.
      for (Bits oc = targets_;; oc = (oc - 1) & targets_) {
        Bits reach = through;
        for (int j = 0; j < n_; ++j) {
          if ((oc >> j) & 1) reach |= bit(1, j);
        }
        if (reach != 0 && feasible(h, reach)) {
          child_sets_[h] = lc;
          observed_children_[h] = oc;
          reach_[h] = reach;
          assign(h - 1);
        }
        if (oc == 0) break;
      }
    }
  }

  void choose_parents() {
    // Parents of each observed source are chosen independently: any set of
    // latent nodes whose reaches stay inside the source's column and jointly
    // cover it.
    std::vector<std::vector<Bits>> options(sources_.size());
    for (std::size_t s = 0; s < sources_.size(); ++s) {
      const Bits col = column_[sources_[s]];
      std::vector<int> allowed;
      for (int h = 0; h < m_; ++h) {
        if ((reach_[h] & ~col) == 0) allowed.push_back(h);
      }
      const int count = static_cast<int>(allowed.size());
      for (Bits pick = 1; pick < (Bits{1} << count); ++pick) {
        Bits cover = 0;
        Bits latents = 0;
        for (int a = 0; a < count; ++a) {
          if ((pick >> a) & 1) {
            cover |= reach_[allowed[a]];
            latents |= Bits{1} << allowed[a];
          }
        }
        if (cover == col) options[s].push_back(latents);
      }
      if (options[s].empty()) return;
    }
    std::vector<Bits> chosen(sources_.size(), 0);
    emit(options, chosen, 0);
  }

  void emit(const std::vector<std::vector<Bits>>& options, std::vector<Bits>& chosen,
            std::size_t s) {
    if (s < options.size()) {
      for (Bits pick : options[s]) {
        chosen[s] = pick;
        emit(options, chosen, s + 1);
      }
      return;
    }
    UnobservedNetwork g(meas_.names(), m_);
    for (int h = 0; h < m_; ++h) {
      for (int g2 = 0; g2 < m_ - 1 - h; ++g2) {
        if ((child_sets_[h] >> g2) & 1) g.add_edge(n_ + h, n_ + h + 1 + g2);
      }
      for (int j = 0; j < n_; ++j) {
        if ((observed_children_[h] >> j) & 1) g.add_edge(n_ + h, j);
      }
    }
    for (std::size_t a = 0; a < sources_.size(); ++a) {
      for (int h = 0; h < m_; ++h) {
        if ((chosen[a] >> h) & 1) g.add_edge(sources_[a], n_ + h);
      }
    }
    if (!consistent(g, meas_)) return;
    auto key = canonical_form(g).key;
    found_.try_emplace(std::move(key), std::move(g));
  }

  const LinearMeasurements& meas_;
  int n_;
  int k_max_;
  int m_;
  std::vector<Bits> column_;
  std::vector<int> sources_;
  Bits targets_ = 0;
  Bits valid_mask_ = 0;
  std::vector<Bits> child_sets_;
  std::vector<Bits> observed_children_;
  std::vector<Bits> reach_;
  std::map<std::string, UnobservedNetwork> found_;
};

}  // namespace

std::vector<UnobservedNetwork> oracle_minimal(const LinearMeasurements& meas,
                                              const OracleOptions& options) {
  if (meas.observed_count() > kOracleMaxObserved || options.m_max > kOracleMaxLatent ||
      meas.max_index() > kOracleMaxIndex || options.m_max < 0) {
    throw Error(ErrorKind::ScaleExceeded, "oracle supports n <= 6, m_max <= 5, K <= 4");
  }
  const LinearMeasurements latent = meas.latent_part();
  std::vector<UnobservedNetwork> out;
  for (int m = 0; m <= options.m_max && out.empty(); ++m) {
    std::map<std::string, UnobservedNetwork> found;
    if (m == 0) {
      if (!latent.has_latent_paths()) {
        UnobservedNetwork g(meas.names(), 0);
        found.emplace(canonical_form(g).key, g);
      }
    } else if (latent.has_latent_paths()) {
      found = MinimalNetworkSearch(latent, m).run();
    }
    for (auto& [key, g] : found) {
      if (options.unique_paths_only && !has_unique_latent_paths(g)) continue;
      out.push_back(std::move(g));
    }
  }
  for (auto& g : out) attach_direct_edges(g, meas);
  std::vector<std::pair<CanonicalForm, UnobservedNetwork>> keyed;
  for (auto& g : out) keyed.emplace_back(canonical_form(g), std::move(g));
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  out.clear();
  for (auto& [key, g] : keyed) out.push_back(std::move(g));
  return out;
}

std::vector<UnobservedNetwork> oracle_minimal(const LinearMeasurements& meas, int m_max) {
  OracleOptions options;
  options.m_max = m_max;
  return oracle_minimal(meas, options);
}

}  // namespace lvar
