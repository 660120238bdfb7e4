#pragma once

#include <compare>
#include <string>

#include "lvar/model.hpp"

namespace lvar {

/// Byte string identifying a network up to relabeling of its latent nodes.
/// Observed labels and ids are part of the key.
struct CanonicalForm {
  std::string key;

  friend auto operator<=>(const CanonicalForm&, const CanonicalForm&) = default;
};

/// Colour refinement on latent nodes followed by an exhaustive
/// individualise-and-refine search over the remaining symmetric cells; the
/// key is the lexicographically smallest edge list over all leaves.
CanonicalForm canonical_form(const UnobservedNetwork& network);

/// Copy of `network` with latent node k renamed to perm[k].
UnobservedNetwork relabel_latents(const UnobservedNetwork& network, const std::vector<int>& perm);

}  // namespace lvar
