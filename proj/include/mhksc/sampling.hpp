#pragma once

#include <cstdint>
#include <vector>

#include "mhksc/graph.hpp"

namespace mhksc {

struct SplitSpec {
  double train_fraction = 0.15;
  double valid_fraction = 0.15;
  uint32_t cap = 10000;  // upper bound on either set (kernel-matrix memory bound)
  uint64_t seed = 1;
};

struct Split {
  std::vector<uint32_t> train;
  std::vector<uint32_t> valid;
};

// Fair and representative subset selection: repeatedly take the highest-degree
// node still active (ties to the lowest index), deactivate its neighbors so the
// pick spreads across the graph, and when no active candidate remains start a
// new activation round with every unselected node reactivated. Nodes listed in
// `excluded` (bitmap of size n_nodes) are never selected and never deactivate
// anyone. The seed is accepted for interface stability; the (degree, index)
// order is total, so no random tie-break is currently reachable.
std::vector<uint32_t> furs_select(const Graph& g, uint32_t size, uint64_t seed,
                                  const std::vector<uint8_t>* excluded = nullptr);

// Training set first, then a disjoint validation set selected with the training
// nodes permanently out of play. Set sizes are round(fraction * n) capped at
// spec.cap. Fails if the sets cannot be disjoint or a fraction is out of range.
Split make_split(const Graph& g, const SplitSpec& spec);

}  // namespace mhksc
