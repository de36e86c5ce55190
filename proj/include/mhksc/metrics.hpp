#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mhksc/graph.hpp"

namespace mhksc {

// Hard assignment of items 0..n-1 to clusters 0..k-1; every cluster id occurs.
struct Partition {
  uint32_t k = 0;
  std::vector<uint32_t> assign;
};

// Newman modularity: sum over clusters of e_c/m - (d_c/2m)^2. Exactly 0.0 for
// the single-cluster partition.
double modularity(const Graph& g, const Partition& p);

// Mean over clusters of cut(c) / min(vol(c), vol(V) - vol(c)); a zero
// denominator (the whole graph, or an all-isolated cluster) contributes 0.
// Magnitudes are this implementation's own convention; only orderings are
// comparable across tools.
double cut_conductance(const Graph& g, const Partition& p);

// Hubert-Arabie adjusted Rand index in (-1, 1]; pair counts are exact wide
// integers, so identical partitions give exactly 1.0. Both trivial partitions
// being compared with themselves (all-singletons or one cluster) define 1.0.
double adjusted_rand_index(const Partition& a, const Partition& b);

// Variation of information normalized by log(n), in [0, 1]; 0.0 exactly for
// identical partitions. Requires n >= 2.
double variation_of_information(const Partition& a, const Partition& b);

// "node_id<ws>cluster_id" lines; '#' comments. Every graph node must appear
// exactly once and every node id must be known to the graph. Cluster ids are
// arbitrary tokens, densified in first-appearance order.
Partition load_partition(const Graph& g, const std::string& path);
void write_partition(const Partition& p, const std::vector<std::string>& labels,
                     const std::string& path);

}  // namespace mhksc
