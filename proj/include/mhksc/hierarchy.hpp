#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mhksc/ksc.hpp"
#include "mhksc/metrics.hpp"

namespace mhksc {

// Cosine distance 1 - a.b/(|a||b|) in [0, 2]; if either vector is zero the
// distance is defined as 1 (orthogonal convention).
double cos_dist(std::span<const double> a, std::span<const double> b);

// Dense symmetric pairwise-distance matrix with zero diagonal.
struct AffinityMatrix {
  uint32_t n = 0;
  std::vector<double> values;  // n x n row-major

  double at(uint32_t i, uint32_t j) const { return values[size_t{i} * n + j]; }
  double& at(uint32_t i, uint32_t j) { return values[size_t{i} * n + j]; }
};

// Full pairwise cos_dist over the latent rows; refuses more than `cap` rows
// (the dense-matrix memory bound).
AffinityMatrix build_affinity(const LatentMatrix& m, unsigned threads = 0, uint32_t cap = 10000);

struct FlatClustering {
  uint32_t k = 0;
  std::vector<uint32_t> assign;                   // item -> cluster id, formation order
  std::vector<std::vector<uint32_t>> clusters;    // sorted member lists
};

// Each round seeds on the row with the most strictly-within-threshold
// neighbors among the remaining items (ties to the lowest index; the zero
// diagonal keeps every seed inside its own cluster), claims that
// neighborhood, and repeats on what is left.
FlatClustering greedy_max_order(const AffinityMatrix& s, double t);

// Mean pairwise distance between member sets: entry (i,j) averages s over
// cluster_i x cluster_j; diagonal 0.
AffinityMatrix coarsen_affinity(const AffinityMatrix& s, const FlatClustering& c);

// Mean over rows of the smallest off-diagonal entry; needs at least 2 rows.
double next_threshold(const AffinityMatrix& s);

// Increasing distance thresholds, ground threshold first.
struct ThresholdSet {
  std::vector<double> values;
};

struct HierarchyOptions {
  double t0 = 0.15;                  // ground threshold, must lie in (0, 2)
  uint32_t max_cluster_size = 10000;
  uint32_t max_cluster_count = 10000;
  uint32_t affinity_cap = 10000;
  unsigned threads = 0;
};

// Nested multilevel partition, finest level first. Level L >= 1 clusters group
// the clusters of level L-1 (`children`); every level also carries the
// propagated per-item assignment, so each level is a partition of all items.
struct ClusterTree {
  uint32_t n_items = 0;
  std::vector<uint32_t> item_ids;  // row -> node index (identity for whole-graph trees)
  std::vector<std::string> item_labels;  // external ids; empty when unknown

  struct Level {
    double threshold = 0;
    uint32_t k = 0;
    std::vector<uint32_t> assign;
    std::vector<std::vector<uint32_t>> children;  // empty at level 0
  };
  std::vector<Level> levels;
};

// Validation pass: cluster the affinity at t0, then repeatedly coarsen, derive
// the next threshold (clamped non-decreasing), and re-cluster until a single
// cluster remains or a pass stops merging. Returns the discovered thresholds
// and the validation hierarchy.
std::pair<ThresholdSet, ClusterTree> determine_thresholds(const LatentMatrix& valid,
                                                          const HierarchyOptions& opt);

// Test pass over all projected rows: the ground level seeds clusters in row
// order at the second threshold (t0 is a validation-only level; with a
// single-threshold set the ground level falls back to t0). Ground clusters are
// truncated at max_cluster_size; exceeding max_cluster_count is an error.
// Higher levels re-apply greedy_max_order on coarsened affinities for the
// remaining thresholds. Thresholds that merge nothing are consumed without
// recording a level.
ClusterTree mh_ksc(const LatentMatrix& test, const ThresholdSet& ts, const HierarchyOptions& opt);

// Throws errc::invalid if any level is not a partition of all items, any
// cluster fails to nest into exactly one parent, cluster counts fail to
// decrease upward, or level thresholds decrease.
void validate_tree(const ClusterTree& t);

// Per-item partition at one level (0 = finest).
Partition level_partition(const ClusterTree& t, uint32_t level);

// Structured-text persistence (self-contained, byte-deterministic); item
// labels round-trip when present.
void save_tree(const ClusterTree& t, const std::string& path);
ClusterTree load_tree(const std::string& path);

// Parent/child tree in Graphviz dot syntax, one node per cluster.
void export_tree_dot(const ClusterTree& t, const std::string& path);

// One row per item, ordered by the cluster path from the coarsest level down
// (rows of one cluster are contiguous at every level: block-diagonal order),
// with the cluster id at each level. `only_level` restricts the cluster
// columns to one level and must then be in range; the default emits all.
void export_membership_matrix(const ClusterTree& t, const std::string& path,
                              uint32_t only_level = ~uint32_t{0});

}  // namespace mhksc
