#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mhksc {

// Immutable sparse undirected unweighted graph. Neighbor lists are sorted and
// duplicate-free, adjacency is symmetric, and there are no self-loops. Node
// indices are dense; `labels` remembers the original id tokens in
// first-appearance order of the source that built the graph.
struct Graph {
  uint32_t n_nodes = 0;
  uint64_t n_edges = 0;  // each undirected edge counted once
  std::vector<uint64_t> offsets;
  std::vector<uint32_t> neighbors;
  std::vector<std::string> labels;
  std::unordered_map<std::string, uint32_t> label_index;

  std::span<const uint32_t> adj(uint32_t i) const {
    return {neighbors.data() + offsets[i], neighbors.data() + offsets[i + 1]};
  }
  uint32_t degree(uint32_t i) const { return static_cast<uint32_t>(offsets[i + 1] - offsets[i]); }
  uint32_t index_of(const std::string& label) const;
};

// Builds a Graph from an arbitrary edge multiset: symmetrizes, deduplicates,
// drops self-loops. `n` fixes the node-index space; labels default to decimal
// index strings when omitted.
Graph build_graph(uint32_t n, const std::vector<std::pair<uint32_t, uint32_t>>& edges,
                  std::vector<std::string> labels = {});

// Reads "u<ws>v" lines; '#' starts a comment, blank lines are skipped. Node ids
// are arbitrary whitespace-free tokens, densely reindexed in first-appearance
// order. Lines are treated as undirected edges regardless of `directed_input`
// (the flag documents the source's intent; symmetrization makes both readings
// produce the same graph). Self-loop lines register the node, then drop.
Graph load_edge_list(const std::string& path, bool directed_input = false);

// Inverse of load_edge_list up to relabeling. Isolated nodes are carried as
// "label label" self-loop lines, which the loader registers and drops.
void write_edge_list(const Graph& g, const std::string& path);

// Sparse binary column of the adjacency matrix: the sorted neighbor list.
std::span<const uint32_t> adjacency_column(const Graph& g, uint32_t i);

// Mean of the local clustering coefficients; nodes of degree < 2 contribute 0.
double global_clustering_coefficient(const Graph& g);

}  // namespace mhksc
