#pragma once

#include <cstdint>
#include <vector>

#include "mhksc/graph.hpp"
#include "mhksc/metrics.hpp"

namespace mhksc {

// Two-level planted-partition benchmark. Each node's expected edge budget of
// avg_degree splits as (1-mu2) inside its micro community, (mu2-mu1) inside its
// macro community but outside the micro, and mu1 outside the macro. Degrees are
// homogeneous by construction (no power-law tails).
struct BenchmarkSpec {
  std::vector<std::vector<uint32_t>> micro_sizes;  // grouped by macro community
  double mu1 = 0.1;
  double mu2 = 0.2;
  double avg_degree = 20.0;
  uint64_t seed = 1;
};

// Distributes `n_micro` communities over `n_macro` groups and `nodes` over the
// communities as evenly as possible.
BenchmarkSpec uniform_benchmark_spec(uint32_t nodes, uint32_t n_macro, uint32_t n_micro,
                                     double mu1, double mu2, double avg_degree, uint64_t seed);

struct Benchmark {
  Graph graph;
  Partition macro_truth;
  Partition micro_truth;
};

// Deterministic for a given spec. Cross-block pair probabilities average the two
// endpoints' per-node rates; within-micro pairs use (1-mu2)*avg_degree/(s-1),
// which must not exceed 1 (community big enough for the requested intra degree).
Benchmark generate(const BenchmarkSpec& spec);

}  // namespace mhksc
