#include "mhksc/benchmark.hpp"

#include <algorithm>
#include <cmath>

#include "mhksc/common.hpp"

namespace mhksc {

BenchmarkSpec uniform_benchmark_spec(uint32_t nodes, uint32_t n_macro, uint32_t n_micro,
                                     double mu1, double mu2, double avg_degree, uint64_t seed) {
  if (n_macro == 0 || n_micro < n_macro || nodes < n_micro)
    fail(errc::invalid, "need macro >= 1, micro >= macro, nodes >= micro");
  BenchmarkSpec spec;
  spec.mu1 = mu1;
  spec.mu2 = mu2;
  spec.avg_degree = avg_degree;
  spec.seed = seed;

  std::vector<uint32_t> per_macro(n_macro, n_micro / n_macro);
  for (uint32_t i = 0; i < n_micro % n_macro; ++i) ++per_macro[i];
  std::vector<uint32_t> sizes(n_micro, nodes / n_micro);
  for (uint32_t i = 0; i < nodes % n_micro; ++i) ++sizes[i];

  spec.micro_sizes.resize(n_macro);
  uint32_t next = 0;
  for (uint32_t m = 0; m < n_macro; ++m)
    for (uint32_t c = 0; c < per_macro[m]; ++c) spec.micro_sizes[m].push_back(sizes[next++]);
  return spec;
}

namespace {

struct Block {
  uint32_t macro = 0;
  uint32_t first = 0;  // first node index
  uint32_t size = 0;
};

// Bernoulli(p) over a sequence of `total` pair slots by geometric skipping:
// visits exactly the successes, in increasing slot order.
template <class Emit>
void sample_slots(Rand& rng, uint64_t total, double p, Emit&& emit) {
  if (total == 0 || p <= 0.0) return;
  if (p >= 1.0) {
    for (uint64_t s = 0; s < total; ++s) emit(s);
    return;
  }
  double inv_log_q = 1.0 / std::log1p(-p);
  uint64_t s = 0;
  while (true) {
    double skip = std::floor(std::log(rng.unit()) * inv_log_q);
    if (skip >= static_cast<double>(total)) return;
    s += static_cast<uint64_t>(skip);
    if (s >= total) return;
    emit(s);
    ++s;
  }
}

}  // namespace

Benchmark generate(const BenchmarkSpec& spec) {
  if (!(spec.mu1 >= 0.0 && spec.mu1 <= spec.mu2 && spec.mu2 <= 1.0))
    fail(errc::invalid, "mixing fractions must satisfy 0 <= mu1 <= mu2 <= 1");
  if (!(spec.avg_degree > 0.0)) fail(errc::invalid, "average degree must be positive");
  if (spec.micro_sizes.empty()) fail(errc::invalid, "no communities given");

  std::vector<Block> blocks;
  std::vector<uint32_t> macro_size;
  uint32_t n = 0;
  for (uint32_t m = 0; m < spec.micro_sizes.size(); ++m) {
    if (spec.micro_sizes[m].empty()) fail(errc::invalid, "macro community with no micro communities");
    uint32_t msize = 0;
    for (uint32_t s : spec.micro_sizes[m]) {
      if (s == 0) fail(errc::invalid, "empty micro community");
      blocks.push_back({m, n, s});
      n += s;
      msize += s;
    }
    macro_size.push_back(msize);
  }
  if (n < 10) fail(errc::invalid, "benchmark needs at least 10 nodes");

  double k = spec.avg_degree;
  auto r = static_cast<uint32_t>(blocks.size());

  // Per-node edge rates toward each of the three zones; a pair's probability
  // averages the two endpoints' rates so every node meets its expected budget.
  std::vector<double> rate_intra(r, 0.0), rate_macro(r, 0.0), rate_inter(r, 0.0);
  for (uint32_t b = 0; b < r; ++b) {
    uint32_t s = blocks[b].size;
    uint32_t peers_macro = macro_size[blocks[b].macro] - s;
    uint32_t peers_inter = n - macro_size[blocks[b].macro];
    if (s >= 2) {
      rate_intra[b] = (1.0 - spec.mu2) * k / (s - 1);
      if ((1.0 - spec.mu2) * k < 1.0)
        fail(errc::invalid, "expected intra-community degree below 1");
      if (rate_intra[b] > 1.0)
        fail(errc::invalid, "community of size " + std::to_string(s) +
                                " too small for the requested intra degree");
    } else if ((1.0 - spec.mu2) * k > 0.0) {
      fail(errc::invalid, "singleton community cannot host intra-community edges");
    }
    if (peers_macro > 0) rate_macro[b] = std::min(1.0, (spec.mu2 - spec.mu1) * k / peers_macro);
    if (peers_inter > 0) rate_inter[b] = std::min(1.0, spec.mu1 * k / peers_inter);
  }

  // One uniform stream consumed in a fixed block-pair order keeps the graph a
  // pure function of the parameters.
  Rand rng(spec.seed);
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  edges.reserve(static_cast<size_t>(0.6 * k * n));
  for (uint32_t a = 0; a < r; ++a) {
    const Block& A = blocks[a];
    if (A.size >= 2) {
      uint64_t pairs = uint64_t{A.size} * (A.size - 1) / 2;
      // Triangular slot -> (i, j), i < j; slots arrive increasing, so the row
      // cursor only moves forward.
      uint32_t row = 0;
      uint64_t row_start = 0;
      sample_slots(rng, pairs, rate_intra[a], [&](uint64_t slot) {
        while (slot >= row_start + (A.size - 1 - row)) {
          row_start += A.size - 1 - row;
          ++row;
        }
        auto col = static_cast<uint32_t>(row + 1 + (slot - row_start));
        edges.emplace_back(A.first + row, A.first + col);
      });
    }
    for (uint32_t b = a + 1; b < r; ++b) {
      const Block& B = blocks[b];
      bool same_macro = A.macro == B.macro;
      double p = same_macro ? 0.5 * (rate_macro[a] + rate_macro[b])
                            : 0.5 * (rate_inter[a] + rate_inter[b]);
      sample_slots(rng, uint64_t{A.size} * B.size, std::min(1.0, p), [&](uint64_t slot) {
        edges.emplace_back(A.first + static_cast<uint32_t>(slot / B.size),
                           B.first + static_cast<uint32_t>(slot % B.size));
      });
    }
  }

  Benchmark out;
  out.graph = build_graph(n, edges);
  out.macro_truth.k = static_cast<uint32_t>(spec.micro_sizes.size());
  out.micro_truth.k = r;
  out.macro_truth.assign.resize(n);
  out.micro_truth.assign.resize(n);
  for (uint32_t b = 0; b < r; ++b)
    for (uint32_t i = 0; i < blocks[b].size; ++i) {
      out.macro_truth.assign[blocks[b].first + i] = blocks[b].macro;
      out.micro_truth.assign[blocks[b].first + i] = b;
    }
  return out;
}

}  // namespace mhksc
