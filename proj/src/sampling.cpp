#include "mhksc/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mhksc/common.hpp"

namespace mhksc {

std::vector<uint32_t> furs_select(const Graph& g, uint32_t size, uint64_t seed,
                                  const std::vector<uint8_t>* excluded) {
  (void)seed;
  uint32_t n = g.n_nodes;
  if (excluded && excluded->size() != n) fail(errc::invalid, "exclusion bitmap size mismatch");

  uint64_t selectable = 0;
  for (uint32_t i = 0; i < n; ++i)
    if (!excluded || !(*excluded)[i]) ++selectable;
  if (size > selectable) fail(errc::invalid, "subset size exceeds the selectable node count");

  // Degree-descending scan order; the (degree, index) key is total, so each
  // pick is the unique highest-degree active node.
  std::vector<uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](uint32_t a, uint32_t b) { return g.degree(a) > g.degree(b); });

  std::vector<uint32_t> picked;
  picked.reserve(size);
  std::vector<uint8_t> taken(n, 0);
  // deact[i] == round means i is deactivated for the current round only;
  // advancing the round reactivates every unselected node at once.
  std::vector<uint32_t> deact(n, ~uint32_t{0});
  uint32_t round = 0;
  size_t ptr = 0;
  while (picked.size() < size) {
    while (ptr < n) {
      uint32_t cand = order[ptr];
      if (!taken[cand] && deact[cand] != round && (!excluded || !(*excluded)[cand])) break;
      ++ptr;
    }
    if (ptr == n) {
      ++round;
      ptr = 0;
      continue;
    }
    uint32_t pick = order[ptr++];
    taken[pick] = 1;
    picked.push_back(pick);
    for (uint32_t nb : g.adj(pick)) deact[nb] = round;
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

Split make_split(const Graph& g, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0) || spec.train_fraction > 1.0 ||
      !(spec.valid_fraction > 0.0) || spec.valid_fraction > 1.0)
    fail(errc::invalid, "split fractions must lie in (0,1]");
  if (spec.cap == 0) fail(errc::invalid, "split cap must be positive");

  auto sized = [&](double fraction) {
    auto want = static_cast<uint64_t>(std::llround(fraction * g.n_nodes));
    return static_cast<uint32_t>(std::min<uint64_t>(want, spec.cap));
  };
  uint32_t n_train = sized(spec.train_fraction);
  uint32_t n_valid = sized(spec.valid_fraction);
  if (n_train == 0) fail(errc::invalid, "training set is empty at this fraction");
  if (n_valid == 0) fail(errc::invalid, "validation set is empty at this fraction");
  if (uint64_t{n_train} + n_valid > g.n_nodes)
    fail(errc::invalid, "train and validation sets cannot be disjoint at these sizes");

  Split s;
  s.train = furs_select(g, n_train, spec.seed, nullptr);
  std::vector<uint8_t> used(g.n_nodes, 0);
  for (uint32_t i : s.train) used[i] = 1;
  s.valid = furs_select(g, n_valid, spec.seed, &used);
  return s;
}

}  // namespace mhksc
