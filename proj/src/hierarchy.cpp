#include "mhksc/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mhksc/common.hpp"

namespace mhksc {

double cos_dist(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(errc::invalid, "cosine distance of unequal lengths");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 1.0;
  double d = 1.0 - dot / std::sqrt(na * nb);
  return std::clamp(d, 0.0, 2.0);
}

AffinityMatrix build_affinity(const LatentMatrix& m, unsigned threads, uint32_t cap) {
  if (m.rows() > cap)
    fail(errc::cap, "affinity matrix over " + std::to_string(m.rows()) +
                        " rows exceeds the cap of " + std::to_string(cap));
  auto n = static_cast<uint32_t>(m.rows());
  AffinityMatrix s;
  s.n = n;
  s.values.assign(size_t{n} * n, 0.0);
  // Each unordered pair is written once, by the worker owning its lower row
  // index; the mirror write targets a cell no other worker touches.
  parallel_for(n, threads, [&](size_t lo, size_t hi, unsigned) {
    for (size_t i = lo; i < hi; ++i)
      for (size_t j = i + 1; j < n; ++j) {
        double d = cos_dist(m.row(i), m.row(j));
        s.values[i * n + j] = d;
        s.values[j * n + i] = d;
      }
  });
  return s;
}

FlatClustering greedy_max_order(const AffinityMatrix& s, double t) {
  uint32_t n = s.n;
  if (n == 0) fail(errc::invalid, "clustering an empty matrix");
  std::vector<uint8_t> left(n, 1);
  // count[i] = strictly-within-threshold entries of row i among remaining
  // items; the zero diagonal keeps i itself in its own count.
  std::vector<uint32_t> count(n, 0);
  for (uint32_t i = 0; i < n; ++i)
    for (uint32_t j = 0; j < n; ++j)
      if (s.at(i, j) < t) ++count[i];

  FlatClustering out;
  out.assign.assign(n, 0);
  uint32_t remaining = n;
  while (remaining > 0) {
    uint32_t seed = ~uint32_t{0};
    for (uint32_t i = 0; i < n; ++i)
      if (left[i] && (seed == ~uint32_t{0} || count[i] > count[seed])) seed = i;

    std::vector<uint32_t> members;
    for (uint32_t j = 0; j < n; ++j)
      if (left[j] && s.at(seed, j) < t) members.push_back(j);
    uint32_t id = out.k++;
    for (uint32_t j : members) {
      left[j] = 0;
      out.assign[j] = id;
    }
    remaining -= static_cast<uint32_t>(members.size());
    for (uint32_t j : members)
      for (uint32_t i = 0; i < n; ++i)
        if (left[i] && s.at(i, j) < t) --count[i];
    out.clusters.push_back(std::move(members));
  }
  return out;
}

AffinityMatrix coarsen_affinity(const AffinityMatrix& s, const FlatClustering& c) {
  if (c.assign.size() != s.n) fail(errc::invalid, "clustering does not match the matrix");
  uint32_t r = c.k;
  AffinityMatrix out;
  out.n = r;
  out.values.assign(size_t{r} * r, 0.0);
  for (uint32_t a = 0; a < r; ++a)
    for (uint32_t b = a + 1; b < r; ++b) {
      double sum = 0.0;
      for (uint32_t i : c.clusters[a])
        for (uint32_t j : c.clusters[b]) sum += s.at(i, j);
      double mean = sum / (static_cast<double>(c.clusters[a].size()) *
                           static_cast<double>(c.clusters[b].size()));
      out.at(a, b) = mean;
      out.at(b, a) = mean;
    }
  return out;
}

double next_threshold(const AffinityMatrix& s) {
  if (s.n < 2) fail(errc::invalid, "threshold derivation needs at least 2 clusters");
  double total = 0.0;
  for (uint32_t i = 0; i < s.n; ++i) {
    double best = 0.0;
    bool first = true;
    for (uint32_t j = 0; j < s.n; ++j) {
      if (j == i) continue;
      if (first || s.at(i, j) < best) {
        best = s.at(i, j);
        first = false;
      }
    }
    total += best;
  }
  return total / s.n;
}

namespace {

// Thresholds are applied inclusively: a distance exactly equal to the derived
// threshold still merges. The derivation averages entries of the same matrix
// the comparison runs on, so at small cluster counts exact collisions are
// routine (two clusters left: the derived threshold IS their distance) and a
// strict comparison would stall the agglomeration.
double inclusive(double t) { return std::nextafter(t, std::numeric_limits<double>::infinity()); }

void append_level(ClusterTree& tree, double threshold, const FlatClustering& cl) {
  ClusterTree::Level level;
  level.threshold = threshold;
  level.k = cl.k;
  if (tree.levels.empty()) {
    level.assign = cl.assign;
  } else {
    const auto& prev = tree.levels.back();
    level.assign.resize(tree.n_items);
    for (uint32_t i = 0; i < tree.n_items; ++i) level.assign[i] = cl.assign[prev.assign[i]];
    level.children = cl.clusters;
  }
  tree.levels.push_back(std::move(level));
}

void check_options(const HierarchyOptions& opt) {
  if (!(opt.t0 > 0.0) || !(opt.t0 < 2.0))
    fail(errc::invalid, "ground threshold must lie strictly between 0 and 2");
  if (opt.max_cluster_size == 0 || opt.max_cluster_count == 0 || opt.affinity_cap == 0)
    fail(errc::invalid, "caps must be positive");
}

// Ground pass over the full latent matrix in row order: each still-unassigned
// row seeds a cluster and claims every later unassigned row within the
// threshold, truncated to the first max_size takers. Only the cluster count
// has a hard cap. Works on unit rows so per-pair cost is one dot product; a
// zero row stays zero and sits at distance 1 from everything including other
// zero rows, matching the cosine-distance convention.
FlatClustering ground_cluster(const LatentMatrix& m, double t, uint32_t max_size,
                              uint32_t max_count) {
  auto n = static_cast<uint32_t>(m.rows());
  if (n == 0) fail(errc::invalid, "clustering an empty latent matrix");
  uint32_t d = m.cols;
  std::vector<double> unit(m.values.size());
  for (uint32_t i = 0; i < n; ++i) {
    const double* row = m.values.data() + size_t{i} * d;
    double norm2 = 0.0;
    for (uint32_t l = 0; l < d; ++l) norm2 += row[l] * row[l];
    double inv = norm2 > 0.0 ? 1.0 / std::sqrt(norm2) : 0.0;
    for (uint32_t l = 0; l < d; ++l) unit[size_t{i} * d + l] = row[l] * inv;
  }

  FlatClustering out;
  out.assign.assign(n, 0);
  std::vector<uint8_t> done(n, 0);
  for (uint32_t i = 0; i < n; ++i) {
    if (done[i]) continue;
    if (out.k == max_count)
      fail(errc::cap, "ground level exceeds the cluster-count cap of " + std::to_string(max_count));
    uint32_t id = out.k++;
    std::vector<uint32_t> members{i};
    done[i] = 1;
    out.assign[i] = id;
    const double* seed = unit.data() + size_t{i} * d;
    bool seed_zero = true;
    for (uint32_t l = 0; l < d; ++l)
      if (seed[l] != 0.0) {
        seed_zero = false;
        break;
      }
    for (uint32_t j = i + 1; j < n; ++j) {
      if (done[j]) continue;
      double dist;
      if (seed_zero) {
        dist = 1.0;
      } else {
        const double* other = unit.data() + size_t{j} * d;
        double dot = 0.0;
        bool other_zero = true;
        for (uint32_t l = 0; l < d; ++l) {
          dot += seed[l] * other[l];
          if (other[l] != 0.0) other_zero = false;
        }
        dist = other_zero ? 1.0 : 1.0 - dot;
      }
      if (dist < t) {
        members.push_back(j);
        done[j] = 1;
        out.assign[j] = id;
        // Full clusters stop absorbing; later qualifying rows seed their own.
        if (members.size() == max_size) break;
      }
    }
    out.clusters.push_back(std::move(members));
  }
  return out;
}

// Mean pairwise distance between ground clusters, factored through per-cluster
// sums of unit rows: mean(1 - u_i . u_j) = 1 - (sum_A u).(sum_B u)/(|A||B|).
// Zero rows contribute a zero unit vector, which reproduces their defined
// distance of 1 to everything.
AffinityMatrix ground_affinity(const LatentMatrix& m, const FlatClustering& c, unsigned threads) {
  uint32_t d = m.cols;
  uint32_t r = c.k;
  std::vector<double> sums(size_t{r} * d, 0.0);
  for (uint32_t a = 0; a < r; ++a) {
    double* acc = sums.data() + size_t{a} * d;
    for (uint32_t i : c.clusters[a]) {
      const double* row = m.values.data() + size_t{i} * d;
      double norm2 = 0.0;
      for (uint32_t l = 0; l < d; ++l) norm2 += row[l] * row[l];
      double inv = norm2 > 0.0 ? 1.0 / std::sqrt(norm2) : 0.0;
      for (uint32_t l = 0; l < d; ++l) acc[l] += row[l] * inv;
    }
  }
  AffinityMatrix out;
  out.n = r;
  out.values.assign(size_t{r} * r, 0.0);
  parallel_for(r, threads, [&](size_t lo, size_t hi, unsigned) {
    for (size_t a = lo; a < hi; ++a)
      for (size_t b = a + 1; b < r; ++b) {
        double dot = 0.0;
        for (uint32_t l = 0; l < d; ++l) dot += sums[a * d + l] * sums[b * d + l];
        double mean = 1.0 - dot / (static_cast<double>(c.clusters[a].size()) *
                                   static_cast<double>(c.clusters[b].size()));
        out.values[a * r + b] = mean;
        out.values[b * r + a] = mean;
      }
  });
  return out;
}

}  // namespace

std::pair<ThresholdSet, ClusterTree> determine_thresholds(const LatentMatrix& valid,
                                                          const HierarchyOptions& opt) {
  check_options(opt);
  if (valid.rows() < 2) fail(errc::invalid, "threshold search needs at least 2 validation rows");

  AffinityMatrix s = build_affinity(valid, opt.threads, opt.affinity_cap);

  ClusterTree tree;
  tree.n_items = s.n;
  tree.item_ids = valid.node_ids;

  ThresholdSet ts;
  ts.values.push_back(opt.t0);
  FlatClustering cl = greedy_max_order(s, inclusive(opt.t0));
  append_level(tree, opt.t0, cl);

  double last = opt.t0;
  while (cl.k > 1) {
    s = coarsen_affinity(s, cl);
    double t = std::max(next_threshold(s), last);
    FlatClustering merged = greedy_max_order(s, inclusive(t));
    if (merged.k == cl.k) break;  // nothing merges: the sequence has converged
    ts.values.push_back(t);
    append_level(tree, t, merged);
    last = t;
    cl = std::move(merged);
  }
  return {std::move(ts), std::move(tree)};
}

ClusterTree mh_ksc(const LatentMatrix& test, const ThresholdSet& ts, const HierarchyOptions& opt) {
  check_options(opt);
  if (ts.values.empty()) fail(errc::invalid, "empty threshold set");
  if (test.rows() == 0) fail(errc::invalid, "empty test set");

  ClusterTree tree;
  tree.n_items = static_cast<uint32_t>(test.rows());
  tree.item_ids = test.node_ids;

  // The first learned threshold belongs to the validation stage; the ground
  // level of the full hierarchy starts at the second one. A single-threshold
  // run has nothing finer to offer, so it grounds at t0 itself.
  size_t first = ts.values.size() >= 2 ? 1 : 0;
  double ground_t = ts.values[first];
  FlatClustering cl = ground_cluster(test, inclusive(ground_t), opt.max_cluster_size,
                                     opt.max_cluster_count);
  append_level(tree, ground_t, cl);
  if (cl.k == 1) return tree;

  AffinityMatrix s = ground_affinity(test, cl, opt.threads);
  for (size_t i = first + 1; i < ts.values.size(); ++i) {
    double t = ts.values[i];
    FlatClustering merged = greedy_max_order(s, inclusive(t));
    if (merged.k == s.n) continue;  // threshold consumed, no level recorded
    append_level(tree, t, merged);
    if (merged.k == 1) break;
    s = coarsen_affinity(s, merged);
  }
  return tree;
}

void validate_tree(const ClusterTree& t) {
  if (t.levels.empty()) fail(errc::invalid, "tree has no levels");
  if (t.item_ids.size() != t.n_items) fail(errc::invalid, "tree item list size mismatch");
  double last_threshold = -std::numeric_limits<double>::infinity();
  for (size_t l = 0; l < t.levels.size(); ++l) {
    const auto& level = t.levels[l];
    if (level.assign.size() != t.n_items) fail(errc::invalid, "level is not over all items");
    if (level.k == 0) fail(errc::invalid, "level with no clusters");
    std::vector<uint8_t> used(level.k, 0);
    for (uint32_t c : level.assign) {
      if (c >= level.k) fail(errc::invalid, "cluster id out of range");
      used[c] = 1;
    }
    for (uint32_t c = 0; c < level.k; ++c)
      if (!used[c]) fail(errc::invalid, "empty cluster in a level");
    if (level.threshold < last_threshold) fail(errc::invalid, "thresholds decrease upward");
    last_threshold = level.threshold;

    if (l == 0) {
      if (!level.children.empty()) fail(errc::invalid, "ground level cannot have children");
      continue;
    }
    const auto& prev = t.levels[l - 1];
    if (level.k >= prev.k) fail(errc::invalid, "cluster count fails to decrease upward");
    if (level.children.size() != level.k) fail(errc::invalid, "children list size mismatch");
    // Every previous-level cluster nests into exactly one parent, and the
    // per-item assignment agrees with that nesting.
    std::vector<uint32_t> parent(prev.k, ~uint32_t{0});
    for (uint32_t c = 0; c < level.k; ++c)
      for (uint32_t child : level.children[c]) {
        if (child >= prev.k) fail(errc::invalid, "child cluster id out of range");
        if (parent[child] != ~uint32_t{0}) fail(errc::invalid, "cluster nests into two parents");
        parent[child] = c;
      }
    for (uint32_t c = 0; c < prev.k; ++c)
      if (parent[c] == ~uint32_t{0}) fail(errc::invalid, "cluster with no parent");
    for (uint32_t i = 0; i < t.n_items; ++i)
      if (level.assign[i] != parent[prev.assign[i]])
        fail(errc::invalid, "item assignment disagrees with the nesting");
  }
}

Partition level_partition(const ClusterTree& t, uint32_t level) {
  if (level >= t.levels.size()) fail(errc::invalid, "level index out of range");
  Partition p;
  p.k = t.levels[level].k;
  p.assign = t.levels[level].assign;
  return p;
}

}  // namespace mhksc
