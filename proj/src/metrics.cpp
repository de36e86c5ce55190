#include "mhksc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "mhksc/common.hpp"

namespace mhksc {

namespace {

void check_partition(const Partition& p, size_t n, const char* who) {
  if (p.assign.size() != n) fail(errc::invalid, std::string(who) + ": item count mismatch");
  if (p.k == 0) fail(errc::invalid, std::string(who) + ": no clusters");
  std::vector<uint8_t> seen(p.k, 0);
  for (uint32_t c : p.assign) {
    if (c >= p.k) fail(errc::invalid, std::string(who) + ": cluster id out of range");
    seen[c] = 1;
  }
  for (uint32_t c = 0; c < p.k; ++c)
    if (!seen[c]) fail(errc::invalid, std::string(who) + ": empty cluster id");
}

// Sparse contingency table of two partitions over the same items, keyed
// (a_id, b_id) in sorted order, plus the two marginals.
struct Contingency {
  std::map<std::pair<uint32_t, uint32_t>, uint64_t> cells;
  std::vector<uint64_t> ma, mb;
};

Contingency cross_counts(const Partition& a, const Partition& b) {
  Contingency t;
  t.ma.assign(a.k, 0);
  t.mb.assign(b.k, 0);
  for (size_t i = 0; i < a.assign.size(); ++i) {
    ++t.ma[a.assign[i]];
    ++t.mb[b.assign[i]];
    ++t.cells[{a.assign[i], b.assign[i]}];
  }
  return t;
}

__int128 choose2(uint64_t x) { return static_cast<__int128>(x) * (x - 1) / 2; }

}  // namespace

double modularity(const Graph& g, const Partition& p) {
  check_partition(p, g.n_nodes, "modularity");
  if (g.n_edges == 0) fail(errc::invalid, "modularity of an empty graph");
  std::vector<uint64_t> intra(p.k, 0), vol(p.k, 0);
  for (uint32_t i = 0; i < g.n_nodes; ++i) {
    uint32_t c = p.assign[i];
    vol[c] += g.degree(i);
    for (uint32_t j : g.adj(i))
      if (j > i && p.assign[j] == c) ++intra[c];
  }
  double m = static_cast<double>(g.n_edges);
  double q = 0.0;
  for (uint32_t c = 0; c < p.k; ++c) {
    double frac = static_cast<double>(vol[c]) / (2.0 * m);
    q += static_cast<double>(intra[c]) / m - frac * frac;
  }
  return q;
}

double cut_conductance(const Graph& g, const Partition& p) {
  check_partition(p, g.n_nodes, "cut_conductance");
  if (g.n_edges == 0) fail(errc::invalid, "conductance of an empty graph");
  std::vector<uint64_t> cut(p.k, 0), vol(p.k, 0);
  uint64_t vol_total = 2 * g.n_edges;
  for (uint32_t i = 0; i < g.n_nodes; ++i) {
    uint32_t c = p.assign[i];
    vol[c] += g.degree(i);
    for (uint32_t j : g.adj(i))
      if (p.assign[j] != c) ++cut[c];
  }
  double total = 0.0;
  for (uint32_t c = 0; c < p.k; ++c) {
    uint64_t denom = std::min(vol[c], vol_total - vol[c]);
    if (denom > 0) total += static_cast<double>(cut[c]) / static_cast<double>(denom);
  }
  return total / p.k;
}

double adjusted_rand_index(const Partition& a, const Partition& b) {
  if (a.assign.size() != b.assign.size()) fail(errc::invalid, "partitions cover different items");
  check_partition(a, a.assign.size(), "ari");
  check_partition(b, b.assign.size(), "ari");
  Contingency t = cross_counts(a, b);

  __int128 sum_cells = 0, sum_a = 0, sum_b = 0;
  for (const auto& [key, count] : t.cells) sum_cells += choose2(count);
  for (uint64_t x : t.ma) sum_a += choose2(x);
  for (uint64_t x : t.mb) sum_b += choose2(x);
  __int128 pairs = choose2(a.assign.size());

  // Exact integer form of (index - expected) / (max - expected), both sides
  // scaled by 2 * C(n,2).
  __int128 num = 2 * (pairs * sum_cells - sum_a * sum_b);
  __int128 den = pairs * (sum_a + sum_b) - 2 * sum_a * sum_b;
  if (den == 0) return 1.0;  // both partitions trivial and equal
  return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
}

double variation_of_information(const Partition& a, const Partition& b) {
  if (a.assign.size() != b.assign.size()) fail(errc::invalid, "partitions cover different items");
  if (a.assign.size() < 2) fail(errc::invalid, "variation of information needs >= 2 items");
  check_partition(a, a.assign.size(), "vi");
  check_partition(b, b.assign.size(), "vi");
  Contingency t = cross_counts(a, b);
  auto n = static_cast<long double>(a.assign.size());

  // H and I terms are written so that on identical partitions the diagonal
  // mutual-information terms are bit-for-bit the entropy terms: both reduce to
  // rounding the exact real N/count before the log, so VI cancels to 0.
  long double ha = 0.0L, hb = 0.0L, mi = 0.0L;
  for (uint64_t x : t.ma) ha += static_cast<long double>(x) / n * std::log(n / static_cast<long double>(x));
  for (uint64_t x : t.mb) hb += static_cast<long double>(x) / n * std::log(n / static_cast<long double>(x));
  for (const auto& [key, count] : t.cells) {
    auto c = static_cast<long double>(count);
    auto joint = n * c / (static_cast<long double>(t.ma[key.first]) * static_cast<long double>(t.mb[key.second]));
    mi += c / n * std::log(joint);
  }
  long double vi = (ha - mi) + (hb - mi);
  if (vi < 0.0L) vi = 0.0L;
  long double norm = vi / std::log(n);
  return static_cast<double>(norm > 1.0L ? 1.0L : norm);
}

Partition load_partition(const Graph& g, const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io, "cannot open partition '" + path + "'");

  Partition p;
  p.assign.assign(g.n_nodes, ~uint32_t{0});
  std::unordered_map<std::string, uint32_t> cluster_ids;
  std::string line;
  uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    std::istringstream fields(hash == std::string::npos ? line : line.substr(0, hash));
    std::string node, cluster, extra;
    if (!(fields >> node)) continue;
    if (!(fields >> cluster) || (fields >> extra))
      fail(errc::io, path + ":" + std::to_string(lineno) + ": expected 'node cluster'");
    uint32_t i = g.index_of(node);
    if (p.assign[i] != ~uint32_t{0})
      fail(errc::invalid, path + ": node '" + node + "' assigned twice");
    p.assign[i] =
        cluster_ids.emplace(cluster, static_cast<uint32_t>(cluster_ids.size())).first->second;
  }
  if (in.bad()) fail(errc::io, "read error on '" + path + "'");
  for (uint32_t i = 0; i < g.n_nodes; ++i)
    if (p.assign[i] == ~uint32_t{0})
      fail(errc::invalid, path + ": node '" + g.labels[i] + "' has no cluster");
  p.k = static_cast<uint32_t>(cluster_ids.size());
  if (p.k == 0) fail(errc::invalid, path + ": empty partition");
  return p;
}

void write_partition(const Partition& p, const std::vector<std::string>& labels,
                     const std::string& path) {
  if (p.assign.size() != labels.size()) fail(errc::invalid, "label list does not match partition");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io, "cannot write partition '" + path + "'");
  for (size_t i = 0; i < labels.size(); ++i) out << labels[i] << '\t' << p.assign[i] << '\n';
  if (!out) fail(errc::io, "write error on '" + path + "'");
}

}  // namespace mhksc
