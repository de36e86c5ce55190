#include "mhksc/graph.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mhksc/common.hpp"

namespace mhksc {

uint32_t Graph::index_of(const std::string& label) const {
  auto it = label_index.find(label);
  if (it == label_index.end()) fail(errc::invalid, "unknown node id '" + label + "'");
  return it->second;
}

Graph build_graph(uint32_t n, const std::vector<std::pair<uint32_t, uint32_t>>& edges,
                  std::vector<std::string> labels) {
  if (!labels.empty() && labels.size() != n)
    fail(errc::invalid, "label list does not match the node count");

  Graph g;
  g.n_nodes = n;

  // Directed half-edges in both directions, self-loops dropped.
  std::vector<uint64_t> count(size_t{n} + 1, 0);
  for (const auto& [u, v] : edges) {
    if (u >= n || v >= n) fail(errc::invalid, "edge endpoint out of range");
    if (u == v) continue;
    ++count[size_t{u} + 1];
    ++count[size_t{v} + 1];
  }
  for (uint32_t i = 0; i < n; ++i) count[size_t{i} + 1] += count[i];

  std::vector<uint32_t> flat(count[n]);
  std::vector<uint64_t> cursor(count.begin(), count.end() - 1);
  for (const auto& [u, v] : edges) {
    if (u == v) continue;
    flat[cursor[u]++] = v;
    flat[cursor[v]++] = u;
  }

  g.offsets.assign(size_t{n} + 1, 0);
  g.neighbors.reserve(flat.size());
  for (uint32_t i = 0; i < n; ++i) {
    auto lo = flat.begin() + static_cast<ptrdiff_t>(count[i]);
    auto hi = flat.begin() + static_cast<ptrdiff_t>(count[size_t{i} + 1]);
    std::sort(lo, hi);
    auto last = std::unique(lo, hi);
    g.neighbors.insert(g.neighbors.end(), lo, last);
    g.offsets[size_t{i} + 1] = g.neighbors.size();
  }
  g.n_edges = g.neighbors.size() / 2;

  if (labels.empty()) {
    g.labels.reserve(n);
    for (uint32_t i = 0; i < n; ++i) g.labels.push_back(std::to_string(i));
  } else {
    g.labels = std::move(labels);
  }
  g.label_index.reserve(n);
  for (uint32_t i = 0; i < n; ++i) {
    if (!g.label_index.emplace(g.labels[i], i).second)
      fail(errc::invalid, "duplicate node id '" + g.labels[i] + "'");
  }
  return g;
}

namespace {

// Strips a trailing '#' comment and surrounding whitespace; returns up to two
// whitespace-separated tokens. More than two is a format error signalled by a
// third nonempty token.
int split_line(const std::string& line, std::string& a, std::string& b) {
  size_t end = line.find('#');
  std::istringstream in(end == std::string::npos ? line : line.substr(0, end));
  std::string extra;
  a.clear();
  b.clear();
  if (!(in >> a)) return 0;
  if (!(in >> b)) return 1;
  if (in >> extra) return 3;
  return 2;
}

}  // namespace

Graph load_edge_list(const std::string& path, bool directed_input) {
  (void)directed_input;  // both readings load the same undirected graph
  std::ifstream in(path);
  if (!in) fail(errc::io, "cannot open edge list '" + path + "'");

  std::vector<std::string> labels;
  std::unordered_map<std::string, uint32_t> index;
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  auto intern = [&](std::string&& token) {
    auto [it, fresh] = index.emplace(std::move(token), static_cast<uint32_t>(labels.size()));
    if (fresh) labels.push_back(it->first);
    return it->second;
  };

  std::string line, a, b;
  uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    int fields = split_line(line, a, b);
    if (fields == 0) continue;
    if (fields != 2)
      fail(errc::io, path + ":" + std::to_string(lineno) + ": expected 'u v', got '" + line + "'");
    uint32_t u = intern(std::move(a));
    uint32_t v = intern(std::move(b));
    edges.emplace_back(u, v);
  }
  if (in.bad()) fail(errc::io, "read error on '" + path + "'");
  if (labels.empty()) fail(errc::io, "no edges in '" + path + "'");
  uint32_t n = static_cast<uint32_t>(labels.size());
  return build_graph(n, edges, std::move(labels));
}

void write_edge_list(const Graph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io, "cannot write edge list '" + path + "'");
  std::string buf;
  buf.reserve(1 << 20);
  for (uint32_t i = 0; i < g.n_nodes; ++i) {
    if (g.degree(i) == 0) {
      // Self-loop line: registers the node on load, then drops.
      buf += g.labels[i];
      buf += '\t';
      buf += g.labels[i];
      buf += '\n';
    } else {
      for (uint32_t j : g.adj(i)) {
        if (j <= i) continue;
        buf += g.labels[i];
        buf += '\t';
        buf += g.labels[j];
        buf += '\n';
      }
    }
    if (buf.size() > (1 << 20)) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) fail(errc::io, "write error on '" + path + "'");
}

std::span<const uint32_t> adjacency_column(const Graph& g, uint32_t i) {
  if (i >= g.n_nodes) fail(errc::invalid, "node index out of range");
  return g.adj(i);
}

double global_clustering_coefficient(const Graph& g) {
  if (g.n_nodes == 0) return 0.0;
  double total = 0.0;
  for (uint32_t i = 0; i < g.n_nodes; ++i) {
    uint32_t d = g.degree(i);
    if (d < 2) continue;
    auto ni = g.adj(i);
    // Sum over neighbors j of |adj(i) ∩ adj(j)| counts each wedge closure
    // twice, so the node's triangle count is half of it.
    uint64_t closed2 = 0;
    for (uint32_t j : ni) {
      auto nj = g.adj(j);
      size_t a = 0, b = 0;
      while (a < ni.size() && b < nj.size()) {
        if (ni[a] < nj[b])
          ++a;
        else if (ni[a] > nj[b])
          ++b;
        else {
          ++closed2;
          ++a;
          ++b;
        }
      }
    }
    total += static_cast<double>(closed2) / (static_cast<double>(d) * (d - 1));
  }
  return total / g.n_nodes;
}

}  // namespace mhksc
