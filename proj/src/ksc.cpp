#include "mhksc/ksc.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <lapacke.h>

#include "mhksc/common.hpp"

namespace mhksc {

double cosine_similarity(std::span<const uint32_t> a, std::span<const uint32_t> b) {
  if (a.empty() || b.empty()) return 0.0;
  uint64_t shared = 0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j])
      ++i;
    else if (a[i] > b[j])
      ++j;
    else {
      ++shared;
      ++i;
      ++j;
    }
  }
  return static_cast<double>(shared) /
         std::sqrt(static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

KernelMatrix build_kernel_matrix(const Graph& g, const std::vector<uint32_t>& train,
                                 unsigned threads, uint32_t cap) {
  auto n = static_cast<uint32_t>(train.size());
  if (n == 0) fail(errc::invalid, "empty training set");
  if (train.size() > cap)
    fail(errc::cap, "training set exceeds the kernel cap of " + std::to_string(cap));
  std::vector<uint32_t> pos(g.n_nodes, ~uint32_t{0});
  for (uint32_t p = 0; p < n; ++p) {
    if (train[p] >= g.n_nodes) fail(errc::invalid, "training node out of range");
    if (pos[train[p]] != ~uint32_t{0}) fail(errc::invalid, "duplicate training node");
    pos[train[p]] = p;
  }

  // Inverted index: for each graph node, the training rows whose adjacency
  // column contains it. Row p's intersection counts with every other row then
  // come from one sweep over p's neighbors.
  std::vector<uint64_t> ioff(size_t{g.n_nodes} + 1, 0);
  for (uint32_t v = 0; v < g.n_nodes; ++v)
    for (uint32_t u : g.adj(v))
      if (pos[u] != ~uint32_t{0}) ++ioff[size_t{v} + 1];
  for (uint32_t v = 0; v < g.n_nodes; ++v) ioff[size_t{v} + 1] += ioff[v];
  std::vector<uint32_t> imember(ioff[g.n_nodes]);
  {
    std::vector<uint64_t> cur(ioff.begin(), ioff.end() - 1);
    for (uint32_t v = 0; v < g.n_nodes; ++v)
      for (uint32_t u : g.adj(v))
        if (pos[u] != ~uint32_t{0}) imember[cur[v]++] = pos[u];
  }

  KernelMatrix km;
  km.n = n;
  km.train_ids = train;
  km.values.assign(size_t{n} * n, 0.0);
  km.degree.assign(n, 0.0);

  parallel_for(n, threads, [&](size_t lo, size_t hi, unsigned) {
    std::vector<uint64_t> count(n, 0);
    for (size_t p = lo; p < hi; ++p) {
      auto col = g.adj(train[p]);
      for (uint32_t v : col)
        for (uint64_t e = ioff[v]; e < ioff[size_t{v} + 1]; ++e) ++count[imember[e]];
      double* row = km.values.data() + p * n;
      auto dp = static_cast<double>(col.size());
      double sum = 0.0;
      for (uint32_t q = 0; q < n; ++q) {
        if (count[q] != 0) {
          auto dq = static_cast<double>(g.degree(train[q]));
          row[q] = static_cast<double>(count[q]) / std::sqrt(dp * dq);
          sum += row[q];
          count[q] = 0;
        }
      }
      km.degree[p] = sum;
    }
  });
  return km;
}

KscModel train(const Graph& g, KernelMatrix km, uint32_t maxk) {
  uint32_t n = km.n;
  if (maxk < 2) fail(errc::invalid, "maxk must be at least 2");
  if (maxk > n) fail(errc::invalid, "maxk exceeds the training-set size");
  uint32_t m = maxk - 1;
  for (uint32_t i = 0; i < n; ++i)
    if (!(km.degree[i] > 0.0))
      fail(errc::invalid, "training node " + std::to_string(km.train_ids[i]) +
                              " is isolated (zero kernel degree)");

  // Similarity transform of the degree-weighted centered problem: with
  // B = D^(-1/2) K D^(-1/2) and the projector P that removes the D^(-1/2)*1
  // direction, PBP is symmetric PSD and shares the nontrivial spectrum of the
  // dual operator; dual vectors come back through D^(-1/2).
  std::vector<double> isd(n);  // 1/sqrt(degree)
  for (uint32_t i = 0; i < n; ++i) isd[i] = 1.0 / std::sqrt(km.degree[i]);
  double* a = km.values.data();
  for (uint32_t i = 0; i < n; ++i)
    for (uint32_t j = 0; j < n; ++j) a[size_t{i} * n + j] *= isd[i] * isd[j];

  double s = 0.0;  // |u|^2 for u = D^(-1/2) 1
  for (uint32_t i = 0; i < n; ++i) s += isd[i] * isd[i];
  std::vector<double> w(n, 0.0);  // B u
  for (uint32_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (uint32_t j = 0; j < n; ++j) acc += a[size_t{i} * n + j] * isd[j];
    w[i] = acc;
  }
  double c = 0.0;  // u' B u
  for (uint32_t i = 0; i < n; ++i) c += isd[i] * w[i];
  for (uint32_t i = 0; i < n; ++i)
    for (uint32_t j = 0; j < n; ++j)
      a[size_t{i} * n + j] +=
          isd[i] * isd[j] * c / (s * s) - (isd[i] * w[j] + w[i] * isd[j]) / s;

  // The buffer is symmetric, so it can be handed to the column-major solver
  // directly. dsyevr with uplo 'L' destroys the column-major lower triangle
  // (the row-major upper one); the saved diagonal plus the surviving triangle
  // reconstruct the operator for the residual check below.
  std::vector<double> diag(n);
  for (uint32_t i = 0; i < n; ++i) diag[i] = a[size_t{i} * n + i];

  std::vector<double> eigval(n), eigvec(size_t{n} * m);
  std::vector<lapack_int> isuppz(2 * size_t{m});
  lapack_int found = 0;
  lapack_int info = LAPACKE_dsyevr(
      LAPACK_COL_MAJOR, 'V', 'I', 'L', static_cast<lapack_int>(n), a, static_cast<lapack_int>(n),
      0.0, 0.0, static_cast<lapack_int>(n - m + 1), static_cast<lapack_int>(n),
      LAPACKE_dlamch('S'), &found, eigval.data(), eigvec.data(), static_cast<lapack_int>(n),
      isuppz.data());
  if (info != 0 || found != static_cast<lapack_int>(m))
    fail(errc::numeric, "eigensolver failed (info " + std::to_string(info) + ")");

  auto sym_at = [&](uint32_t i, uint32_t j) -> double {
    if (i == j) return diag[i];
    uint32_t lo = std::min(i, j), hi = std::max(i, j);
    return a[size_t{hi} * n + lo];  // row-major strict lower triangle survives
  };

  KscModel model;
  model.maxk = maxk;
  model.node_space = g.n_nodes;
  model.train_ids = km.train_ids;
  model.kernel_degree = std::move(km.degree);
  model.eigenvalues.resize(m);
  model.alphas.assign(size_t{n} * m, 0.0);
  model.biases.resize(m);
  model.train_latent.assign(size_t{n} * m, 0.0);

  std::vector<double> resid(n);
  for (uint32_t l = 0; l < m; ++l) {
    uint32_t src = m - 1 - l;  // ascending from the solver, stored descending
    double lambda = eigval[src];
    model.eigenvalues[l] = lambda;
    const double* beta = eigvec.data() + size_t{src} * n;

    double residual2 = 0.0;
    for (uint32_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (uint32_t j = 0; j < n; ++j) acc += sym_at(i, j) * beta[j];
      double r = acc - lambda * beta[i];
      residual2 += r * r;
    }
    if (std::sqrt(residual2) > 1e-8 * std::max(1.0, std::abs(eigval[m - 1])))
      fail(errc::numeric, "eigenpair residual check failed");
  }
  double lambda_max = model.eigenvalues[0];
  for (uint32_t l = 0; l < m; ++l)
    if (model.eigenvalues[l] <= 1e-10 * std::max(1.0, lambda_max))
      fail(errc::numeric,
           "spectrum has fewer than maxk-1 informative directions; lower maxk");

  for (uint32_t l = 0; l < m; ++l) {
    const double* beta = eigvec.data() + size_t{m - 1 - l} * n;
    double norm2 = 0.0;
    for (uint32_t i = 0; i < n; ++i) {
      double v = isd[i] * beta[i];
      norm2 += v * v;
    }
    double scale = 1.0 / std::sqrt(norm2);
    uint32_t arg = 0;
    double best = 0.0;
    for (uint32_t i = 0; i < n; ++i) {
      double mag = std::abs(isd[i] * beta[i]);
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    if (isd[arg] * beta[arg] < 0.0) scale = -scale;
    double wdot = 0.0;
    for (uint32_t i = 0; i < n; ++i) wdot += w[i] * beta[i];
    model.biases[l] = -scale * wdot / s;
    double lambda = model.eigenvalues[l];
    for (uint32_t i = 0; i < n; ++i) {
      double alpha = scale * isd[i] * beta[i];
      model.alphas[size_t{i} * m + l] = alpha;
      // Exact identity of the dual problem: score of training node i equals
      // lambda * degree_i * alpha_i, kernel expansion not required.
      model.train_latent[size_t{i} * m + l] = lambda * model.kernel_degree[i] * alpha;
    }
  }

  // Keep the training adjacency columns so projection is graph-free.
  model.col_offsets.assign(size_t{n} + 1, 0);
  for (uint32_t i = 0; i < n; ++i)
    model.col_offsets[size_t{i} + 1] = model.col_offsets[i] + g.degree(model.train_ids[i]);
  model.col_indices.resize(model.col_offsets[n]);
  for (uint32_t i = 0; i < n; ++i) {
    auto col = g.adj(model.train_ids[i]);
    std::copy(col.begin(), col.end(), model.col_indices.begin() + static_cast<ptrdiff_t>(model.col_offsets[i]));
  }
  model.build_lookup();
  return model;
}

void KscModel::build_lookup() {
  uint32_t n = train_size();
  inv_col_norm.resize(n);
  for (uint32_t i = 0; i < n; ++i) {
    auto len = static_cast<double>(col_offsets[size_t{i} + 1] - col_offsets[i]);
    inv_col_norm[i] = len > 0.0 ? 1.0 / std::sqrt(len) : 0.0;
  }
  member_offsets.assign(node_space + 1, 0);
  for (uint32_t v : col_indices) ++member_offsets[size_t{v} + 1];
  for (uint64_t v = 0; v < node_space; ++v) member_offsets[v + 1] += member_offsets[v];
  member_cols.resize(col_indices.size());
  std::vector<uint64_t> cur(member_offsets.begin(), member_offsets.end() - 1);
  for (uint32_t i = 0; i < n; ++i)
    for (uint64_t e = col_offsets[i]; e < col_offsets[size_t{i} + 1]; ++e)
      member_cols[cur[col_indices[e]]++] = i;
}

namespace {

// Shared scratch-based projection of one sparse column; touched holds the
// training rows with a nonzero kernel term, sorted so the summation order is
// a function of the column alone.
void project_into(const KscModel& mo, std::span<const uint32_t> column, uint64_t* count,
                  uint32_t* stamp, uint32_t epoch, std::vector<uint32_t>& touched, double* out) {
  uint32_t m = mo.maxk - 1;
  touched.clear();
  for (uint32_t v : column) {
    if (v >= mo.node_space) fail(errc::invalid, "column index outside the model's node space");
    for (uint64_t e = mo.member_offsets[v]; e < mo.member_offsets[size_t{v} + 1]; ++e) {
      uint32_t row = mo.member_cols[e];
      if (stamp[row] != epoch) {
        stamp[row] = epoch;
        count[row] = 0;
        touched.push_back(row);
      }
      ++count[row];
    }
  }
  std::sort(touched.begin(), touched.end());
  double inv_norm = column.empty() ? 0.0 : 1.0 / std::sqrt(static_cast<double>(column.size()));
  for (uint32_t l = 0; l < m; ++l) out[l] = 0.0;
  for (uint32_t row : touched) {
    double k = static_cast<double>(count[row]) * inv_norm * mo.inv_col_norm[row];
    const double* alpha = mo.alphas.data() + size_t{row} * m;
    for (uint32_t l = 0; l < m; ++l) out[l] += k * alpha[l];
  }
  for (uint32_t l = 0; l < m; ++l) out[l] += mo.biases[l];
}

}  // namespace

std::vector<double> project(const KscModel& m, std::span<const uint32_t> column) {
  if (m.member_offsets.empty()) fail(errc::invalid, "model lookup tables not built");
  std::vector<double> out(m.maxk - 1);
  std::vector<uint64_t> count(m.train_size(), 0);
  std::vector<uint32_t> stamp(m.train_size(), 0);
  std::vector<uint32_t> touched;
  project_into(m, column, count.data(), stamp.data(), 1, touched, out.data());
  return out;
}

LatentMatrix project_batch(const KscModel& m, const Graph& g, std::span<const uint32_t> nodes,
                           uint32_t chunk, unsigned threads) {
  if (m.member_offsets.empty()) fail(errc::invalid, "model lookup tables not built");
  if (g.n_nodes != m.node_space) fail(errc::invalid, "graph does not match the model's node space");
  if (chunk == 0) chunk = 8192;

  LatentMatrix out;
  out.cols = m.maxk - 1;
  out.node_ids.assign(nodes.begin(), nodes.end());
  for (uint32_t v : out.node_ids)
    if (v >= g.n_nodes) fail(errc::invalid, "projection node out of range");
  out.values.assign(nodes.size() * size_t{out.cols}, 0.0);

  for (size_t base = 0; base < nodes.size(); base += chunk) {
    size_t limit = std::min(nodes.size(), base + chunk);
    parallel_for(limit - base, threads, [&](size_t lo, size_t hi, unsigned) {
      std::vector<uint64_t> count(m.train_size(), 0);
      std::vector<uint32_t> stamp(m.train_size(), 0);
      std::vector<uint32_t> touched;
      uint32_t epoch = 0;
      for (size_t r = base + lo; r < base + hi; ++r) {
        ++epoch;
        project_into(m, g.adj(nodes[r]), count.data(), stamp.data(), epoch, touched,
                     out.values.data() + r * out.cols);
      }
    });
  }
  return out;
}

LatentMatrix project_all(const KscModel& m, const Graph& g, uint32_t chunk, unsigned threads) {
  std::vector<uint32_t> nodes(g.n_nodes);
  for (uint32_t i = 0; i < g.n_nodes; ++i) nodes[i] = i;
  return project_batch(m, g, nodes, chunk, threads);
}

LatentMatrix training_latent(const KscModel& m) {
  LatentMatrix out;
  out.cols = m.maxk - 1;
  out.node_ids = m.train_ids;
  out.values = m.train_latent;
  return out;
}

namespace {

constexpr char kModelMagic[8] = {'M', 'H', 'K', 'S', 'C', 'M', 'D', '1'};
constexpr char kLatentMagic[8] = {'M', 'H', 'K', 'S', 'C', 'L', 'T', '1'};

void put(std::ofstream& out, const void* p, size_t bytes) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(bytes));
}

void get(std::ifstream& in, void* p, size_t bytes, const std::string& path) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(bytes));
  if (static_cast<size_t>(in.gcount()) != bytes) fail(errc::io, "truncated file '" + path + "'");
}

template <class T>
void put_vec(std::ofstream& out, const std::vector<T>& v) {
  uint64_t len = v.size();
  put(out, &len, sizeof len);
  put(out, v.data(), v.size() * sizeof(T));
}

template <class T>
void get_vec(std::ifstream& in, std::vector<T>& v, const std::string& path) {
  uint64_t len = 0;
  get(in, &len, sizeof len, path);
  if (len > (uint64_t{1} << 40) / sizeof(T)) fail(errc::io, "implausible array size in '" + path + "'");
  v.resize(len);
  get(in, v.data(), len * sizeof(T), path);
}

}  // namespace

void save_model(const KscModel& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io, "cannot write model '" + path + "'");
  put(out, kModelMagic, sizeof kModelMagic);
  put(out, &m.maxk, sizeof m.maxk);
  put(out, &m.node_space, sizeof m.node_space);
  put_vec(out, m.train_ids);
  put_vec(out, m.col_offsets);
  put_vec(out, m.col_indices);
  put_vec(out, m.alphas);
  put_vec(out, m.biases);
  put_vec(out, m.eigenvalues);
  put_vec(out, m.train_latent);
  put_vec(out, m.kernel_degree);
  if (!out) fail(errc::io, "write error on '" + path + "'");
}

KscModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io, "cannot open model '" + path + "'");
  char magic[8];
  get(in, magic, sizeof magic, path);
  if (std::memcmp(magic, kModelMagic, sizeof magic) != 0)
    fail(errc::io, "'" + path + "' is not a model file");
  KscModel m;
  get(in, &m.maxk, sizeof m.maxk, path);
  get(in, &m.node_space, sizeof m.node_space, path);
  get_vec(in, m.train_ids, path);
  get_vec(in, m.col_offsets, path);
  get_vec(in, m.col_indices, path);
  get_vec(in, m.alphas, path);
  get_vec(in, m.biases, path);
  get_vec(in, m.eigenvalues, path);
  get_vec(in, m.train_latent, path);
  get_vec(in, m.kernel_degree, path);

  size_t n = m.train_ids.size();
  uint32_t cols = m.maxk >= 2 ? m.maxk - 1 : 0;
  if (m.maxk < 2 || m.col_offsets.size() != n + 1 || m.alphas.size() != n * cols ||
      m.biases.size() != cols || m.eigenvalues.size() != cols ||
      m.train_latent.size() != n * cols || m.kernel_degree.size() != n ||
      m.col_offsets[n] != m.col_indices.size())
    fail(errc::io, "inconsistent model file '" + path + "'");
  for (uint32_t v : m.col_indices)
    if (v >= m.node_space) fail(errc::io, "model column index out of range in '" + path + "'");
  m.build_lookup();
  return m;
}

void save_latent(const LatentMatrix& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io, "cannot write latent matrix '" + path + "'");
  put(out, kLatentMagic, sizeof kLatentMagic);
  put(out, &m.cols, sizeof m.cols);
  put_vec(out, m.node_ids);
  put_vec(out, m.values);
  if (!out) fail(errc::io, "write error on '" + path + "'");
}

LatentMatrix load_latent(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io, "cannot open latent matrix '" + path + "'");
  char magic[8];
  get(in, magic, sizeof magic, path);
  if (std::memcmp(magic, kLatentMagic, sizeof magic) != 0)
    fail(errc::io, "'" + path + "' is not a latent-matrix file");
  LatentMatrix m;
  get(in, &m.cols, sizeof m.cols, path);
  get_vec(in, m.node_ids, path);
  get_vec(in, m.values, path);
  if (m.values.size() != m.node_ids.size() * size_t{m.cols})
    fail(errc::io, "inconsistent latent-matrix file '" + path + "'");
  return m;
}

}  // namespace mhksc
