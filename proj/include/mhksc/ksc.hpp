#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mhksc/graph.hpp"

namespace mhksc {

// Cosine similarity of two sparse binary vectors given as sorted index lists:
// |a ∩ b| / sqrt(|a| |b|). Either operand empty -> 0 (an isolated node is
// similar to nothing, itself included).
double cosine_similarity(std::span<const uint32_t> a, std::span<const uint32_t> b);

// Dense symmetric matrix of cosine similarities between the adjacency columns
// of the training nodes, with per-row sums ("kernel degrees") alongside.
struct KernelMatrix {
  uint32_t n = 0;
  std::vector<uint32_t> train_ids;
  std::vector<double> values;  // n x n row-major
  std::vector<double> degree;  // row sums

  double at(uint32_t i, uint32_t j) const { return values[size_t{i} * n + j]; }
};

// `cap` is the dense-matrix memory bound; more training nodes than that is an
// error, not an allocation attempt.
KernelMatrix build_kernel_matrix(const Graph& g, const std::vector<uint32_t>& train,
                                 unsigned threads = 0, uint32_t cap = 10000);

// Rows are items (nodes or arbitrary projected vectors), columns the maxk-1
// latent score variables.
struct LatentMatrix {
  uint32_t cols = 0;
  std::vector<uint32_t> node_ids;  // row -> node index in the source graph
  std::vector<double> values;      // rows x cols row-major

  size_t rows() const { return node_ids.size(); }
  std::span<const double> row(size_t r) const { return {values.data() + r * cols, cols}; }
};

// Trained dual model. `alphas` columns are unit-norm eigenvectors of the
// degree-centered kernel problem (sign-fixed: largest-magnitude entry
// positive), `eigenvalues` descending, one bias per score variable. Training
// adjacency columns are stored so projection needs no graph.
struct KscModel {
  uint32_t maxk = 0;
  uint64_t node_space = 0;  // index space the sparse columns live in
  std::vector<uint32_t> train_ids;
  std::vector<uint64_t> col_offsets;
  std::vector<uint32_t> col_indices;
  std::vector<double> alphas;  // n_tr x (maxk-1) row-major
  std::vector<double> biases;
  std::vector<double> eigenvalues;
  std::vector<double> train_latent;  // n_tr x (maxk-1); from e = lambda * D * alpha
  std::vector<double> kernel_degree;

  // Derived lookup state (rebuilt after load, not persisted).
  std::vector<double> inv_col_norm;  // 1/sqrt(column size), 0 for empty columns
  std::vector<uint64_t> member_offsets;
  std::vector<uint32_t> member_cols;  // node -> training columns containing it

  uint32_t train_size() const { return static_cast<uint32_t>(train_ids.size()); }
  std::span<const uint32_t> column(uint32_t i) const {
    return {col_indices.data() + col_offsets[i], col_indices.data() + col_offsets[i + 1]};
  }
  void build_lookup();
};

// Solves the degree-centered kernel eigenproblem and keeps the maxk-1 leading
// eigenvectors. The kernel matrix is consumed (transformed in place). Fails on
// zero kernel degrees (graph-isolated training node), maxk out of range, or a
// residual check failure against the uncentered operator.
KscModel train(const Graph& g, KernelMatrix km, uint32_t maxk);

// Out-of-sample extension for one sparse binary column in the model's node
// space: score_l(x) = sum_i alpha_il K(x, x_i) + b_l. An empty column projects
// to the bias vector.
std::vector<double> project(const KscModel& m, std::span<const uint32_t> column);

// Projects the listed nodes (their adjacency columns) in chunks of `chunk`
// rows. Results are identical for every chunk size and thread count: each row
// is computed independently with a fixed in-row summation order.
LatentMatrix project_batch(const KscModel& m, const Graph& g, std::span<const uint32_t> nodes,
                           uint32_t chunk = 8192, unsigned threads = 0);

// All nodes of `g` in index order.
LatentMatrix project_all(const KscModel& m, const Graph& g, uint32_t chunk = 8192,
                         unsigned threads = 0);

// Projections of the training columns recorded at train time (row order =
// train_ids). Computed from the eigen identity, not the kernel expansion, so it
// cross-checks project() rather than restating it.
LatentMatrix training_latent(const KscModel& m);

// Single-file binary persistence; loading reproduces projections bit-exactly.
void save_model(const KscModel& m, const std::string& path);
KscModel load_model(const std::string& path);
void save_latent(const LatentMatrix& m, const std::string& path);
LatentMatrix load_latent(const std::string& path);

}  // namespace mhksc
