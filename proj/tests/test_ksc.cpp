#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "mhksc/graph.hpp"
#include "mhksc/ksc.hpp"
#include "mhksc/sampling.hpp"
#include "util.hpp"

using namespace mhksc;

namespace {

Graph er_graph(uint32_t n, double p, uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  for (uint32_t i = 0; i < n; ++i) {
    edges.emplace_back(i, (i + 1) % n);  // ring backbone, no isolated nodes
    for (uint32_t j = i + 1; j < n; ++j)
      if (u(rng) < p) edges.emplace_back(i, j);
  }
  return build_graph(n, edges);
}

// The uncentered-route operator D^-1 M_D Omega, built densely and
// independently of the training code.
Eigen::MatrixXd dual_operator(const KernelMatrix& km) {
  uint32_t n = km.n;
  Eigen::MatrixXd omega(n, n);
  for (uint32_t i = 0; i < n; ++i)
    for (uint32_t j = 0; j < n; ++j) omega(i, j) = km.at(i, j);
  Eigen::VectorXd dinv(n);
  for (uint32_t i = 0; i < n; ++i) dinv(i) = 1.0 / km.degree[i];
  double s = dinv.sum();
  Eigen::MatrixXd md = Eigen::MatrixXd::Identity(n, n);
  md.noalias() -= (Eigen::VectorXd::Ones(n) * dinv.transpose()) / s;
  return dinv.asDiagonal() * md * omega;
}

std::vector<uint32_t> first_k(uint32_t k) {
  std::vector<uint32_t> v(k);
  for (uint32_t i = 0; i < k; ++i) v[i] = i;
  return v;
}

}  // namespace

TEST_CASE("cosine similarity closed forms") {
  std::vector<uint32_t> a{1, 2, 3}, b{1, 2}, c{3, 4}, d{2, 3}, e;
  CHECK(cosine_similarity(a, a) == 1.0);
  CHECK(cosine_similarity(b, c) == 0.0);
  CHECK(cosine_similarity(b, d) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(cosine_similarity(e, a) == 0.0);
  CHECK(cosine_similarity(e, e) == 0.0);
}

TEST_CASE("kernel matrix closed forms") {
  Graph tri = build_graph(3, {{0, 1}, {1, 2}, {2, 0}});
  KernelMatrix km = build_kernel_matrix(tri, {0, 1, 2});
  for (uint32_t i = 0; i < 3; ++i) {
    CHECK(km.at(i, i) == 1.0);
    CHECK(km.degree[i] == doctest::Approx(2.0).epsilon(1e-15));
    for (uint32_t j = 0; j < 3; ++j)
      if (i != j) CHECK(km.at(i, j) == doctest::Approx(0.5).epsilon(1e-15));
  }

  // identical neighborhoods -> off-diagonal 1
  Graph twin = build_graph(4, {{0, 2}, {0, 3}, {1, 2}, {1, 3}});
  KernelMatrix km2 = build_kernel_matrix(twin, {0, 1});
  CHECK(km2.at(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("kernel matrix validates its input") {
  Graph tri = build_graph(3, {{0, 1}, {1, 2}, {2, 0}});
  CHECK(catch_error([&] { build_kernel_matrix(tri, {}); }).kind() == errc::invalid);
  CHECK(catch_error([&] { build_kernel_matrix(tri, {0, 0}); }).kind() == errc::invalid);
  CHECK(catch_error([&] { build_kernel_matrix(tri, {0, 7}); }).kind() == errc::invalid);
  CHECK(catch_error([&] { build_kernel_matrix(tri, {0, 1, 2}, 0, 2); }).kind() == errc::cap);
}

TEST_CASE("kernel is symmetric, bounded, and positive semidefinite") {
  Graph g = er_graph(80, 0.06, 2);
  KernelMatrix km = build_kernel_matrix(g, first_k(25));
  Eigen::MatrixXd omega(25, 25);
  for (uint32_t i = 0; i < 25; ++i)
    for (uint32_t j = 0; j < 25; ++j) {
      CHECK(km.at(i, j) == km.at(j, i));
      CHECK(km.at(i, j) >= 0.0);
      CHECK(km.at(i, j) <= 1.0);
      omega(i, j) = km.at(i, j);
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(omega);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("centering matrix annihilates the ones vector") {
  Graph g = er_graph(60, 0.08, 3);
  KernelMatrix km = build_kernel_matrix(g, first_k(20));
  double s = 0.0;
  for (double d : km.degree) s += 1.0 / d;
  for (uint32_t i = 0; i < km.n; ++i) {
    double row = 1.0;
    for (uint32_t j = 0; j < km.n; ++j) row -= (1.0 / km.degree[j]) / s;
    CHECK(std::abs(row) <= 1e-10);
  }
}

TEST_CASE("trained eigenpairs satisfy the dual problem") {
  for (uint32_t seed : {4u, 5u, 6u}) {
    Graph g = er_graph(100, 0.06, seed);
    KernelMatrix km = build_kernel_matrix(g, first_k(30));
    Eigen::MatrixXd op = dual_operator(km);
    uint32_t maxk = 8;
    KscModel m = train(g, std::move(km), maxk);

    REQUIRE(m.eigenvalues.size() == maxk - 1);
    for (uint32_t l = 0; l + 1 < maxk - 1; ++l)
      CHECK(m.eigenvalues[l] >= m.eigenvalues[l + 1]);

    for (uint32_t l = 0; l < maxk - 1; ++l) {
      Eigen::VectorXd alpha(30);
      for (uint32_t i = 0; i < 30; ++i) alpha(i) = m.alphas[size_t{i} * (maxk - 1) + l];
      double residual = (op * alpha - m.eigenvalues[l] * alpha).norm();
      CHECK(residual <= 1e-8 * alpha.norm());

      // sign convention: the largest-magnitude entry is positive
      uint32_t top = 0;
      for (uint32_t i = 1; i < 30; ++i)
        if (std::abs(alpha(i)) > std::abs(alpha(top))) top = i;
      CHECK(alpha(top) > 0.0);
    }

    // the kept eigenvalues are the leading real spectrum of the operator
    Eigen::EigenSolver<Eigen::MatrixXd> es(op);
    std::vector<double> spectrum;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
      std::complex<double> ev = es.eigenvalues()(i);
      if (std::abs(ev.imag()) < 1e-8) spectrum.push_back(ev.real());
    }
    std::sort(spectrum.rbegin(), spectrum.rend());
    REQUIRE(spectrum.size() >= maxk - 1);
    for (uint32_t l = 0; l < maxk - 1; ++l)
      CHECK(m.eigenvalues[l] == doctest::Approx(spectrum[l]).epsilon(1e-7));
  }
}

TEST_CASE("two separated blocks split by sign of the top score") {
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  for (uint32_t base : {0u, 5u})
    for (uint32_t i = 0; i < 5; ++i)
      for (uint32_t j = i + 1; j < 5; ++j) edges.emplace_back(base + i, base + j);
  Graph g = build_graph(10, edges);
  KscModel m = train(g, build_kernel_matrix(g, {0, 1, 2, 5, 6, 7}), 2);
  CHECK(m.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-9));
  // constant sign inside each block, opposite across (orientation is a
  // tie-break among equal magnitudes, so only the pattern is pinned)
  for (int i : {1, 2}) CHECK(m.alphas[i] * m.alphas[0] > 0.0);
  for (int i : {3, 4, 5}) CHECK(m.alphas[i] * m.alphas[0] < 0.0);
}

TEST_CASE("training projections are weighted-centered") {
  Graph g = er_graph(150, 0.05, 7);
  KscModel m = train(g, build_kernel_matrix(g, first_k(40)), 6);
  LatentMatrix e = training_latent(m);
  for (uint32_t l = 0; l < e.cols; ++l) {
    double s = 0.0;
    for (uint32_t i = 0; i < 40; ++i) s += e.values[size_t{i} * e.cols + l] / m.kernel_degree[i];
    CHECK(std::abs(s) <= 1e-8);
  }
}

TEST_CASE("in-sample projection matches the training rows") {
  for (uint32_t seed : {8u, 9u}) {
    Graph g = er_graph(120, 0.08, seed);
    Split sp = make_split(g, SplitSpec{});
    KscModel m = train(g, build_kernel_matrix(g, sp.train), 7);
    LatentMatrix e = training_latent(m);
    for (uint32_t i = 0; i < m.train_size(); ++i) {
      std::vector<double> proj = project(m, adjacency_column(g, m.train_ids[i]));
      for (uint32_t l = 0; l < e.cols; ++l)
        CHECK(std::abs(proj[l] - e.values[size_t{i} * e.cols + l]) <= 1e-9);
    }
  }
}

TEST_CASE("kernel-miss projections collapse to the bias vector") {
  // K5 plus a pendant pair nowhere near the training columns
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  for (uint32_t i = 0; i < 5; ++i)
    for (uint32_t j = i + 1; j < 5; ++j) edges.emplace_back(i, j);
  edges.emplace_back(5, 6);
  Graph g = build_graph(7, edges);
  KscModel m = train(g, build_kernel_matrix(g, {0, 1, 2}), 2);

  std::vector<double> far = project(m, adjacency_column(g, 5));  // column {6}
  CHECK(far == m.biases);
  std::vector<double> empty = project(m, std::span<const uint32_t>{});
  CHECK(empty == m.biases);
}

TEST_CASE("projection rejects out-of-space indices") {
  Graph g = er_graph(30, 0.1, 10);
  KscModel m = train(g, build_kernel_matrix(g, first_k(10)), 3);
  std::vector<uint32_t> bogus{static_cast<uint32_t>(g.n_nodes)};
  CHECK(catch_error([&] { project(m, bogus); }).kind() == errc::invalid);
}

TEST_CASE("batch projection is chunk- and thread-invariant") {
  Graph g = er_graph(200, 0.05, 11);
  KscModel m = train(g, build_kernel_matrix(g, first_k(35)), 5);
  LatentMatrix all = project_all(m, g);
  CHECK(all.rows() == g.n_nodes);
  CHECK(all.cols == 4);

  std::vector<uint32_t> nodes(g.n_nodes);
  for (uint32_t i = 0; i < g.n_nodes; ++i) nodes[i] = i;
  for (uint32_t chunk : {1u, 7u, 1000u}) {
    LatentMatrix lm = project_batch(m, g, nodes, chunk, 3);
    CHECK(lm.values == all.values);
    CHECK(lm.node_ids == all.node_ids);
  }
  // row-by-row reference
  for (uint32_t i = 0; i < g.n_nodes; ++i) {
    std::vector<double> one = project(m, adjacency_column(g, i));
    for (uint32_t l = 0; l < all.cols; ++l)
      CHECK(one[l] == all.values[size_t{i} * all.cols + l]);
  }
}

TEST_CASE("train rejects bad maxk and isolated training nodes") {
  Graph g = er_graph(40, 0.1, 12);
  CHECK(catch_error([&] { train(g, build_kernel_matrix(g, first_k(10)), 1); }).kind() ==
        errc::invalid);
  CHECK(catch_error([&] { train(g, build_kernel_matrix(g, first_k(10)), 11); }).kind() ==
        errc::invalid);

  TempDir d;
  write_file(d.file("iso.tsv"), "a b\nc c\n");
  Graph iso = load_edge_list(d.file("iso.tsv"));
  CHECK(catch_error([&] { train(iso, build_kernel_matrix(iso, {0, 2}), 2); }).kind() ==
        errc::invalid);
}

TEST_CASE("model persistence reproduces projections bit for bit") {
  TempDir d;
  Graph g = er_graph(100, 0.07, 13);
  KscModel m = train(g, build_kernel_matrix(g, first_k(30)), 6);
  LatentMatrix before = project_all(m, g);

  save_model(m, d.file("model.bin"));
  KscModel back = load_model(d.file("model.bin"));
  CHECK(back.maxk == m.maxk);
  CHECK(back.train_ids == m.train_ids);
  CHECK(back.alphas == m.alphas);
  CHECK(back.biases == m.biases);
  CHECK(back.eigenvalues == m.eigenvalues);
  CHECK(back.train_latent == m.train_latent);
  LatentMatrix after = project_all(back, g);
  CHECK(after.values == before.values);

  save_latent(before, d.file("latent.bin"));
  LatentMatrix lat = load_latent(d.file("latent.bin"));
  CHECK(lat.cols == before.cols);
  CHECK(lat.node_ids == before.node_ids);
  CHECK(lat.values == before.values);
}

TEST_CASE("persistence rejects foreign and truncated files") {
  TempDir d;
  write_file(d.file("junk.bin"), "this is not a model file at all");
  CHECK(catch_error([&] { load_model(d.file("junk.bin")); }).kind() == errc::io);
  CHECK(catch_error([&] { load_latent(d.file("junk.bin")); }).kind() == errc::io);
  CHECK(catch_error([&] { load_model(d.file("absent.bin")); }).kind() == errc::io);

  Graph g = er_graph(40, 0.1, 14);
  KscModel m = train(g, build_kernel_matrix(g, first_k(12)), 3);
  save_model(m, d.file("model.bin"));
  std::string bytes = read_file(d.file("model.bin"));
  write_file(d.file("cut.bin"), bytes.substr(0, bytes.size() / 2));
  CHECK(catch_error([&] { load_model(d.file("cut.bin")); }).kind() == errc::io);
}
