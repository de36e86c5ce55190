#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <vector>

#include "mhksc/benchmark.hpp"
#include "util.hpp"

using namespace mhksc;

TEST_CASE("uniform spec spreads communities and nodes evenly") {
  BenchmarkSpec s = uniform_benchmark_spec(2000, 9, 37, 0.1, 0.2, 20.0, 1);
  CHECK(s.micro_sizes.size() == 9);
  uint32_t micros = 0, nodes = 0, size_lo = ~0u, size_hi = 0;
  for (const auto& m : s.micro_sizes)
    for (uint32_t sz : m) {
      ++micros;
      nodes += sz;
      size_lo = std::min(size_lo, sz);
      size_hi = std::max(size_hi, sz);
    }
  CHECK(micros == 37);
  CHECK(nodes == 2000);
  CHECK(size_hi - size_lo <= 1);
}

TEST_CASE("spec validation") {
  auto bad = [](BenchmarkSpec s) { return catch_error([&] { generate(s); }).kind(); };
  BenchmarkSpec base = uniform_benchmark_spec(100, 2, 4, 0.1, 0.2, 8.0, 1);

  BenchmarkSpec s = base;
  s.mu1 = 0.5;
  s.mu2 = 0.2;
  CHECK(bad(s) == errc::invalid);
  s = base;
  s.mu2 = 1.5;
  CHECK(bad(s) == errc::invalid);
  s = base;
  s.mu1 = -0.1;
  CHECK(bad(s) == errc::invalid);
  s = base;
  s.avg_degree = 0.0;
  CHECK(bad(s) == errc::invalid);

  // below the minimum node count
  CHECK(bad(uniform_benchmark_spec(9, 1, 2, 0.0, 0.0, 2.0, 1)) == errc::invalid);

  // community of 5 cannot host 16 expected intra edges per node
  s = BenchmarkSpec{};
  s.micro_sizes = {{5, 5}};
  CHECK(bad(s) == errc::invalid);

  // expected intra degree below 1
  s = BenchmarkSpec{};
  s.micro_sizes = {{20, 20}};
  s.avg_degree = 0.5;
  s.mu1 = s.mu2 = 0.0;
  CHECK(bad(s) == errc::invalid);

  // singletons cannot carry intra edges
  s = BenchmarkSpec{};
  s.micro_sizes = {{1, 19}};
  CHECK(bad(s) == errc::invalid);
}

TEST_CASE("zero mixing keeps every edge inside its micro community") {
  Benchmark b = generate(uniform_benchmark_spec(60, 2, 6, 0.0, 0.0, 8.0, 3));
  CHECK(b.graph.n_nodes == 60);
  for (uint32_t i = 0; i < b.graph.n_nodes; ++i)
    for (uint32_t j : b.graph.adj(i))
      CHECK(b.micro_truth.assign[i] == b.micro_truth.assign[j]);
}

TEST_CASE("generation is deterministic per seed") {
  BenchmarkSpec s = uniform_benchmark_spec(300, 3, 9, 0.1, 0.2, 12.0, 42);
  Benchmark a = generate(s), b = generate(s);
  CHECK(a.graph.offsets == b.graph.offsets);
  CHECK(a.graph.neighbors == b.graph.neighbors);
  s.seed = 43;
  Benchmark c = generate(s);
  CHECK(a.graph.neighbors != c.graph.neighbors);
}

TEST_CASE("truth partitions are consistent") {
  Benchmark b = generate(uniform_benchmark_spec(500, 4, 10, 0.1, 0.2, 15.0, 5));
  CHECK(b.macro_truth.k == 4);
  CHECK(b.micro_truth.k == 10);
  CHECK(b.macro_truth.assign.size() == 500);
  CHECK(b.micro_truth.assign.size() == 500);
  // each micro community sits inside exactly one macro community
  std::vector<std::set<uint32_t>> macro_of(b.micro_truth.k);
  for (uint32_t i = 0; i < 500; ++i)
    macro_of[b.micro_truth.assign[i]].insert(b.macro_truth.assign[i]);
  for (const auto& s : macro_of) CHECK(s.size() == 1);
}

TEST_CASE("realized degree and mixing track the requested parameters") {
  Benchmark b = generate(uniform_benchmark_spec(2000, 9, 37, 0.1, 0.2, 20.0, 1));
  double mean_deg = 2.0 * b.graph.n_edges / b.graph.n_nodes;
  CHECK(mean_deg == doctest::Approx(20.0).epsilon(0.15));

  uint64_t ends = 0, out_macro = 0, out_micro = 0;
  for (uint32_t i = 0; i < b.graph.n_nodes; ++i)
    for (uint32_t j : b.graph.adj(i)) {
      ++ends;
      if (b.macro_truth.assign[i] != b.macro_truth.assign[j]) ++out_macro;
      if (b.micro_truth.assign[i] != b.micro_truth.assign[j]) ++out_micro;
    }
  CHECK(double(out_macro) / ends == doctest::Approx(0.1).epsilon(0.5));
  CHECK(double(out_micro) / ends == doctest::Approx(0.2).epsilon(0.25));
}
