#include "mhksc.h"

#include <new>
#include <string>

#include "mhksc/benchmark.hpp"
#include "mhksc/common.hpp"
#include "mhksc/graph.hpp"
#include "mhksc/hierarchy.hpp"
#include "mhksc/ksc.hpp"
#include "mhksc/metrics.hpp"
#include "mhksc/sampling.hpp"

struct mhksc_graph {
  mhksc::Graph g;
};
struct mhksc_partition {
  mhksc::Partition p;
};
struct mhksc_split {
  mhksc::Split s;
  uint32_t cap = 10000;  // carried into training as the kernel memory bound
};
struct mhksc_model {
  mhksc::KscModel m;
};
struct mhksc_latent {
  mhksc::LatentMatrix m;
};
struct mhksc_thresholds {
  mhksc::ThresholdSet t;
};
struct mhksc_tree {
  mhksc::ClusterTree t;
};

namespace {

thread_local std::string g_last_error;

mhksc_status to_status(mhksc::errc kind) {
  switch (kind) {
    case mhksc::errc::invalid: return MHKSC_ERR_INVALID;
    case mhksc::errc::io: return MHKSC_ERR_IO;
    case mhksc::errc::numeric: return MHKSC_ERR_NUMERIC;
    case mhksc::errc::cap: return MHKSC_ERR_CAP;
  }
  return MHKSC_ERR_INTERNAL;
}

// Runs the body, converting exceptions to status codes and recording the
// message for mhksc_last_error.
template <class F>
mhksc_status guarded(F&& body) {
  try {
    body();
    return MHKSC_OK;
  } catch (const mhksc::Error& e) {
    g_last_error = e.what();
    return to_status(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MHKSC_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MHKSC_ERR_INTERNAL;
  }
}

mhksc_status bad_argument(const char* msg) {
  g_last_error = msg;
  return MHKSC_ERR_INVALID;
}

mhksc::HierarchyOptions to_options(const mhksc_hierarchy_params* p, unsigned threads) {
  mhksc::HierarchyOptions opt;
  if (p) {
    opt.t0 = p->t0;
    if (p->max_cluster_size) opt.max_cluster_size = p->max_cluster_size;
    if (p->max_cluster_count) opt.max_cluster_count = p->max_cluster_count;
  }
  opt.affinity_cap = opt.max_cluster_count;
  opt.threads = threads;
  return opt;
}

}  // namespace

extern "C" {

const char* mhksc_last_error(void) { return g_last_error.c_str(); }

const char* mhksc_version(void) { return "mhksc 1.0.0"; }

/* graphs */

mhksc_status mhksc_graph_load(const char* path, int directed_input, mhksc_graph** out) {
  if (!path || !out) return bad_argument("null argument");
  return guarded([&] { *out = new mhksc_graph{mhksc::load_edge_list(path, directed_input != 0)}; });
}

mhksc_status mhksc_graph_write(const mhksc_graph* g, const char* path) {
  if (!g || !path) return bad_argument("null argument");
  return guarded([&] { mhksc::write_edge_list(g->g, path); });
}

void mhksc_graph_free(mhksc_graph* g) { delete g; }

uint32_t mhksc_graph_num_nodes(const mhksc_graph* g) { return g ? g->g.n_nodes : 0; }

uint64_t mhksc_graph_num_edges(const mhksc_graph* g) { return g ? g->g.n_edges : 0; }

const char* mhksc_graph_node_label(const mhksc_graph* g, uint32_t node) {
  if (!g || node >= g->g.n_nodes) return nullptr;
  return g->g.labels[node].c_str();
}

mhksc_status mhksc_graph_clustering_coefficient(const mhksc_graph* g, double* out) {
  if (!g || !out) return bad_argument("null argument");
  return guarded([&] { *out = mhksc::global_clustering_coefficient(g->g); });
}

/* partitions */

mhksc_status mhksc_partition_load(const mhksc_graph* g, const char* path, mhksc_partition** out) {
  if (!g || !path || !out) return bad_argument("null argument");
  return guarded([&] { *out = new mhksc_partition{mhksc::load_partition(g->g, path)}; });
}

mhksc_status mhksc_partition_write(const mhksc_partition* p, const mhksc_graph* g,
                                   const char* path) {
  if (!p || !g || !path) return bad_argument("null argument");
  return guarded([&] { mhksc::write_partition(p->p, g->g.labels, path); });
}

void mhksc_partition_free(mhksc_partition* p) { delete p; }

uint32_t mhksc_partition_num_clusters(const mhksc_partition* p) { return p ? p->p.k : 0; }

/* benchmarks */

mhksc_status mhksc_benchmark_generate(const mhksc_benchmark_params* params, mhksc_graph** graph,
                                      mhksc_partition** macro_truth,
                                      mhksc_partition** micro_truth) {
  if (!params) return bad_argument("null argument");
  return guarded([&] {
    mhksc::BenchmarkSpec spec;
    if (params->micro_sizes) {
      if (!params->micros_per_macro) mhksc::fail(mhksc::errc::invalid, "micro_sizes without micros_per_macro");
      const uint32_t* next = params->micro_sizes;
      for (uint32_t m = 0; m < params->n_macro; ++m) {
        spec.micro_sizes.emplace_back(next, next + params->micros_per_macro[m]);
        next += params->micros_per_macro[m];
      }
      spec.mu1 = params->mu1;
      spec.mu2 = params->mu2;
      spec.avg_degree = params->avg_degree;
      spec.seed = params->seed;
    } else {
      spec = mhksc::uniform_benchmark_spec(params->n_nodes, params->n_macro, params->n_micro,
                                           params->mu1, params->mu2, params->avg_degree,
                                           params->seed);
    }
    mhksc::Benchmark b = mhksc::generate(spec);
    if (graph) *graph = new mhksc_graph{std::move(b.graph)};
    if (macro_truth) *macro_truth = new mhksc_partition{std::move(b.macro_truth)};
    if (micro_truth) *micro_truth = new mhksc_partition{std::move(b.micro_truth)};
  });
}

/* splits */

mhksc_status mhksc_split_create(const mhksc_graph* g, const mhksc_split_params* params,
                                mhksc_split** out) {
  if (!g || !out) return bad_argument("null argument");
  return guarded([&] {
    mhksc::SplitSpec spec;
    if (params) {
      spec.train_fraction = params->train_fraction;
      spec.valid_fraction = params->valid_fraction;
      spec.cap = params->cap ? params->cap : spec.cap;
      spec.seed = params->seed;
    }
    *out = new mhksc_split{mhksc::make_split(g->g, spec), spec.cap};
  });
}

void mhksc_split_free(mhksc_split* s) { delete s; }

uint32_t mhksc_split_train_size(const mhksc_split* s) {
  return s ? static_cast<uint32_t>(s->s.train.size()) : 0;
}

uint32_t mhksc_split_valid_size(const mhksc_split* s) {
  return s ? static_cast<uint32_t>(s->s.valid.size()) : 0;
}

const uint32_t* mhksc_split_train_nodes(const mhksc_split* s) {
  return s ? s->s.train.data() : nullptr;
}

const uint32_t* mhksc_split_valid_nodes(const mhksc_split* s) {
  return s ? s->s.valid.data() : nullptr;
}

/* models */

mhksc_status mhksc_model_train(const mhksc_graph* g, const mhksc_split* s, uint32_t maxk,
                               unsigned threads, mhksc_model** out) {
  if (!g || !s || !out) return bad_argument("null argument");
  return guarded([&] {
    mhksc::KernelMatrix km = mhksc::build_kernel_matrix(g->g, s->s.train, threads, s->cap);
    *out = new mhksc_model{mhksc::train(g->g, std::move(km), maxk)};
  });
}

mhksc_status mhksc_model_save(const mhksc_model* m, const char* path) {
  if (!m || !path) return bad_argument("null argument");
  return guarded([&] { mhksc::save_model(m->m, path); });
}

mhksc_status mhksc_model_load(const char* path, mhksc_model** out) {
  if (!path || !out) return bad_argument("null argument");
  return guarded([&] { *out = new mhksc_model{mhksc::load_model(path)}; });
}

void mhksc_model_free(mhksc_model* m) { delete m; }

uint32_t mhksc_model_maxk(const mhksc_model* m) { return m ? m->m.maxk : 0; }

uint32_t mhksc_model_train_size(const mhksc_model* m) { return m ? m->m.train_size() : 0; }

mhksc_status mhksc_model_project(const mhksc_model* m, const mhksc_graph* g, const uint32_t* nodes,
                                 uint32_t count, uint32_t chunk, unsigned threads,
                                 mhksc_latent** out) {
  if (!m || !g || !out) return bad_argument("null argument");
  if (!nodes && count != 0) return bad_argument("node count without a node list");
  return guarded([&] {
    mhksc::LatentMatrix lat =
        nodes ? mhksc::project_batch(m->m, g->g, {nodes, count}, chunk, threads)
              : mhksc::project_all(m->m, g->g, chunk, threads);
    *out = new mhksc_latent{std::move(lat)};
  });
}

mhksc_status mhksc_latent_save(const mhksc_latent* m, const char* path) {
  if (!m || !path) return bad_argument("null argument");
  return guarded([&] { mhksc::save_latent(m->m, path); });
}

mhksc_status mhksc_latent_load(const char* path, mhksc_latent** out) {
  if (!path || !out) return bad_argument("null argument");
  return guarded([&] { *out = new mhksc_latent{mhksc::load_latent(path)}; });
}

void mhksc_latent_free(mhksc_latent* m) { delete m; }

uint64_t mhksc_latent_rows(const mhksc_latent* m) { return m ? m->m.rows() : 0; }

uint32_t mhksc_latent_cols(const mhksc_latent* m) { return m ? m->m.cols : 0; }

/* hierarchy */

mhksc_status mhksc_determine_thresholds(const mhksc_latent* valid,
                                        const mhksc_hierarchy_params* params, unsigned threads,
                                        mhksc_thresholds** out, mhksc_tree** valid_tree) {
  if (!valid || !out) return bad_argument("null argument");
  return guarded([&] {
    auto [ts, tree] = mhksc::determine_thresholds(valid->m, to_options(params, threads));
    *out = new mhksc_thresholds{std::move(ts)};
    if (valid_tree) *valid_tree = new mhksc_tree{std::move(tree)};
  });
}

void mhksc_thresholds_free(mhksc_thresholds* t) { delete t; }

uint32_t mhksc_thresholds_count(const mhksc_thresholds* t) {
  return t ? static_cast<uint32_t>(t->t.values.size()) : 0;
}

double mhksc_thresholds_value(const mhksc_thresholds* t, uint32_t i) {
  if (!t || i >= t->t.values.size()) return -1.0;
  return t->t.values[i];
}

mhksc_status mhksc_cluster(const mhksc_latent* test, const mhksc_thresholds* t,
                           const mhksc_hierarchy_params* params, unsigned threads,
                           mhksc_tree** out) {
  if (!test || !t || !out) return bad_argument("null argument");
  return guarded(
      [&] { *out = new mhksc_tree{mhksc::mh_ksc(test->m, t->t, to_options(params, threads))}; });
}

void mhksc_tree_free(mhksc_tree* t) { delete t; }

uint32_t mhksc_tree_num_levels(const mhksc_tree* t) {
  return t ? static_cast<uint32_t>(t->t.levels.size()) : 0;
}

uint64_t mhksc_tree_num_items(const mhksc_tree* t) { return t ? t->t.n_items : 0; }

uint32_t mhksc_tree_item_node(const mhksc_tree* t, uint64_t item) {
  if (!t || item >= t->t.item_ids.size()) return ~uint32_t{0};
  return t->t.item_ids[item];
}

uint32_t mhksc_tree_level_clusters(const mhksc_tree* t, uint32_t level) {
  if (!t || level >= t->t.levels.size()) return 0;
  return t->t.levels[level].k;
}

double mhksc_tree_level_threshold(const mhksc_tree* t, uint32_t level) {
  if (!t || level >= t->t.levels.size()) return -1.0;
  return t->t.levels[level].threshold;
}

mhksc_status mhksc_tree_level_partition(const mhksc_tree* t, uint32_t level,
                                        mhksc_partition** out) {
  if (!t || !out) return bad_argument("null argument");
  return guarded([&] { *out = new mhksc_partition{mhksc::level_partition(t->t, level)}; });
}

mhksc_status mhksc_tree_validate(const mhksc_tree* t) {
  if (!t) return bad_argument("null argument");
  return guarded([&] { mhksc::validate_tree(t->t); });
}

namespace {

// Stamps graph labels onto a copy of the tree so exports carry external ids.
mhksc::ClusterTree with_labels(const mhksc::ClusterTree& t, const mhksc_graph* g) {
  mhksc::ClusterTree copy = t;
  if (g) {
    copy.item_labels.clear();
    copy.item_labels.reserve(t.item_ids.size());
    for (uint32_t id : t.item_ids) {
      if (id >= g->g.n_nodes)
        mhksc::fail(mhksc::errc::invalid, "tree item is not a node of the graph");
      copy.item_labels.push_back(g->g.labels[id]);
    }
  }
  return copy;
}

}  // namespace

mhksc_status mhksc_tree_save(const mhksc_tree* t, const mhksc_graph* g, const char* path) {
  if (!t || !path) return bad_argument("null argument");
  return guarded([&] { mhksc::save_tree(with_labels(t->t, g), path); });
}

mhksc_status mhksc_tree_load(const char* path, mhksc_tree** out) {
  if (!path || !out) return bad_argument("null argument");
  return guarded([&] { *out = new mhksc_tree{mhksc::load_tree(path)}; });
}

mhksc_status mhksc_tree_export_dot(const mhksc_tree* t, const char* path) {
  if (!t || !path) return bad_argument("null argument");
  return guarded([&] { mhksc::export_tree_dot(t->t, path); });
}

mhksc_status mhksc_tree_export_membership(const mhksc_tree* t, const mhksc_graph* g,
                                          const char* path, uint32_t only_level) {
  if (!t || !path) return bad_argument("null argument");
  return guarded(
      [&] { mhksc::export_membership_matrix(with_labels(t->t, g), path, only_level); });
}

/* metrics */

mhksc_status mhksc_modularity(const mhksc_graph* g, const mhksc_partition* p, double* out) {
  if (!g || !p || !out) return bad_argument("null argument");
  return guarded([&] { *out = mhksc::modularity(g->g, p->p); });
}

mhksc_status mhksc_cut_conductance(const mhksc_graph* g, const mhksc_partition* p, double* out) {
  if (!g || !p || !out) return bad_argument("null argument");
  return guarded([&] { *out = mhksc::cut_conductance(g->g, p->p); });
}

mhksc_status mhksc_adjusted_rand_index(const mhksc_partition* a, const mhksc_partition* b,
                                       double* out) {
  if (!a || !b || !out) return bad_argument("null argument");
  return guarded([&] { *out = mhksc::adjusted_rand_index(a->p, b->p); });
}

mhksc_status mhksc_variation_of_information(const mhksc_partition* a, const mhksc_partition* b,
                                            double* out) {
  if (!a || !b || !out) return bad_argument("null argument");
  return guarded([&] { *out = mhksc::variation_of_information(a->p, b->p); });
}

}  // extern "C"
