/* Multilevel hierarchical kernel spectral clustering for large sparse
 * undirected networks: C interface of libmhksc.
 *
 * All objects are opaque handles created and destroyed by this library. Every
 * fallible function returns an mhksc_status; on failure the out-parameters are
 * untouched and mhksc_last_error() returns a thread-local description valid
 * until the next failing call on the same thread. Thread parameters: 0 picks
 * the hardware concurrency; results do not depend on the thread count. */

#ifndef MHKSC_H
#define MHKSC_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define MHKSC_API __declspec(dllexport)
#else
#define MHKSC_API __attribute__((visibility("default")))
#endif

typedef enum mhksc_status {
  MHKSC_OK = 0,
  MHKSC_ERR_INVALID = 1, /* bad arguments, configuration, or inconsistent inputs */
  MHKSC_ERR_IO = 2,      /* missing, unreadable, or malformed files */
  MHKSC_ERR_NUMERIC = 3, /* eigensolver failure or degenerate spectrum */
  MHKSC_ERR_CAP = 4,     /* a feasibility cap was exceeded */
  MHKSC_ERR_INTERNAL = 5
} mhksc_status;

MHKSC_API const char* mhksc_last_error(void);
MHKSC_API const char* mhksc_version(void);

/* ------------------------------------------------------------------ graphs */

typedef struct mhksc_graph mhksc_graph;

/* Edge-list file: "u<ws>v" per line, '#' comments; tokens are arbitrary ids,
 * densely reindexed in first-appearance order; edges are symmetrized and
 * deduplicated, self-loops dropped. directed_input only documents the source:
 * both values load the same undirected graph. */
MHKSC_API mhksc_status mhksc_graph_load(const char* path, int directed_input, mhksc_graph** out);
MHKSC_API mhksc_status mhksc_graph_write(const mhksc_graph* g, const char* path);
MHKSC_API void mhksc_graph_free(mhksc_graph* g);
MHKSC_API uint32_t mhksc_graph_num_nodes(const mhksc_graph* g);
MHKSC_API uint64_t mhksc_graph_num_edges(const mhksc_graph* g);
MHKSC_API const char* mhksc_graph_node_label(const mhksc_graph* g, uint32_t node);
MHKSC_API mhksc_status mhksc_graph_clustering_coefficient(const mhksc_graph* g, double* out);

/* -------------------------------------------------------------- partitions */

typedef struct mhksc_partition mhksc_partition;

/* Partition file: "node_id<ws>cluster_id" per line; every graph node exactly
 * once. */
MHKSC_API mhksc_status mhksc_partition_load(const mhksc_graph* g, const char* path,
                                            mhksc_partition** out);
MHKSC_API mhksc_status mhksc_partition_write(const mhksc_partition* p, const mhksc_graph* g,
                                             const char* path);
MHKSC_API void mhksc_partition_free(mhksc_partition* p);
MHKSC_API uint32_t mhksc_partition_num_clusters(const mhksc_partition* p);

/* ------------------------------------------------------------- benchmarks */

typedef struct mhksc_benchmark_params {
  uint32_t n_nodes;  /* used when micro_sizes is NULL */
  uint32_t n_macro;
  uint32_t n_micro;
  const uint32_t* micros_per_macro; /* length n_macro, NULL -> even split */
  const uint32_t* micro_sizes;      /* length n_micro grouped by macro, NULL -> near-uniform */
  double mu1;                       /* fraction of a node's edges leaving its macro community */
  double mu2;                       /* fraction leaving its micro community (mu1 <= mu2) */
  double avg_degree;
  uint64_t seed;
} mhksc_benchmark_params;

/* Planted two-level benchmark with known ground truth; deterministic per seed.
 * Any out-parameter may be NULL if that result is not needed. */
MHKSC_API mhksc_status mhksc_benchmark_generate(const mhksc_benchmark_params* params,
                                                mhksc_graph** graph, mhksc_partition** macro_truth,
                                                mhksc_partition** micro_truth);

/* ------------------------------------------------------------------ splits */

typedef struct mhksc_split mhksc_split;

typedef struct mhksc_split_params {
  double train_fraction; /* of n_nodes, rounded; capped at cap */
  double valid_fraction;
  uint32_t cap;
  uint64_t seed;
} mhksc_split_params;

/* Degree-guided representative subset selection; validation is disjoint from
 * training. */
MHKSC_API mhksc_status mhksc_split_create(const mhksc_graph* g, const mhksc_split_params* params,
                                          mhksc_split** out);
MHKSC_API void mhksc_split_free(mhksc_split* s);
MHKSC_API uint32_t mhksc_split_train_size(const mhksc_split* s);
MHKSC_API uint32_t mhksc_split_valid_size(const mhksc_split* s);
/* Borrowed views, valid while the split lives. */
MHKSC_API const uint32_t* mhksc_split_train_nodes(const mhksc_split* s);
MHKSC_API const uint32_t* mhksc_split_valid_nodes(const mhksc_split* s);

/* ------------------------------------------------------------------ models */

typedef struct mhksc_model mhksc_model;
typedef struct mhksc_latent mhksc_latent;

/* Trains the kernel spectral model on the training set: cosine kernel between
 * training adjacency columns, degree-centered eigenproblem, maxk-1 leading
 * eigenvectors with per-variable biases. */
MHKSC_API mhksc_status mhksc_model_train(const mhksc_graph* g, const mhksc_split* s, uint32_t maxk,
                                         unsigned threads, mhksc_model** out);
MHKSC_API mhksc_status mhksc_model_save(const mhksc_model* m, const char* path);
MHKSC_API mhksc_status mhksc_model_load(const char* path, mhksc_model** out);
MHKSC_API void mhksc_model_free(mhksc_model* m);
MHKSC_API uint32_t mhksc_model_maxk(const mhksc_model* m);
MHKSC_API uint32_t mhksc_model_train_size(const mhksc_model* m);

/* Out-of-sample projection of node adjacency columns into the latent space.
 * nodes == NULL projects every node of g in index order. chunk 0 -> default. */
MHKSC_API mhksc_status mhksc_model_project(const mhksc_model* m, const mhksc_graph* g,
                                           const uint32_t* nodes, uint32_t count, uint32_t chunk,
                                           unsigned threads, mhksc_latent** out);
MHKSC_API mhksc_status mhksc_latent_save(const mhksc_latent* m, const char* path);
MHKSC_API mhksc_status mhksc_latent_load(const char* path, mhksc_latent** out);
MHKSC_API void mhksc_latent_free(mhksc_latent* m);
MHKSC_API uint64_t mhksc_latent_rows(const mhksc_latent* m);
MHKSC_API uint32_t mhksc_latent_cols(const mhksc_latent* m);

/* --------------------------------------------------------------- hierarchy */

typedef struct mhksc_thresholds mhksc_thresholds;
typedef struct mhksc_tree mhksc_tree;

typedef struct mhksc_hierarchy_params {
  double t0;                  /* ground distance threshold in (0, 2); 0.15 recommended */
  uint32_t max_cluster_size;  /* ground clusters truncate here; 0 -> 10000 */
  uint32_t max_cluster_count; /* hard cap, exceeding it is an error; 0 -> 10000 */
} mhksc_hierarchy_params;

/* Learns the increasing threshold sequence on validation projections; also
 * returns the validation hierarchy when valid_tree is non-NULL. */
MHKSC_API mhksc_status mhksc_determine_thresholds(const mhksc_latent* valid,
                                                  const mhksc_hierarchy_params* params,
                                                  unsigned threads, mhksc_thresholds** out,
                                                  mhksc_tree** valid_tree);
MHKSC_API void mhksc_thresholds_free(mhksc_thresholds* t);
MHKSC_API uint32_t mhksc_thresholds_count(const mhksc_thresholds* t);
MHKSC_API double mhksc_thresholds_value(const mhksc_thresholds* t, uint32_t i);

/* Builds the multilevel hierarchy over all projected rows from the learned
 * thresholds. */
MHKSC_API mhksc_status mhksc_cluster(const mhksc_latent* test, const mhksc_thresholds* t,
                                     const mhksc_hierarchy_params* params, unsigned threads,
                                     mhksc_tree** out);
MHKSC_API void mhksc_tree_free(mhksc_tree* t);
MHKSC_API uint32_t mhksc_tree_num_levels(const mhksc_tree* t);
MHKSC_API uint64_t mhksc_tree_num_items(const mhksc_tree* t);
/* Node index behind tree row `item`; UINT32_MAX when out of range. */
MHKSC_API uint32_t mhksc_tree_item_node(const mhksc_tree* t, uint64_t item);
MHKSC_API uint32_t mhksc_tree_level_clusters(const mhksc_tree* t, uint32_t level);
MHKSC_API double mhksc_tree_level_threshold(const mhksc_tree* t, uint32_t level);
/* level is 0-based from the finest level. */
MHKSC_API mhksc_status mhksc_tree_level_partition(const mhksc_tree* t, uint32_t level,
                                                  mhksc_partition** out);
/* Verifies partition/nesting/threshold invariants; MHKSC_ERR_INVALID if broken. */
MHKSC_API mhksc_status mhksc_tree_validate(const mhksc_tree* t);

/* Self-contained structured-text tree file; byte-identical for identical
 * inputs. graph may be NULL to keep whatever labels the tree already carries
 * (node indices when it has none). */
MHKSC_API mhksc_status mhksc_tree_save(const mhksc_tree* t, const mhksc_graph* g, const char* path);
MHKSC_API mhksc_status mhksc_tree_load(const char* path, mhksc_tree** out);
/* Graphviz dot rendering of the cluster tree. */
MHKSC_API mhksc_status mhksc_tree_export_dot(const mhksc_tree* t, const char* path);
/* Block-diagonal-ordered per-level membership table, one row per item.
 * only_level = UINT32_MAX emits every level's column; otherwise it selects a
 * single level and must be in range. */
MHKSC_API mhksc_status mhksc_tree_export_membership(const mhksc_tree* t, const mhksc_graph* g,
                                                    const char* path, uint32_t only_level);

/* ----------------------------------------------------------------- metrics */

MHKSC_API mhksc_status mhksc_modularity(const mhksc_graph* g, const mhksc_partition* p,
                                        double* out);
MHKSC_API mhksc_status mhksc_cut_conductance(const mhksc_graph* g, const mhksc_partition* p,
                                             double* out);
MHKSC_API mhksc_status mhksc_adjusted_rand_index(const mhksc_partition* a,
                                                 const mhksc_partition* b, double* out);
MHKSC_API mhksc_status mhksc_variation_of_information(const mhksc_partition* a,
                                                      const mhksc_partition* b, double* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MHKSC_H */
