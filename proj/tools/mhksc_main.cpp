// Command-line front end: generate | cluster | evaluate | export.
// Links only the public C interface of libmhksc.

#include <chrono>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mhksc.h"

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

// Exit classes: 2 configuration / invalid input (feasibility caps included),
// 3 file problems, 4 numerical failures.
int exit_code(mhksc_status s) {
  switch (s) {
    case MHKSC_OK: return 0;
    case MHKSC_ERR_INVALID:
    case MHKSC_ERR_CAP: return 2;
    case MHKSC_ERR_IO: return 3;
    case MHKSC_ERR_NUMERIC: return 4;
    default: return 1;
  }
}

[[noreturn]] void die(mhksc_status s, const std::string& what) {
  std::fprintf(stderr, "mhksc: %s: %s\n", what.c_str(), mhksc_last_error());
  std::exit(exit_code(s));
}

void require(mhksc_status s, const std::string& what) {
  if (s != MHKSC_OK) die(s, what);
}

[[noreturn]] void die_config(const std::string& msg) {
  std::fprintf(stderr, "mhksc: %s\n", msg.c_str());
  std::exit(2);
}

struct GraphDel {
  void operator()(mhksc_graph* p) const { mhksc_graph_free(p); }
};
struct PartDel {
  void operator()(mhksc_partition* p) const { mhksc_partition_free(p); }
};
struct SplitDel {
  void operator()(mhksc_split* p) const { mhksc_split_free(p); }
};
struct ModelDel {
  void operator()(mhksc_model* p) const { mhksc_model_free(p); }
};
struct LatentDel {
  void operator()(mhksc_latent* p) const { mhksc_latent_free(p); }
};
struct ThreshDel {
  void operator()(mhksc_thresholds* p) const { mhksc_thresholds_free(p); }
};
struct TreeDel {
  void operator()(mhksc_tree* p) const { mhksc_tree_free(p); }
};
using GraphPtr = std::unique_ptr<mhksc_graph, GraphDel>;
using PartPtr = std::unique_ptr<mhksc_partition, PartDel>;
using SplitPtr = std::unique_ptr<mhksc_split, SplitDel>;
using ModelPtr = std::unique_ptr<mhksc_model, ModelDel>;
using LatentPtr = std::unique_ptr<mhksc_latent, LatentDel>;
using ThreshPtr = std::unique_ptr<mhksc_thresholds, ThreshDel>;
using TreePtr = std::unique_ptr<mhksc_tree, TreeDel>;

uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::fprintf(stderr, "mhksc: cannot open '%s' for digesting\n", path.c_str());
    std::exit(3);
  }
  uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

GraphPtr load_graph(const std::string& path) {
  mhksc_graph* g = nullptr;
  require(mhksc_graph_load(path.c_str(), 0, &g), "loading '" + path + "'");
  return GraphPtr(g);
}

void write_node_list(const mhksc_graph* g, const uint32_t* nodes, uint32_t count,
                     const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) die_config("cannot write '" + path + "'");
  for (uint32_t i = 0; i < count; ++i) out << mhksc_graph_node_label(g, nodes[i]) << '\n';
}

struct ClusterConfig {
  std::string graph_path;
  std::string outdir = "mhksc_out";
  double t0 = 0.15;
  uint32_t maxk = 150;
  double train_fraction = 0.15;
  double valid_fraction = 0.15;
  uint32_t cap = 10000;
  uint32_t max_cluster = 10000;
  uint32_t chunk = 8192;
  uint64_t seed = 1;
  unsigned threads = 0;
};

int cmd_cluster(const ClusterConfig& cfg) {
  fs::create_directories(cfg.outdir);
  auto path_of = [&](const char* name) { return (fs::path(cfg.outdir) / name).string(); };
  uint64_t digest = fnv1a64_file(cfg.graph_path);

  auto t_start = std::chrono::steady_clock::now();
  GraphPtr graph = load_graph(cfg.graph_path);
  std::printf("graph: %u nodes, %" PRIu64 " edges (%.0f ms)\n", mhksc_graph_num_nodes(graph.get()),
              mhksc_graph_num_edges(graph.get()), ms_since(t_start));

  auto t_split = std::chrono::steady_clock::now();
  mhksc_split_params sp{cfg.train_fraction, cfg.valid_fraction, cfg.cap, cfg.seed};
  mhksc_split* split_raw = nullptr;
  require(mhksc_split_create(graph.get(), &sp, &split_raw), "selecting train/validation sets");
  SplitPtr split(split_raw);
  std::printf("split: %u training, %u validation nodes (%.0f ms)\n",
              mhksc_split_train_size(split.get()), mhksc_split_valid_size(split.get()),
              ms_since(t_split));
  write_node_list(graph.get(), mhksc_split_train_nodes(split.get()),
                  mhksc_split_train_size(split.get()), path_of("train_nodes.txt"));
  write_node_list(graph.get(), mhksc_split_valid_nodes(split.get()),
                  mhksc_split_valid_size(split.get()), path_of("valid_nodes.txt"));

  auto t_train = std::chrono::steady_clock::now();
  mhksc_model* model_raw = nullptr;
  require(mhksc_model_train(graph.get(), split.get(), cfg.maxk, cfg.threads, &model_raw),
          "training the kernel spectral model");
  ModelPtr model(model_raw);
  require(mhksc_model_save(model.get(), path_of("model.bin").c_str()), "saving the model");
  std::printf("model: maxk %u, %u latent variables (%.0f ms)\n", cfg.maxk, cfg.maxk - 1,
              ms_since(t_train));

  auto t_valid = std::chrono::steady_clock::now();
  mhksc_latent* lv_raw = nullptr;
  require(mhksc_model_project(model.get(), graph.get(), mhksc_split_valid_nodes(split.get()),
                              mhksc_split_valid_size(split.get()), cfg.chunk, cfg.threads, &lv_raw),
          "projecting the validation set");
  LatentPtr latent_valid(lv_raw);
  require(mhksc_latent_save(latent_valid.get(), path_of("latent_valid.bin").c_str()),
          "saving validation projections");

  mhksc_hierarchy_params hp{cfg.t0, cfg.max_cluster, cfg.max_cluster};
  mhksc_thresholds* ts_raw = nullptr;
  mhksc_tree* vt_raw = nullptr;
  require(mhksc_determine_thresholds(latent_valid.get(), &hp, cfg.threads, &ts_raw, &vt_raw),
          "determining distance thresholds");
  ThreshPtr thresholds(ts_raw);
  TreePtr valid_tree(vt_raw);
  require(mhksc_tree_save(valid_tree.get(), graph.get(), path_of("validation_tree.json").c_str()),
          "saving the validation hierarchy");
  {
    std::ofstream out(path_of("thresholds.txt"), std::ios::binary);
    if (!out) die_config("cannot write thresholds.txt");
    char buf[64];
    for (uint32_t i = 0; i < mhksc_thresholds_count(thresholds.get()); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g\n", mhksc_thresholds_value(thresholds.get(), i));
      out << buf;
    }
  }
  std::printf("thresholds: %u learned (%.0f ms)\n", mhksc_thresholds_count(thresholds.get()),
              ms_since(t_valid));

  auto t_project = std::chrono::steady_clock::now();
  mhksc_latent* la_raw = nullptr;
  require(mhksc_model_project(model.get(), graph.get(), nullptr, 0, cfg.chunk, cfg.threads,
                              &la_raw),
          "projecting the full node set");
  LatentPtr latent_all(la_raw);
  require(mhksc_latent_save(latent_all.get(), path_of("latent_all.bin").c_str()),
          "saving full projections");
  std::printf("projection: %" PRIu64 " rows (%.0f ms)\n", mhksc_latent_rows(latent_all.get()),
              ms_since(t_project));

  auto t_cluster = std::chrono::steady_clock::now();
  mhksc_tree* tree_raw = nullptr;
  require(mhksc_cluster(latent_all.get(), thresholds.get(), &hp, cfg.threads, &tree_raw),
          "building the hierarchy");
  TreePtr tree(tree_raw);
  require(mhksc_tree_validate(tree.get()), "checking hierarchy invariants");
  require(mhksc_tree_save(tree.get(), graph.get(), path_of("tree.json").c_str()),
          "saving the hierarchy");
  require(mhksc_tree_export_membership(tree.get(), graph.get(), path_of("membership.tsv").c_str(),
                                       ~uint32_t{0}),
          "writing the membership matrix");
  uint32_t n_levels = mhksc_tree_num_levels(tree.get());
  std::printf("hierarchy: %u levels (%.0f ms)\n", n_levels, ms_since(t_cluster));
  for (uint32_t l = 0; l < n_levels; ++l)
    std::printf("  level %u: threshold %.6f, %u clusters\n", l,
                mhksc_tree_level_threshold(tree.get(), l),
                mhksc_tree_level_clusters(tree.get(), l));

  ordered_json manifest;
  manifest["tool"] = mhksc_version();
  char digest_hex[32];
  std::snprintf(digest_hex, sizeof digest_hex, "%016" PRIx64, digest);
  manifest["input"] = {{"path", cfg.graph_path},
                       {"fnv1a64", digest_hex},
                       {"nodes", mhksc_graph_num_nodes(graph.get())},
                       {"edges", mhksc_graph_num_edges(graph.get())}};
  manifest["config"] = {{"t0", cfg.t0},
                        {"maxk", cfg.maxk},
                        {"train_fraction", cfg.train_fraction},
                        {"valid_fraction", cfg.valid_fraction},
                        {"cap", cfg.cap},
                        {"max_cluster", cfg.max_cluster},
                        {"chunk", cfg.chunk},
                        {"seed", cfg.seed}};
  manifest["thresholds"] = ordered_json::array();
  for (uint32_t i = 0; i < mhksc_thresholds_count(thresholds.get()); ++i)
    manifest["thresholds"].push_back(mhksc_thresholds_value(thresholds.get(), i));
  manifest["levels"] = ordered_json::array();
  for (uint32_t l = 0; l < n_levels; ++l)
    manifest["levels"].push_back({{"threshold", mhksc_tree_level_threshold(tree.get(), l)},
                                  {"k", mhksc_tree_level_clusters(tree.get(), l)}});
  manifest["outputs"] = {"model.bin",        "latent_valid.bin",     "latent_all.bin",
                         "thresholds.txt",   "validation_tree.json", "tree.json",
                         "membership.tsv",   "train_nodes.txt",      "valid_nodes.txt"};
  {
    std::ofstream out(path_of("manifest.json"), std::ios::binary);
    if (!out) die_config("cannot write manifest.json");
    out << manifest.dump(2) << '\n';
  }
  std::printf("outputs in %s (total %.0f ms)\n", cfg.outdir.c_str(), ms_since(t_start));
  return 0;
}

int cmd_generate(uint32_t nodes, uint32_t macro, uint32_t micro, double mu1, double mu2,
                 double avg_degree, uint64_t seed, const std::string& prefix) {
  mhksc_benchmark_params bp{};
  bp.n_nodes = nodes;
  bp.n_macro = macro;
  bp.n_micro = micro;
  bp.mu1 = mu1;
  bp.mu2 = mu2;
  bp.avg_degree = avg_degree;
  bp.seed = seed;
  mhksc_graph* g_raw = nullptr;
  mhksc_partition* ma_raw = nullptr;
  mhksc_partition* mi_raw = nullptr;
  require(mhksc_benchmark_generate(&bp, &g_raw, &ma_raw, &mi_raw), "generating the benchmark");
  GraphPtr g(g_raw);
  PartPtr macro_truth(ma_raw), micro_truth(mi_raw);

  std::string edges = prefix + "_edges.tsv";
  std::string macro_file = prefix + "_macro.tsv";
  std::string micro_file = prefix + "_micro.tsv";
  require(mhksc_graph_write(g.get(), edges.c_str()), "writing the edge list");
  require(mhksc_partition_write(macro_truth.get(), g.get(), macro_file.c_str()),
          "writing the macro truth");
  require(mhksc_partition_write(micro_truth.get(), g.get(), micro_file.c_str()),
          "writing the micro truth");
  std::printf("benchmark: %u nodes, %" PRIu64 " edges, %u macro / %u micro communities\n",
              mhksc_graph_num_nodes(g.get()), mhksc_graph_num_edges(g.get()),
              mhksc_partition_num_clusters(macro_truth.get()),
              mhksc_partition_num_clusters(micro_truth.get()));
  std::printf("wrote %s, %s, %s\n", edges.c_str(), macro_file.c_str(), micro_file.c_str());
  return 0;
}

int cmd_evaluate(const std::string& graph_path, const std::string& tree_path,
                 const std::vector<std::string>& truth_files) {
  GraphPtr graph = load_graph(graph_path);
  mhksc_tree* tree_raw = nullptr;
  require(mhksc_tree_load(tree_path.c_str(), &tree_raw), "loading '" + tree_path + "'");
  TreePtr tree(tree_raw);

  uint32_t n = mhksc_graph_num_nodes(graph.get());
  if (mhksc_tree_num_items(tree.get()) != n)
    die_config("tree covers " + std::to_string(mhksc_tree_num_items(tree.get())) +
               " items but the graph has " + std::to_string(n) + " nodes");
  for (uint32_t i = 0; i < n; ++i)
    if (mhksc_tree_item_node(tree.get(), i) != i)
      die_config("tree item order does not match the graph's node set");

  std::vector<PartPtr> truths;
  for (const auto& file : truth_files) {
    mhksc_partition* p = nullptr;
    require(mhksc_partition_load(graph.get(), file.c_str(), &p), "loading '" + file + "'");
    truths.emplace_back(p);
  }

  std::printf("%-6s %-10s %-6s %-9s %-9s", "level", "threshold", "k", "Q", "CC");
  for (const auto& file : truth_files) {
    std::string base = fs::path(file).filename().string();
    std::printf(" %-12s %-12s", ("ARI:" + base).c_str(), ("VI:" + base).c_str());
  }
  std::printf("\n");

  uint32_t n_levels = mhksc_tree_num_levels(tree.get());
  for (uint32_t l = 0; l < n_levels; ++l) {
    mhksc_partition* lp_raw = nullptr;
    require(mhksc_tree_level_partition(tree.get(), l, &lp_raw), "extracting a level");
    PartPtr level(lp_raw);
    double q = 0.0, cc = 0.0;
    require(mhksc_modularity(graph.get(), level.get(), &q), "modularity");
    require(mhksc_cut_conductance(graph.get(), level.get(), &cc), "cut conductance");
    std::printf("%-6u %-10.6f %-6u %-9.6f %-9.6f", l,
                mhksc_tree_level_threshold(tree.get(), l),
                mhksc_partition_num_clusters(level.get()), q, cc);
    for (const auto& truth : truths) {
      double ari = 0.0, vi = 0.0;
      require(mhksc_adjusted_rand_index(level.get(), truth.get(), &ari), "adjusted Rand index");
      require(mhksc_variation_of_information(level.get(), truth.get(), &vi),
              "variation of information");
      std::printf(" %-12.6f %-12.6f", ari, vi);
    }
    std::printf("\n");
  }
  return 0;
}

int cmd_export(const std::string& tree_path, const std::string& format, const std::string& out,
               int64_t level) {
  mhksc_tree* tree_raw = nullptr;
  require(mhksc_tree_load(tree_path.c_str(), &tree_raw), "loading '" + tree_path + "'");
  TreePtr tree(tree_raw);
  if (format == "dot") {
    if (level >= 0) die_config("--level applies only to the membership format");
    require(mhksc_tree_export_dot(tree.get(), out.c_str()), "writing '" + out + "'");
  } else {
    uint32_t only = level < 0 ? ~uint32_t{0} : static_cast<uint32_t>(level);
    require(mhksc_tree_export_membership(tree.get(), nullptr, out.c_str(), only),
            "writing '" + out + "'");
  }
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilevel hierarchical kernel spectral clustering for sparse networks"};
  app.require_subcommand(1);

  // generate
  uint32_t g_nodes = 0, g_macro = 0, g_micro = 0;
  double g_mu1 = 0.1, g_mu2 = 0.2, g_deg = 20.0;
  uint64_t g_seed = 1;
  std::string g_prefix = "benchmark";
  auto* gen = app.add_subcommand("generate", "Generate a two-level benchmark graph");
  gen->add_option("--nodes", g_nodes, "Total node count")->required();
  gen->add_option("--macro", g_macro, "Macro community count")->required();
  gen->add_option("--micro", g_micro, "Micro community count")->required();
  gen->add_option("--mu1", g_mu1, "Macro mixing fraction")->capture_default_str();
  gen->add_option("--mu2", g_mu2, "Micro mixing fraction")->capture_default_str();
  gen->add_option("--avg-degree", g_deg, "Target mean degree")->capture_default_str();
  gen->add_option("--seed", g_seed, "Random seed")->capture_default_str();
  gen->add_option("--out", g_prefix, "Output file prefix")->capture_default_str();

  // cluster
  ClusterConfig cc;
  auto* cluster = app.add_subcommand("cluster", "Run the full clustering pipeline");
  cluster->add_option("--graph", cc.graph_path, "Edge-list file")->required();
  cluster->add_option("--outdir", cc.outdir, "Output directory")->capture_default_str();
  cluster->add_option("--t0", cc.t0, "Ground distance threshold")->capture_default_str();
  cluster->add_option("--maxk", cc.maxk, "Latent dimensions + 1")->capture_default_str();
  cluster->add_option("--train-fraction", cc.train_fraction, "Training-set fraction")->capture_default_str();
  cluster->add_option("--valid-fraction", cc.valid_fraction, "Validation-set fraction")->capture_default_str();
  cluster->add_option("--cap", cc.cap, "Train/validation size cap")->capture_default_str();
  cluster->add_option("--max-cluster", cc.max_cluster, "Ground-level cluster size/count cap")->capture_default_str();
  cluster->add_option("--chunk", cc.chunk, "Projection chunk size")->capture_default_str();
  cluster->add_option("--seed", cc.seed, "Random seed")->capture_default_str();
  cluster->add_option("--threads", cc.threads, "Worker threads (0 = all cores)")->capture_default_str();

  // evaluate
  std::string e_graph, e_tree;
  std::vector<std::string> e_truths;
  auto* eval = app.add_subcommand("evaluate", "Per-level quality report for a saved hierarchy");
  eval->add_option("--graph", e_graph, "Edge-list file")->required();
  eval->add_option("--tree", e_tree, "Tree file from cluster")->required();
  eval->add_option("--truth", e_truths, "Ground-truth partition file (repeatable)");

  // export
  std::string x_tree, x_format, x_out;
  int64_t x_level = -1;
  auto* exp = app.add_subcommand("export", "Re-render a saved hierarchy");
  exp->add_option("--tree", x_tree, "Tree file from cluster")->required();
  exp->add_option("--format", x_format, "Output format")
      ->required()
      ->check(CLI::IsMember({"dot", "membership"}));
  exp->add_option("--out", x_out, "Output file")->required();
  exp->add_option("--level", x_level, "Restrict membership output to one level");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // configuration class
  }

  if (gen->parsed())
    return cmd_generate(g_nodes, g_macro, g_micro, g_mu1, g_mu2, g_deg, g_seed, g_prefix);
  if (cluster->parsed()) return cmd_cluster(cc);
  if (eval->parsed()) return cmd_evaluate(e_graph, e_tree, e_truths);
  if (exp->parsed()) return cmd_export(x_tree, x_format, x_out, x_level);
  return 2;
}
