// Drives the installed binary end to end through popen. The binary path
// arrives as argv[1] from ctest and is stripped before doctest parses flags.
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "util.hpp"

namespace {

std::string g_cli;

struct RunResult {
  int status = -1;
  std::string output;
};

RunResult run(const std::string& args) {
  std::string cmd = g_cli + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, got);
  int rc = pclose(pipe);
  r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return r;
}

// Shared fixture: one small benchmark plus one cluster run per process.
struct Workspace {
  TempDir dir;
  std::string edges, macro, micro, outdir;
  Workspace() {
    std::string prefix = dir.file("bench");
    RunResult g = run("generate --nodes 200 --macro 2 --micro 4 --mu1 0.05 --mu2 0.1 "
                      "--avg-degree 16 --seed 7 --out " + prefix);
    REQUIRE(g.status == 0);
    edges = prefix + "_edges.tsv";
    macro = prefix + "_macro.tsv";
    micro = prefix + "_micro.tsv";
    outdir = dir.file("out");
    RunResult c = run("cluster --graph " + edges + " --outdir " + outdir + " --maxk 10");
    REQUIRE(c.status == 0);
  }
  std::string out(const std::string& name) const { return outdir + "/" + name; }
};

Workspace& ws() {
  static Workspace w;
  return w;
}

size_t count_lines(const std::string& text) {
  size_t n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("bare invocation and unknown subcommands exit with the config code") {
  CHECK(run("").status == 2);
  CHECK(run("frobnicate").status == 2);
  RunResult r = run("generate --macro 2 --micro 4");
  CHECK(r.status == 2);
  CHECK(r.output.find("--nodes") != std::string::npos);
}

TEST_CASE("generate writes the three benchmark files deterministically") {
  TempDir d;
  std::string p1 = d.file("a"), p2 = d.file("b");
  std::string flags = "generate --nodes 120 --macro 2 --micro 3 --mu1 0.05 --mu2 0.1 "
                      "--avg-degree 12 --seed 3 --out ";
  RunResult r = run(flags + p1);
  REQUIRE(r.status == 0);
  CHECK(r.output.find("wrote") != std::string::npos);
  REQUIRE(run(flags + p2).status == 0);
  std::string edges = read_file(p1 + "_edges.tsv");
  CHECK(edges == read_file(p2 + "_edges.tsv"));
  CHECK(read_file(p1 + "_macro.tsv") == read_file(p2 + "_macro.tsv"));
  CHECK(count_lines(read_file(p1 + "_micro.tsv")) == 120);
  CHECK(count_lines(edges) > 120);
}

TEST_CASE("cluster produces every documented output") {
  const char* names[] = {"model.bin",      "latent_valid.bin",     "latent_all.bin",
                         "thresholds.txt", "validation_tree.json", "tree.json",
                         "membership.tsv", "manifest.json",        "train_nodes.txt",
                         "valid_nodes.txt"};
  for (const char* name : names) {
    INFO(name);
    CHECK(!read_file(ws().out(name)).empty());
  }
  CHECK(count_lines(read_file(ws().out("train_nodes.txt"))) == 30);
  CHECK(count_lines(read_file(ws().out("valid_nodes.txt"))) == 30);

  auto manifest = nlohmann::json::parse(read_file(ws().out("manifest.json")));
  CHECK(manifest.at("input").at("nodes") == 200);
  CHECK(manifest.at("config").at("maxk") == 10);
  CHECK(manifest.at("levels").size() >= 1);
  CHECK(manifest.at("thresholds").size() >= 1);
  for (auto& name : manifest.at("outputs"))
    CHECK(!read_file(ws().out(name.get<std::string>())).empty());
}

TEST_CASE("identical cluster runs are byte-identical") {
  TempDir d;
  std::string o2 = d.file("rerun");
  REQUIRE(run("cluster --graph " + ws().edges + " --outdir " + o2 + " --maxk 10").status == 0);
  CHECK(read_file(o2 + "/tree.json") == read_file(ws().out("tree.json")));
  CHECK(read_file(o2 + "/membership.tsv") == read_file(ws().out("membership.tsv")));
  CHECK(read_file(o2 + "/manifest.json") == read_file(ws().out("manifest.json")));
  CHECK(read_file(o2 + "/thresholds.txt") == read_file(ws().out("thresholds.txt")));
}

TEST_CASE("cluster rejects bad configuration and missing files") {
  TempDir d;
  CHECK(run("cluster --graph " + ws().edges + " --outdir " + d.file("x") + " --t0 0").status == 2);
  CHECK(run("cluster --graph " + d.file("absent.tsv") + " --outdir " + d.file("y")).status == 3);
}

TEST_CASE("evaluate prints one row per level") {
  RunResult r = run("evaluate --graph " + ws().edges + " --tree " + ws().out("tree.json") +
                    " --truth " + ws().macro + " --truth " + ws().micro);
  REQUIRE(r.status == 0);
  CHECK(r.output.find("level") != std::string::npos);
  CHECK(r.output.find("ARI:") != std::string::npos);
  auto manifest = nlohmann::json::parse(read_file(ws().out("manifest.json")));
  CHECK(count_lines(r.output) == manifest.at("levels").size() + 1);
}

TEST_CASE("evaluate refuses a tree from a different graph") {
  TempDir d;
  write_file(d.file("tri.tsv"), "a b\nb c\nc a\n");
  RunResult r = run("evaluate --graph " + d.file("tri.tsv") + " --tree " + ws().out("tree.json"));
  CHECK(r.status == 2);
  CHECK(r.output.find("3 nodes") != std::string::npos);
}

TEST_CASE("export re-renders a saved tree") {
  TempDir d;
  std::string tree = ws().out("tree.json");
  REQUIRE(run("export --tree " + tree + " --format dot --out " + d.file("t.dot")).status == 0);
  CHECK(read_file(d.file("t.dot")).rfind("digraph", 0) == 0);

  REQUIRE(run("export --tree " + tree + " --format membership --out " + d.file("m.tsv") +
              " --level 0").status == 0);
  std::string m = read_file(d.file("m.tsv"));
  CHECK(m.rfind("id\tlevel_0\n", 0) == 0);
  CHECK(count_lines(m) == 201);

  CHECK(run("export --tree " + tree + " --format membership --out " + d.file("z.tsv") +
            " --level 99").status == 2);
  CHECK(run("export --tree " + tree + " --format bogus --out " + d.file("z2")).status == 2);
  CHECK(run("export --tree " + tree + " --format dot --out " + d.file("z3") +
            " --level 1").status == 2);
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: test_cli <mhksc binary> [doctest flags]\n");
    return 1;
  }
  g_cli = argv[1];
  std::vector<char*> rest;
  rest.push_back(argv[0]);
  for (int i = 2; i < argc; ++i) rest.push_back(argv[i]);
  doctest::Context ctx(static_cast<int>(rest.size()), rest.data());
  return ctx.run();
}
