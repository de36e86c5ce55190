#include <algorithm>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "mhksc/common.hpp"
#include "mhksc/hierarchy.hpp"

namespace mhksc {

namespace {

using json = nlohmann::ordered_json;

void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io, "cannot write '" + path + "'");
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) fail(errc::io, "write error on '" + path + "'");
}

}  // namespace

void save_tree(const ClusterTree& t, const std::string& path) {
  validate_tree(t);
  json doc;
  doc["format"] = "mhksc-tree";
  doc["version"] = 1;
  doc["n_items"] = t.n_items;
  doc["item_ids"] = t.item_ids;
  if (t.item_labels.empty())
    doc["item_labels"] = nullptr;
  else if (t.item_labels.size() == t.n_items)
    doc["item_labels"] = t.item_labels;
  else
    fail(errc::invalid, "item label list does not match the item count");
  doc["levels"] = json::array();
  for (const auto& level : t.levels) {
    json jl;
    jl["threshold"] = level.threshold;
    jl["k"] = level.k;
    jl["assign"] = level.assign;
    if (level.children.empty())
      jl["children"] = nullptr;
    else
      jl["children"] = level.children;
    doc["levels"].push_back(std::move(jl));
  }
  write_text(path, doc.dump(1) + "\n");
}

ClusterTree load_tree(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io, "cannot open tree '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    fail(errc::io, "'" + path + "' is not valid tree JSON: " + e.what());
  }

  ClusterTree t;
  try {
    if (doc.at("format").get<std::string>() != "mhksc-tree" || doc.at("version").get<int>() != 1)
      fail(errc::io, "'" + path + "' is not a version-1 tree file");
    t.n_items = doc.at("n_items").get<uint32_t>();
    t.item_ids = doc.at("item_ids").get<std::vector<uint32_t>>();
    if (!doc.at("item_labels").is_null())
      t.item_labels = doc.at("item_labels").get<std::vector<std::string>>();
    for (const auto& jl : doc.at("levels")) {
      ClusterTree::Level level;
      level.threshold = jl.at("threshold").get<double>();
      level.k = jl.at("k").get<uint32_t>();
      level.assign = jl.at("assign").get<std::vector<uint32_t>>();
      if (!jl.at("children").is_null())
        level.children = jl.at("children").get<std::vector<std::vector<uint32_t>>>();
      t.levels.push_back(std::move(level));
    }
  } catch (const json::exception& e) {
    fail(errc::io, "tree file '" + path + "' has a malformed field: " + e.what());
  }
  if (!t.item_labels.empty() && t.item_labels.size() != t.n_items)
    fail(errc::io, "tree file '" + path + "' label list size mismatch");
  validate_tree(t);
  return t;
}

void export_tree_dot(const ClusterTree& t, const std::string& path) {
  validate_tree(t);
  std::string body;
  body += "digraph hierarchy {\n";
  body += "  rankdir=BT;\n";
  body += "  node [shape=box];\n";
  std::vector<std::vector<uint32_t>> sizes(t.levels.size());
  for (size_t l = 0; l < t.levels.size(); ++l) {
    sizes[l].assign(t.levels[l].k, 0);
    for (uint32_t c : t.levels[l].assign) ++sizes[l][c];
  }
  for (size_t l = 0; l < t.levels.size(); ++l)
    for (uint32_t c = 0; c < t.levels[l].k; ++c) {
      body += "  \"L" + std::to_string(l) + "_C" + std::to_string(c) + "\" [label=\"level " +
              std::to_string(l) + " cluster " + std::to_string(c) + "\\n" +
              std::to_string(sizes[l][c]) + " items\"];\n";
    }
  for (size_t l = 1; l < t.levels.size(); ++l)
    for (uint32_t c = 0; c < t.levels[l].k; ++c)
      for (uint32_t child : t.levels[l].children[c])
        body += "  \"L" + std::to_string(l - 1) + "_C" + std::to_string(child) + "\" -> \"L" +
                std::to_string(l) + "_C" + std::to_string(c) + "\";\n";
  body += "}\n";
  write_text(path, body);
}

void export_membership_matrix(const ClusterTree& t, const std::string& path,
                              uint32_t only_level) {
  validate_tree(t);
  auto n_levels = static_cast<uint32_t>(t.levels.size());
  if (only_level != ~uint32_t{0} && only_level >= n_levels)
    fail(errc::invalid, "level " + std::to_string(only_level) + " out of range (tree has " +
                            std::to_string(n_levels) + " levels)");

  // Sorting rows by the coarsest-to-finest cluster path makes every cluster a
  // contiguous row range at every level.
  std::vector<uint32_t> order(t.n_items);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    for (size_t l = t.levels.size(); l-- > 0;) {
      if (t.levels[l].assign[a] != t.levels[l].assign[b])
        return t.levels[l].assign[a] < t.levels[l].assign[b];
    }
    return a < b;
  });

  std::string body = "id";
  if (only_level == ~uint32_t{0}) {
    for (uint32_t l = 0; l < n_levels; ++l) body += "\tlevel_" + std::to_string(l);
  } else {
    body += "\tlevel_" + std::to_string(only_level);
  }
  body += '\n';
  for (uint32_t row : order) {
    body += t.item_labels.empty() ? std::to_string(t.item_ids[row]) : t.item_labels[row];
    if (only_level == ~uint32_t{0}) {
      for (uint32_t l = 0; l < n_levels; ++l)
        body += '\t' + std::to_string(t.levels[l].assign[row]);
    } else {
      body += '\t' + std::to_string(t.levels[only_level].assign[row]);
    }
    body += '\n';
  }
  write_text(path, body);
}

}  // namespace mhksc
