// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetgdt/graph_io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

namespace hetgdt {

using nlohmann::json;

void write_graph_jsonl(const HeteroGraph& g, std::ostream& out) {
  for (const auto& n : g.nodes()) {
    json j = {{"kind", "node"}, {"id", n.id}, {"type", to_string(n.type)}, {"text", n.text}};
    if (auto l = g.label(n.id)) j["label"] = to_string(*l);
    out << j.dump() << '\n';
  }
  for (const auto& e : g.edges()) {
    json j = {{"kind", "edge"}, {"src", e.src}, {"dst", e.dst}, {"rel", to_string(e.rel)}};
    out << j.dump() << '\n';
  }
}

void write_graph_jsonl(const HeteroGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_graph_jsonl(g, out);
}

HeteroGraph read_graph_jsonl(std::istream& in) {
  std::vector<NodeRecord> nodes;
  std::vector<EdgeRecord> edges;
  std::map<std::string, Label> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
      const auto kind = j.at("kind").get<std::string>();
      if (kind == "node") {
        NodeRecord n{j.at("id").get<std::string>(),
                     parse_node_type(j.at("type").get<std::string>()),
                     j.value("text", std::string{})};
        if (j.contains("label")) labels[n.id] = parse_label(j.at("label").get<std::string>());
        nodes.push_back(std::move(n));
      } else if (kind == "edge") {
        edges.push_back({j.at("src").get<std::string>(), j.at("dst").get<std::string>(),
                         parse_relation(j.at("rel").get<std::string>())});
      } else {
        throw GraphError("unknown kind '" + kind + "'");
      }
    } catch (const json::exception& e) {
      throw GraphError("graph line " + std::to_string(lineno) + ": " + e.what());
    } catch (const GraphError& e) {
      throw GraphError("graph line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return build_graph(std::move(nodes), std::move(edges), std::move(labels));
}

HeteroGraph read_graph_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GraphError("cannot read " + path.string());
  return read_graph_jsonl(in);
}

void write_labels_csv(const HeteroGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "id,label\n";
  for (const auto& [id, l] : g.labels()) out << id << ',' << to_string(l) << '\n';
}

void write_split_json(const SplitAssignment& split, const std::filesystem::path& path) {
  json j = {{"train_frac", split.train_frac}, {"val_frac", split.val_frac},
            {"seed", split.seed},             {"train", split.train},
            {"val", split.val},               {"test", split.test}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(1) << '\n';
}

SplitAssignment read_split_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GraphError("cannot read " + path.string());
  const json j = json::parse(in);
  SplitAssignment s;
  s.train_frac = j.at("train_frac").get<double>();
  s.val_frac = j.at("val_frac").get<double>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.train = j.at("train").get<std::vector<std::string>>();
  s.val = j.at("val").get<std::vector<std::string>>();
  s.test = j.at("test").get<std::vector<std::string>>();
  return s;
}

}  // namespace hetgdt
