// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "hetgdt/augment/augment.hpp"
#include "hetgdt/util/log.hpp"

namespace hetgdt::augment {

namespace {

using nlohmann::json;

Exchange exchange_of(std::string task, const LlmRequest& req, const LlmResponse& resp) {
  return {std::move(task), prompt_hash(req), req.system, req.user, resp.text};
}

LlmRequest request_of(const RenderedPrompt& p, const GenerationOptions& opts, bool reminder,
                      std::string_view reminder_text) {
  LlmRequest r;
  r.model = opts.model;
  r.system = p.instruction;
  r.user = p.context;
  if (reminder) r.user += "\n\n" + std::string(reminder_text);
  r.temperature = 0.0;
  r.max_tokens = opts.max_tokens;
  return r;
}

std::string edge_task(NodeType t) { return "edge:" + std::string(to_string(t)); }

Relation relation_for(NodeType t) {
  switch (t) {
    case NodeType::kTweet: return Relation::kR2;
    case NodeType::kKeyword: return Relation::kR4;
    case NodeType::kUser: return Relation::kR1;
  }
  return Relation::kR1;
}

AugmentationRecord augment_one(const HeteroGraph& g, const std::string& origin, LlmClient& client,
                               const TextEmbedder& embedder, const GenerationOptions& opts) {
  AugmentationRecord rec;
  rec.origin = origin;
  rec.id = synthetic_id(origin);
  const UserText original = parse_user_text(g.node(origin).text, origin);
  auto gen = generate_synthetic_user(client, original, origin, opts);
  rec.text = gen.text;
  rec.provenance = std::move(gen.exchanges);
  rec.embedding = encode_text(embedder, format_user_text(rec.text));
  for (auto t : {NodeType::kTweet, NodeType::kKeyword, NodeType::kUser}) {
    const auto ids = typed_neighbors(g, origin, t);
    if (ids.empty()) continue;
    std::vector<std::string> texts;
    texts.reserve(ids.size());
    for (const auto& id : ids) texts.push_back(g.node(id).text);
    auto sel = select_edges(client, original, rec.text, t, texts, origin, opts);
    for (auto i : sel.indices) rec.edges.push_back({ids[i - 1], relation_for(t)});
    for (auto& e : sel.exchanges) rec.provenance.push_back(std::move(e));
  }
  return rec;
}

json record_to_json(const AugmentationRecord& r) {
  json edges = json::array();
  for (const auto& e : r.edges) edges.push_back({{"dst", e.neighbor}, {"rel", to_string(e.rel)}});
  json prov = json::array();
  for (const auto& x : r.provenance)
    prov.push_back({{"task", x.task},
                    {"prompt_hash", x.prompt_hash},
                    {"instruction", x.instruction},
                    {"context", x.context},
                    {"response", x.response}});
  std::vector<double> emb(r.embedding.data(), r.embedding.data() + r.embedding.size());
  return {{"kind", "synthetic"},
          {"origin", r.origin},
          {"id", r.id},
          {"username", r.text.username},
          {"user_id", r.text.user_id},
          {"profile", r.text.profile},
          {"embedding", emb},
          {"edges", edges},
          {"provenance", prov}};
}

AugmentationRecord record_from_json(const json& j) {
  AugmentationRecord r;
  r.origin = j.at("origin").get<std::string>();
  r.id = j.at("id").get<std::string>();
  r.text = UserText::make(j.at("username").get<std::string>(), j.at("user_id").get<std::string>(),
                          j.at("profile").get<std::string>());
  auto emb = j.at("embedding").get<std::vector<double>>();
  r.embedding = Eigen::Map<Eigen::RowVectorXd>(emb.data(), static_cast<Eigen::Index>(emb.size()));
  for (const auto& e : j.at("edges"))
    r.edges.push_back({e.at("dst").get<std::string>(), parse_relation(e.at("rel").get<std::string>())});
  for (const auto& x : j.at("provenance"))
    r.provenance.push_back({x.at("task").get<std::string>(), x.at("prompt_hash").get<std::string>(),
                            x.at("instruction").get<std::string>(),
                            x.at("context").get<std::string>(), x.at("response").get<std::string>()});
  return r;
}

std::vector<AugmentationRecord> read_records(std::istream& in, std::size_t* cursor) {
  std::vector<AugmentationRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      auto j = json::parse(line);
      const auto kind = j.at("kind").get<std::string>();
      if (kind == "header") {
        if (cursor != nullptr) *cursor = j.value("cursor", std::size_t{0});
      } else if (kind == "synthetic") {
        out.push_back(record_from_json(j));
      } else {
        throw AugmentError("unknown record kind '" + kind + "'");
      }
    } catch (const json::exception& e) {
      throw AugmentError("augmented graph line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_partial(const std::filesystem::path& path, const std::vector<AugmentationRecord>& done,
                   std::size_t cursor, std::size_t total) {
  std::ofstream f(path, std::ios::trunc);
  f << json{{"kind", "header"}, {"partial", true}, {"cursor", cursor}, {"total", total}}.dump() << '\n';
  for (const auto& r : done) f << record_to_json(r).dump() << '\n';
}

}  // namespace

std::string synthetic_id(std::string_view origin) { return "syn:" + std::string(origin); }

GeneratedUser generate_synthetic_user(LlmClient& client, const UserText& original,
                                      const std::string& node_id, const GenerationOptions& opts) {
  const auto prompt = render_node_prompt(original);
  GeneratedUser out;
  for (int attempt = 0; attempt < std::max(1, opts.retries); ++attempt) {
    const auto req = request_of(prompt, opts, attempt > 0, kNodeFormatReminder);
    const auto resp = client.complete(req);
    out.exchanges.push_back(exchange_of("node", req, resp));
    try {
      if (auto parsed = parse_user_response(resp.text)) {
        out.text = std::move(*parsed);
        return out;
      }
    } catch (const AugmentError&) {
      // empty field after trimming: treated like any other malformed reply
    }
    util::log_warn("unparseable synthetic user for " + node_id + " (attempt " +
                   std::to_string(attempt + 1) + ")");
  }
  throw AugmentError("synthetic user generation for node " + node_id + " failed after " +
                     std::to_string(std::max(1, opts.retries)) + " attempts");
}

SelectedEdges select_edges(LlmClient& client, const UserText& original, const UserText& synthetic,
                           NodeType neighbor_type, const std::vector<std::string>& neighbor_texts,
                           const std::string& node_id, const GenerationOptions& opts) {
  if (neighbor_texts.empty()) throw AugmentError("select_edges needs at least one candidate");
  const auto prompt = render_edge_prompt(original, neighbor_type, neighbor_texts, synthetic);
  SelectedEdges out;
  for (int attempt = 0; attempt < std::max(1, opts.retries); ++attempt) {
    const auto req = request_of(prompt, opts, attempt > 0, kEdgeFormatReminder);
    const auto resp = client.complete(req);
    out.exchanges.push_back(exchange_of(edge_task(neighbor_type), req, resp));
    if (auto sel = parse_selection(resp.text, neighbor_texts.size())) {
      for (auto bad : sel->dropped)
        util::log_warn("dropping out-of-range neighbor " + std::to_string(bad) + " (of " +
                       std::to_string(neighbor_texts.size()) + ") for " + node_id);
      out.indices = std::move(sel->indices);
      return out;
    }
    util::log_warn("unparseable neighbor selection for " + node_id + " (attempt " +
                   std::to_string(attempt + 1) + ")");
  }
  throw AugmentError("edge selection for node " + node_id + " failed after " +
                     std::to_string(std::max(1, opts.retries)) + " attempts");
}

HeteroGraph AugmentedGraph::merged() const {
  std::vector<NodeRecord> nodes = base->nodes();
  std::vector<EdgeRecord> edges = base->edges();
  std::map<std::string, Label> labels = base->labels();
  for (const auto& r : records) {
    nodes.push_back({r.id, NodeType::kUser, format_user_text(r.text)});
    labels[r.id] = Label::kParticipant;
    for (const auto& e : r.edges) edges.push_back({r.id, e.neighbor, e.rel});
  }
  return build_graph(std::move(nodes), std::move(edges), std::move(labels));
}

AugmentedGraph augment_graph(std::shared_ptr<const HeteroGraph> g, const SplitAssignment& split,
                             LlmClient& client, const TextEmbedder& embedder,
                             const AugmentOptions& opts) {
  std::vector<std::string> origins;
  for (const auto& id : split.train)
    if (g->label(id) == Label::kParticipant) origins.push_back(id);
  std::sort(origins.begin(), origins.end());

  std::vector<std::optional<AugmentationRecord>> slots(origins.size());
  if (opts.partial_path && std::filesystem::exists(*opts.partial_path)) {
    std::ifstream in(*opts.partial_path);
    for (auto& r : read_records(in, nullptr)) {
      auto it = std::lower_bound(origins.begin(), origins.end(), r.origin);
      if (it != origins.end() && *it == r.origin)
        slots[static_cast<std::size_t>(it - origins.begin())] = std::move(r);
    }
  }

  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::optional<std::size_t> first_failure;
  std::string failure_message;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next++;
      if (i >= origins.size()) return;
      if (slots[i]) continue;
      try {
        slots[i] = augment_one(*g, origins[i], client, embedder, opts.generation);
      } catch (const std::exception& e) {
        std::lock_guard lock(err_mu);
        if (!first_failure || i < *first_failure) {
          first_failure = i;
          failure_message = e.what();
        }
      }
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(opts.parallelism, origins.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  if (first_failure) {
    if (opts.partial_path) {
      std::vector<AugmentationRecord> done;
      for (auto& s : slots)
        if (s) done.push_back(*s);
      write_partial(*opts.partial_path, done, *first_failure, origins.size());
    }
    throw AugmentError("augmentation stopped at origin " + origins[*first_failure] + ": " +
                       failure_message);
  }
  if (opts.partial_path) std::filesystem::remove(*opts.partial_path);

  AugmentedGraph out;
  out.base = std::move(g);
  out.records.reserve(slots.size());
  for (auto& s : slots) out.records.push_back(std::move(*s));
  return out;
}

void write_augmented(const AugmentedGraph& ag, std::ostream& out) {
  out << json{{"kind", "header"}, {"synthetic_nodes", ag.records.size()}}.dump() << '\n';
  for (const auto& r : ag.records) out << record_to_json(r).dump() << '\n';
}

void write_augmented(const AugmentedGraph& ag, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw AugmentError("cannot write " + path.string());
  write_augmented(ag, f);
}

AugmentedGraph read_augmented(std::shared_ptr<const HeteroGraph> base, std::istream& in) {
  AugmentedGraph ag;
  ag.records = read_records(in, nullptr);
  for (const auto& r : ag.records) {
    if (!base->contains(r.origin) || base->node(r.origin).type != NodeType::kUser)
      throw AugmentError("synthetic node " + r.id + " names unknown origin " + r.origin);
    for (const auto& e : r.edges)
      if (!base->contains(e.neighbor))
        throw AugmentError("synthetic node " + r.id + " links unknown node " + e.neighbor);
  }
  ag.base = std::move(base);
  return ag;
}

AugmentedGraph read_augmented(std::shared_ptr<const HeteroGraph> base,
                              const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw AugmentError("cannot read " + path.string());
  return read_augmented(std::move(base), f);
}

}  // namespace hetgdt::augment
