// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetgdt/cli/stages.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <memory>

#include "hetgdt/ablation.hpp"
#include "hetgdt/augment/augment.hpp"
#include "hetgdt/augment/embedder.hpp"
#include "hetgdt/graph_io.hpp"
#include "hetgdt/num/checkpoint.hpp"
#include "hetgdt/util/hash.hpp"
#include "hetgdt/util/log.hpp"

namespace hetgdt::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string rel(const Layout& l, const fs::path& p) {
  return fs::relative(p, l.root).generic_string();
}

void record(const Layout& l, std::map<std::string, std::string>& into, const fs::path& p) {
  into[rel(l, p)] = util::sha256_file(p);
}

std::string fmt(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), end);
}

augment::HashEmbedder make_embedder(const RunConfig& c) {
  return augment::HashEmbedder(c.embed_dim, stage_seed(c, "embedder"));
}

encoder::EncoderConfig encoder_config(const RunConfig& c) {
  auto e = c.encoder;
  e.in_dims = {c.embed_dim, c.embed_dim, c.embed_dim};
  return e;
}

prompt::PromptConfig prompt_config(const RunConfig& c) {
  auto p = c.prompt;
  p.seed = stage_seed(c, "tune");
  return p;
}

/// Original graph, augmented graph and encoder restored from a run directory.
struct Loaded {
  std::shared_ptr<const HeteroGraph> graph;
  SplitAssignment split;
  num::ParamStore encoder;
  std::optional<augment::AugmentedGraph> augmented;
  std::optional<HeteroGraph> merged;
};

Loaded load_graph(const Layout& l) {
  Loaded x;
  x.graph = std::make_shared<const HeteroGraph>(read_graph_jsonl(l.graph()));
  x.split = read_split_json(l.split());
  return x;
}

void load_encoder(const RunConfig& c, const Layout& l, Loaded& x) {
  auto ck = num::load_checkpoint(l.encoder());
  if (ck.config_hash != stage_config_hash(c, "pretrain"))
    throw ValidationError("encoder checkpoint " + l.encoder().string() +
                          " was trained under a different configuration; rerun pretrain");
  x.encoder = std::move(ck.params);
}

void load_augmented(const Layout& l, Loaded& x) {
  x.augmented = augment::read_augmented(x.graph, l.augmented());
  x.merged = x.augmented->merged();
}

void write_tune_trace(const fs::path& path, const std::vector<prompt::EpochRecord>& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "epoch,loss,val_macro_f1\n";
  for (const auto& r : trace) out << r.epoch << "," << fmt(r.loss) << "," << fmt(r.val_macro_f1) << "\n";
}

}  // namespace

void Layout::create_dirs() const {
  for (const char* d : {"graph", "pretrain", "augment", "tune", "eval", "manifests"}) fs::create_directories(root / d);
}

fs::path Layout::manifest(std::string_view stage) const {
  return root / "manifests" / (std::string(stage) + ".json");
}

json Manifest::to_json() const {
  return {{"stage", stage}, {"config_hash", config_hash}, {"seed", seed}, {"inputs", inputs},
          {"outputs", outputs}};
}

Manifest Manifest::from_json(const json& j) {
  Manifest m;
  j.at("stage").get_to(m.stage);
  j.at("config_hash").get_to(m.config_hash);
  j.at("seed").get_to(m.seed);
  j.at("inputs").get_to(m.inputs);
  j.at("outputs").get_to(m.outputs);
  return m;
}

void write_manifest(const Layout& layout, const Manifest& m) {
  const auto path = layout.manifest(m.stage);
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << m.to_json().dump(2) << "\n";
}

Manifest read_manifest(const Layout& layout, std::string_view stage) {
  const auto path = layout.manifest(stage);
  std::ifstream in(path);
  if (!in) throw ValidationError("no manifest for stage '" + std::string(stage) + "' in " + layout.root.string());
  try {
    return Manifest::from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw ValidationError("corrupt manifest " + path.string() + ": " + e.what());
  }
}

Manifest require_stage(const Layout& layout, std::string_view upstream, std::string_view consumer) {
  if (!fs::exists(layout.manifest(upstream)))
    throw ValidationError(std::string(consumer) + " needs the output of '" + std::string(upstream) +
                          "', which has not run in " + layout.root.string() + "; run `hetgdt " +
                          std::string(upstream) + "` first");
  Manifest m = read_manifest(layout, upstream);
  for (const auto& [file, hash] : m.outputs) {
    const auto path = layout.root / file;
    if (!fs::exists(path))
      throw ValidationError("stale input: " + path.string() + " written by '" + std::string(upstream) +
                            "' is missing; rerun " + std::string(upstream));
    if (util::sha256_file(path) != hash)
      throw ValidationError("stale input: " + path.string() + " changed after '" + std::string(upstream) +
                            "' recorded it; rerun " + std::string(upstream) + " and the stages after it");
  }
  return m;
}

int guarded(std::string_view stage, const std::function<void()>& body) {
  try {
    body();
    return kExitOk;
  } catch (const ValidationError& e) {
    std::cerr << "hetgdt " << stage << ": " << e.what() << "\n";
    return kExitValidation;
  } catch (const augment::LlmError& e) {
    std::cerr << "hetgdt " << stage << ": " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "hetgdt " << stage << ": " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_synth(const RunConfig& c) {
  return guarded("synth", [&] {
    const Layout l{c.out};
    l.create_dirs();
    HeteroGraph g;
    Manifest m{"synth", stage_config_hash(c, "synth"), stage_seed(c, "synth"), {}, {}};
    if (c.graph) {
      g = read_graph_jsonl(*c.graph);
      m.inputs[c.graph->generic_string()] = util::sha256_file(*c.graph);
    } else {
      auto sc = c.synth;
      sc.seed = stage_seed(c, "synth");
      g = synth::generate(sc);
    }
    synth::write_synthetic(g, l.graph().parent_path());
    write_split_json(stratified_split(g, c.split, c.val_fraction, stage_seed(c, "split")), l.split());
    for (const auto& p : {l.graph(), l.labels(), l.stats(), l.split()}) record(l, m.outputs, p);
    write_manifest(l, m);
    const auto st = synth::stats(g);
    util::log_info("synth: " + std::to_string(st.users) + " users, " + std::to_string(st.participants) +
                   " participants, CIR " + fmt(st.cir));
  });
}

int cmd_pretrain(const RunConfig& c) {
  return guarded("pretrain", [&] {
    const Layout l{c.out};
    l.create_dirs();
    const auto up = require_stage(l, "synth", "pretrain");
    auto x = load_graph(l);
    auto pc = c.pretrain;
    pc.encoder = encoder_config(c);
    pc.seed = stage_seed(c, "pretrain");
    const auto features = augment::embed_graph(*x.graph, make_embedder(c));
    const auto every = std::max(1, pc.epochs / 10);
    auto result = pretrain::run_pretrain(*x.graph, features, pc, [&](int e, double loss) {
      if (e % every == 0) util::log_info("pretrain epoch " + std::to_string(e) + " loss " + fmt(loss));
    });
    const auto hash = stage_config_hash(c, "pretrain");
    num::save_checkpoint(l.encoder(), result.params, hash, c.to_json()["encoder"]);
    pretrain::write_loss_trace(l.pretrain_trace(), result.loss_trace);
    Manifest m{"pretrain", hash, pc.seed, up.outputs, {}};
    for (const auto& p : {num::manifest_path(l.encoder()), num::data_path(l.encoder()), l.pretrain_trace()})
      record(l, m.outputs, p);
    write_manifest(l, m);
  });
}

int cmd_augment(const RunConfig& c) {
  return guarded("augment", [&] {
    const Layout l{c.out};
    l.create_dirs();
    const auto up = require_stage(l, "synth", "augment");
    auto x = load_graph(l);
    std::shared_ptr<augment::LlmClient> inner;
    augment::AugmentOptions opts;
    opts.parallelism = c.llm.parallelism;
    opts.generation.retries = c.llm.retries;
    opts.partial_path = l.partial();
    if (c.llm.mock) {
      inner = std::make_shared<augment::MockLlmClient>();
      opts.generation.model = "mock";
    } else {
      if (c.llm.endpoint.empty() || c.llm.model.empty())
        throw ValidationError("no LLM configured: pass --llm-endpoint and --llm-model, or --mock-llm");
      augment::HttpClientConfig hc;
      hc.endpoint = c.llm.endpoint;
      hc.model = c.llm.model;
      hc.api_key_env = c.llm.api_key_env;
      hc.max_attempts = c.llm.max_attempts;
      hc.timeout = std::chrono::seconds(c.llm.timeout_s);
      try {
        inner = std::make_shared<augment::HttpChatClient>(hc);
      } catch (const augment::LlmError& e) {
        throw ValidationError(std::string(e.what()) + " (or pass --mock-llm)");
      }
      opts.generation.model = c.llm.model;
    }
    augment::CachingClient client(inner, l.cache());
    const auto ag = augment::augment_graph(x.graph, x.split, client, make_embedder(c), opts);
    augment::write_augmented(ag, l.augmented());
    util::log_info("augment: " + std::to_string(ag.records.size()) + " synthetic users, " +
                   std::to_string(client.endpoint_calls()) + " endpoint calls");
    Manifest m{"augment", stage_config_hash(c, "augment"), stage_seed(c, "augment"), up.outputs, {}};
    record(l, m.outputs, l.augmented());
    write_manifest(l, m);
  });
}

int cmd_tune(const RunConfig& c) {
  return guarded("tune", [&] {
    const Layout l{c.out};
    l.create_dirs();
    auto inputs = require_stage(l, "pretrain", "tune").outputs;
    for (const auto& [k, v] : require_stage(l, "augment", "tune").outputs) inputs[k] = v;
    auto x = load_graph(l);
    load_encoder(c, l, x);
    load_augmented(l, x);
    const auto pc = prompt_config(c);
    const auto data = prompt::make_tune_data(*x.merged, augment::embed_graph(*x.merged, make_embedder(c)), x.split);
    const auto every = std::max(1, pc.epochs / 10);
    auto result = prompt::run_prompt_tune(x.encoder, encoder_config(c), data, pc, [&](const prompt::EpochRecord& r) {
      if (r.epoch % every == 0)
        util::log_info("tune epoch " + std::to_string(r.epoch) + " loss " + fmt(r.loss) + " val macro-F1 " +
                       fmt(r.val_macro_f1));
    });
    const auto encoder_hash = stage_config_hash(c, "pretrain");
    num::save_checkpoint(l.prompt(), result.params, encoder_hash,
                         {{"prompt", c.to_json()["prompt"]},
                          {"tune_config_hash", stage_config_hash(c, "tune")},
                          {"best_epoch", result.best_epoch}});
    write_tune_trace(l.tune_trace(), result.trace);
    Manifest m{"tune", stage_config_hash(c, "tune"), pc.seed, inputs, {}};
    for (const auto& p : {num::manifest_path(l.prompt()), num::data_path(l.prompt()), l.tune_trace()})
      record(l, m.outputs, p);
    write_manifest(l, m);
  });
}

int cmd_eval(const RunConfig& c) {
  return guarded("eval", [&] {
    const Layout l{c.out};
    l.create_dirs();
    auto inputs = require_stage(l, "tune", "eval").outputs;
    for (const auto& [k, v] : require_stage(l, "pretrain", "eval").outputs) inputs[k] = v;
    for (const auto& [k, v] : require_stage(l, "augment", "eval").outputs) inputs[k] = v;
    auto x = load_graph(l);
    load_encoder(c, l, x);
    load_augmented(l, x);
    auto ck = num::load_checkpoint(l.prompt());
    if (ck.config_hash != stage_config_hash(c, "pretrain"))
      throw ValidationError("prompt state " + l.prompt().string() +
                            " extends a different encoder configuration; rerun tune");
    if (ck.extra.value("tune_config_hash", "") != stage_config_hash(c, "tune"))
      throw ValidationError("prompt state was tuned under a different configuration; rerun tune");

    const auto embedder = make_embedder(c);
    const auto enc = encoder_config(c);
    const auto pc = prompt_config(c);
    eval::PipelineInputs in;
    in.original = x.graph.get();
    in.augmented = &*x.merged;
    in.original_features = augment::embed_graph(*x.graph, embedder);
    in.augmented_features = augment::embed_graph(*x.merged, embedder);
    in.split = x.split;
    in.encoder = &x.encoder;
    in.encoder_config = enc;
    in.prompt = pc;
    in.seed = c.seed;

    std::vector<eval::ReportRow> rows;
    for (const auto& name : c.variants) {
      const auto v = eval::parse_variant(name);
      if (v == eval::Variant::kFull) {
        const auto data = prompt::make_tune_data(*x.merged, in.augmented_features, x.split);
        const auto pred = prompt::predict_all(x.encoder, enc, ck.params, pc, data);
        rows.push_back({"full", c.seed, "test", eval::score_ids(*x.merged, x.split.test, pred)});
        rows.push_back({"full", c.seed, "val", eval::score_ids(*x.merged, x.split.val, pred)});
      } else {
        const auto o = eval::run_ablation(v, in);
        rows.push_back(o.test);
        rows.push_back(o.val);
      }
      util::log_info("eval " + name + ": test macro-F1 " + fmt(rows[rows.size() - 2].metrics.macro_f1));
    }
    eval::write_report(l.report(), rows);
    Manifest m{"eval", stage_config_hash(c, "eval"), stage_seed(c, "eval"), inputs, {}};
    record(l, m.outputs, l.report());
    write_manifest(l, m);
  });
}

int cmd_pipeline(const RunConfig& c) {
  for (auto* stage : {&cmd_synth, &cmd_pretrain, &cmd_augment, &cmd_tune, &cmd_eval}) {
    const int rc = stage(c);
    if (rc != kExitOk) return rc;
  }
  return kExitOk;
}

}  // namespace hetgdt::cli
