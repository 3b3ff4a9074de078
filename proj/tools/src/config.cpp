// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetgdt/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "hetgdt/ablation.hpp"
#include "hetgdt/num/rng.hpp"
#include "hetgdt/util/hash.hpp"

namespace hetgdt::cli {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ValidationError("config: '" + where + "' must be an object");
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw ValidationError("config: unknown key '" + where + key + "'");
}

template <class T>
void take(const json& j, const char* key, T& field, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    j.at(key).get_to(field);
  } catch (const json::exception&) {
    throw ValidationError("config: wrong type for '" + where + key + "'");
  }
}

std::string normalize_name(bool layer_norm) { return layer_norm ? "layer" : "none"; }

}  // namespace

RunConfig defaults_for_split(double split) {
  RunConfig c;
  c.split = split;
  struct Row {
    double split;
    Eigen::Index dim;
    int layers;
    double lr, decay, dropout;
    int heads;
    Eigen::Index tokens;
  };
  static constexpr Row kRows[] = {{0.1, 256, 3, 1e-3, 1e-4, 0.1, 4, 10},
                                  {0.2, 512, 2, 1e-3, 1e-5, 0.5, 1, 15},
                                  {0.4, 512, 3, 1e-4, 1e-5, 0.5, 1, 10}};
  Row row = kRows[0];
  for (const auto& r : kRows)
    if (std::abs(r.split - split) < 1e-9) row = r;
  c.encoder.hidden_dim = row.dim;
  c.encoder.layers = row.layers;
  c.encoder.dropout = row.dropout;
  c.encoder.layer_norm = true;
  c.pretrain.lr = c.prompt.lr = row.lr;
  c.pretrain.weight_decay = c.prompt.weight_decay = row.decay;
  c.prompt.heads = row.heads;
  c.prompt.tokens = row.tokens;
  c.prompt.delta = 5e-2;
  c.prompt.lambda = 1e-3;
  return c;
}

void RunConfig::validate() const {
  if (!(split > 0.0 && val_fraction > 0.0 && split + val_fraction < 1.0))
    throw ValidationError("config: split and val_fraction must be positive and sum below 1");
  if (embed_dim < 1) throw ValidationError("config: embedder dim must be >= 1");
  if (llm.max_attempts < 1 || llm.retries < 0 || llm.timeout_s < 1 || llm.parallelism < 1)
    throw ValidationError("config: bad llm settings");
  try {
    synth.validate();
    auto enc = encoder;
    enc.in_dims = {embed_dim, embed_dim, embed_dim};
    enc.validate();
    auto pre = pretrain;
    pre.encoder = enc;
    pre.validate();
    prompt.validate();
    if (embed_dim % prompt.heads != 0 || encoder.hidden_dim % prompt.heads != 0)
      throw ValidationError("config: embedder dim and hidden dim must be divisible by prompt heads");
    for (const auto& v : variants) eval::parse_variant(v);
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
}

json RunConfig::to_json() const {
  json j;
  j["seed"] = seed;
  j["split"] = split;
  j["val_fraction"] = val_fraction;
  j["out"] = out.string();
  if (graph) j["graph"] = graph->string();
  j["synth"] = synth.to_json();
  j["encoder"] = {{"hidden_dim", encoder.hidden_dim},
                  {"layers", encoder.layers},
                  {"normalize", normalize_name(encoder.layer_norm)},
                  {"dropout", encoder.dropout}};
  j["pretrain"] = {{"tau", pretrain.tau},
                   {"epochs", pretrain.epochs},
                   {"lr", pretrain.lr},
                   {"weight_decay", pretrain.weight_decay},
                   {"loss", pretrain.form == pretrain::LossForm::kLogSoftmax ? "log_softmax" : "ratio"}};
  j["prompt"] = {{"tokens", prompt.tokens},
                 {"heads", prompt.heads},
                 {"tau", prompt.tau},
                 {"delta", prompt.delta},
                 {"lambda", prompt.lambda},
                 {"epochs", prompt.epochs},
                 {"lr", prompt.lr},
                 {"weight_decay", prompt.weight_decay},
                 {"mix_after_projection", prompt.mix_after_projection}};
  j["llm"] = {{"mock", llm.mock},
              {"endpoint", llm.endpoint},
              {"model", llm.model},
              {"api_key_env", llm.api_key_env},
              {"max_attempts", llm.max_attempts},
              {"timeout_s", llm.timeout_s},
              {"retries", llm.retries},
              {"parallelism", llm.parallelism}};
  j["embedder"] = {{"dim", embed_dim}};
  j["eval"] = {{"variants", variants}};
  return j;
}

RunConfig config_from_json(const json& j, std::optional<double> split_override) {
  reject_unknown(j, {"seed", "split", "val_fraction", "out", "graph", "synth", "encoder", "pretrain",
                     "prompt", "llm", "embedder", "eval"},
                 "");
  double split = 0.1;
  take(j, "split", split, "");
  if (split_override) split = *split_override;
  RunConfig c = defaults_for_split(split);
  take(j, "seed", c.seed, "");
  take(j, "val_fraction", c.val_fraction, "");
  if (j.contains("out")) c.out = j.at("out").get<std::string>();
  if (j.contains("graph")) c.graph = j.at("graph").get<std::string>();

  if (j.contains("synth")) {
    if (j.at("synth").is_object() && j.at("synth").contains("seed"))
      throw ValidationError("config: 'synth.seed' is derived from the root 'seed'; set that instead");
    try {
      c.synth = synth::SynthConfig::from_json(j.at("synth"));
    } catch (const std::exception& e) {
      throw ValidationError(std::string("config: synth: ") + e.what());
    }
  }
  if (j.contains("encoder")) {
    const auto& e = j.at("encoder");
    reject_unknown(e, {"hidden_dim", "layers", "normalize", "dropout"}, "encoder.");
    take(e, "hidden_dim", c.encoder.hidden_dim, "encoder.");
    take(e, "layers", c.encoder.layers, "encoder.");
    take(e, "dropout", c.encoder.dropout, "encoder.");
    if (e.contains("normalize")) {
      const auto n = e.at("normalize").get<std::string>();
      if (n != "layer" && n != "none")
        throw ValidationError("config: encoder.normalize must be 'layer' or 'none'");
      c.encoder.layer_norm = n == "layer";
    }
  }
  if (j.contains("pretrain")) {
    const auto& p = j.at("pretrain");
    reject_unknown(p, {"tau", "epochs", "lr", "weight_decay", "loss"}, "pretrain.");
    take(p, "tau", c.pretrain.tau, "pretrain.");
    take(p, "epochs", c.pretrain.epochs, "pretrain.");
    take(p, "lr", c.pretrain.lr, "pretrain.");
    take(p, "weight_decay", c.pretrain.weight_decay, "pretrain.");
    if (p.contains("loss")) {
      const auto f = p.at("loss").get<std::string>();
      if (f == "log_softmax") c.pretrain.form = pretrain::LossForm::kLogSoftmax;
      else if (f == "ratio") c.pretrain.form = pretrain::LossForm::kRatio;
      else throw ValidationError("config: pretrain.loss must be 'log_softmax' or 'ratio'");
    }
  }
  if (j.contains("prompt")) {
    const auto& p = j.at("prompt");
    reject_unknown(p, {"tokens", "heads", "tau", "delta", "lambda", "epochs", "lr", "weight_decay",
                       "mix_after_projection"},
                   "prompt.");
    take(p, "tokens", c.prompt.tokens, "prompt.");
    take(p, "heads", c.prompt.heads, "prompt.");
    take(p, "tau", c.prompt.tau, "prompt.");
    take(p, "delta", c.prompt.delta, "prompt.");
    take(p, "lambda", c.prompt.lambda, "prompt.");
    take(p, "epochs", c.prompt.epochs, "prompt.");
    take(p, "lr", c.prompt.lr, "prompt.");
    take(p, "weight_decay", c.prompt.weight_decay, "prompt.");
    take(p, "mix_after_projection", c.prompt.mix_after_projection, "prompt.");
  }
  if (j.contains("llm")) {
    const auto& l = j.at("llm");
    reject_unknown(l, {"mock", "endpoint", "model", "api_key_env", "max_attempts", "timeout_s",
                       "retries", "parallelism"},
                   "llm.");
    take(l, "mock", c.llm.mock, "llm.");
    take(l, "endpoint", c.llm.endpoint, "llm.");
    take(l, "model", c.llm.model, "llm.");
    take(l, "api_key_env", c.llm.api_key_env, "llm.");
    take(l, "max_attempts", c.llm.max_attempts, "llm.");
    take(l, "timeout_s", c.llm.timeout_s, "llm.");
    take(l, "retries", c.llm.retries, "llm.");
    take(l, "parallelism", c.llm.parallelism, "llm.");
  }
  if (j.contains("embedder")) {
    reject_unknown(j.at("embedder"), {"dim"}, "embedder.");
    take(j.at("embedder"), "dim", c.embed_dim, "embedder.");
  }
  if (j.contains("eval")) {
    reject_unknown(j.at("eval"), {"variants"}, "eval.");
    take(j.at("eval"), "variants", c.variants, "eval.");
  }
  return c;
}

RunConfig resolve_config(const Overrides& o) {
  json file = json::object();
  if (o.config) {
    std::ifstream in(*o.config);
    if (!in) throw ValidationError("cannot read config file " + o.config->string());
    try {
      file = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ValidationError("config file " + o.config->string() + " is not valid JSON: " + e.what());
    }
  }
  RunConfig c = config_from_json(file, o.split);
  if (o.seed) c.seed = *o.seed;
  if (o.out) c.out = *o.out;
  if (o.graph) c.graph = *o.graph;
  if (o.mock_llm) c.llm.mock = true;
  if (o.llm_endpoint) c.llm.endpoint = *o.llm_endpoint;
  if (o.llm_model) c.llm.model = *o.llm_model;
  c.validate();
  return c;
}

std::uint64_t stage_seed(const RunConfig& c, std::string_view stage) {
  return num::derive_seed(c.seed, stage);
}

std::string stage_config_hash(const RunConfig& c, std::string_view stage) {
  const auto j = c.to_json();
  json parts;
  parts["stage"] = stage;
  parts["seed"] = stage_seed(c, stage);
  parts["embedder"] = j["embedder"];
  if (stage == "synth") {
    parts["synth"] = j["synth"];
    parts["split"] = j["split"];
    parts["val_fraction"] = j["val_fraction"];
    parts["graph"] = c.graph ? util::sha256_file(*c.graph) : "";
  } else if (stage == "pretrain") {
    parts["encoder"] = j["encoder"];
    parts["pretrain"] = j["pretrain"];
  } else if (stage == "augment") {
    parts["mock"] = c.llm.mock;
    parts["model"] = c.llm.model;
    parts["retries"] = c.llm.retries;
  } else if (stage == "tune") {
    parts["encoder"] = j["encoder"];
    parts["prompt"] = j["prompt"];
  } else if (stage == "eval") {
    parts["prompt"] = j["prompt"];
    parts["variants"] = j["eval"]["variants"];
  } else {
    throw ValidationError("unknown stage '" + std::string(stage) + "'");
  }
  return util::sha256_hex(parts.dump());
}

}  // namespace hetgdt::cli
