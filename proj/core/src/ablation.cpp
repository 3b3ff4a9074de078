// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetgdt/ablation.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hetgdt/num/adam.hpp"
#include "hetgdt/num/init.hpp"
#include "hetgdt/num/ops.hpp"
#include "hetgdt/num/rng.hpp"

namespace hetgdt::eval {

using num::Matrix;
using num::Var;

namespace {

constexpr std::array<Variant, 7> kVariants = {Variant::kFull, Variant::kA1,    Variant::kA2,
                                              Variant::kA3,   Variant::kA4,    Variant::kNoAug,
                                              Variant::kSupervised};

std::vector<std::size_t> rows_of(const HeteroGraph& g, const std::vector<std::string>& ids) {
  std::vector<std::size_t> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(g.index_of(id).index);
  return out;
}

std::vector<Label> labels_of(const HeteroGraph& g, const std::vector<std::string>& ids) {
  std::vector<Label> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    auto l = g.label(id);
    if (!l) throw std::invalid_argument("unlabeled node in split: " + id);
    out.push_back(*l);
  }
  return out;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw std::runtime_error("cannot format metric");
  return std::string(buf.data(), end);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size())
    throw std::invalid_argument("report: bad number '" + s + "'");
  return v;
}

}  // namespace

std::span<const Variant> all_variants() { return kVariants; }

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kFull: return "full";
    case Variant::kA1: return "A1";
    case Variant::kA2: return "A2";
    case Variant::kA3: return "A3";
    case Variant::kA4: return "A4";
    case Variant::kNoAug: return "no-aug";
    case Variant::kSupervised: return "supervised";
  }
  throw std::invalid_argument("unknown variant");
}

Variant parse_variant(std::string_view name) {
  for (auto v : kVariants)
    if (to_string(v) == name) return v;
  throw std::invalid_argument("unknown variant '" + std::string(name) +
                              "' (expected full, A1, A2, A3, A4, no-aug or supervised)");
}

prompt::PromptConfig variant_config(Variant v, const prompt::PromptConfig& full) {
  auto c = full;
  switch (v) {
    case Variant::kFull:
    case Variant::kNoAug:
    case Variant::kSupervised:
      break;
    case Variant::kA1:
      c.node_prompt = false;
      c.structure_prompt = false;
      c.projection = false;
      c.head = prompt::Head::kLinear;
      break;
    case Variant::kA2:
      c.head = prompt::Head::kLinear;
      break;
    case Variant::kA3:
      c.node_prompt = false;
      break;
    case Variant::kA4:
      c.structure_prompt = false;
      break;
  }
  return c;
}

Metrics score_ids(const HeteroGraph& g, const std::vector<std::string>& ids,
                  const std::vector<Label>& predictions) {
  std::vector<int> y, p;
  y.reserve(ids.size());
  p.reserve(ids.size());
  for (const auto& id : ids) {
    auto l = g.label(id);
    if (!l) throw std::invalid_argument("unlabeled node in split: " + id);
    y.push_back(static_cast<int>(*l));
    p.push_back(static_cast<int>(predictions.at(g.index_of(id).index)));
  }
  return compute_metrics(y, p);
}

std::vector<Label> run_supervised(const HeteroGraph& g, const encoder::TypeFeatures& features,
                                  const SplitAssignment& split, const encoder::EncoderConfig& enc,
                                  const prompt::PromptConfig& cfg,
                                  std::vector<prompt::EpochRecord>* trace) {
  const Matrix& x = features[0];
  const auto d = enc.hidden_dim;
  num::ParamStore store;
  auto init = [&](const std::string& name, Eigen::Index r, Eigen::Index c, num::InitScheme s) {
    store.add(name, num::init_params(r, c, s, num::derive_seed(cfg.seed, name)));
  };
  init("sup.W1", x.cols(), d, num::InitScheme::kXavierUniform);
  init("sup.b1", 1, d, num::InitScheme::kZeros);
  init("sup.W2", d, 2, num::InitScheme::kXavierUniform);
  init("sup.b2", 1, 2, num::InitScheme::kZeros);

  const auto train_rows = rows_of(g, split.train);
  std::vector<int> targets;
  for (auto l : labels_of(g, split.train)) targets.push_back(prompt::prototype_row(l));
  const auto val_y = labels_of(g, split.val);
  const auto val_rows = rows_of(g, split.val);

  auto logits_of = [&](num::Tape& tape) {
    num::Binder p(tape, store, true);
    const Var h = num::tanh(num::add_bias(num::matmul(tape.constant(x), p("sup.W1")), p("sup.b1")));
    return num::add_bias(num::matmul(h, p("sup.W2")), p("sup.b2"));
  };
  auto decide = [](const Matrix& logits, Eigen::Index r) {
    return logits(r, prompt::kParticipantRow) >= logits(r, prompt::kBenignRow) ? Label::kParticipant
                                                                               : Label::kBenign;
  };

  num::OptimizerState opt;
  opt.config.lr = cfg.lr;
  opt.config.weight_decay = cfg.weight_decay;
  auto params = store.all();
  double best = -1.0;
  num::ParamStore best_state = store.clone();
  for (int epoch = 0; epoch <= cfg.epochs; ++epoch) {
    num::Tape tape;
    const Var logits = logits_of(tape);
    const Var loss = num::cross_entropy(num::gather_rows(logits, train_rows), targets);
    std::vector<int> vy, vp;
    for (std::size_t i = 0; i < val_rows.size(); ++i) {
      vy.push_back(static_cast<int>(val_y[i]));
      vp.push_back(static_cast<int>(decide(logits.value(), static_cast<Eigen::Index>(val_rows[i]))));
    }
    const double f1 = vy.empty() ? 0.0 : macro_f1(vy, vp);
    if (trace != nullptr) trace->push_back({epoch, loss.scalar(), f1});
    if (f1 > best) {
      best = f1;
      best_state = store.clone();
    }
    if (epoch == cfg.epochs) break;
    store.zero_grad();
    tape.backward(loss);
    num::adam_step(params, opt);
  }
  store.assign_values(best_state);
  num::Tape tape;
  const Var logits = logits_of(tape);
  std::vector<Label> out(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) out[static_cast<std::size_t>(i)] = decide(logits.value(), i);
  return out;
}

AblationOutcome run_ablation(Variant v, const PipelineInputs& in) {
  if (in.original == nullptr || in.encoder == nullptr)
    throw std::invalid_argument("run_ablation: missing graph or encoder");
  AblationOutcome out;
  const std::string name(to_string(v));
  const HeteroGraph* g = nullptr;
  std::vector<Label> pred;
  if (v == Variant::kSupervised) {
    g = in.original;
    pred = run_supervised(*g, in.original_features, in.split, in.encoder_config, in.prompt, &out.trace);
  } else {
    const bool use_aug = v != Variant::kNoAug;
    if (use_aug && in.augmented == nullptr) throw std::invalid_argument("run_ablation: missing augmented graph");
    g = use_aug ? in.augmented : in.original;
    const auto cfg = variant_config(v, in.prompt);
    const auto data = prompt::make_tune_data(
        *g, use_aug ? in.augmented_features : in.original_features, in.split);
    auto result = prompt::run_prompt_tune(*in.encoder, in.encoder_config, data, cfg);
    out.trace = std::move(result.trace);
    pred = prompt::decide_all(result.best_logits);
  }
  out.test = {name, in.seed, "test", score_ids(*g, in.split.test, pred)};
  out.val = {name, in.seed, "val", score_ids(*g, in.split.val, pred)};
  return out;
}

void write_report(const std::filesystem::path& path, const std::vector<ReportRow>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write report " + path.string());
  out << kReportHeader << "\n";
  for (const auto& r : rows) {
    parse_variant(r.variant);
    out << r.variant << "," << r.seed << "," << r.split << "," << format_double(r.metrics.macro_f1)
        << "," << format_double(r.metrics.gmean) << "," << format_double(r.metrics.minority_f1) << ","
        << format_double(r.metrics.majority_f1) << "\n";
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<ReportRow> read_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read report " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kReportHeader)
    throw std::invalid_argument("report: missing or wrong header in " + path.string());
  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 7) throw std::invalid_argument("report: expected 7 fields in '" + line + "'");
    ReportRow r;
    r.variant = std::string(to_string(parse_variant(f[0])));
    r.seed = std::stoull(f[1]);
    r.split = f[2];
    r.metrics = {parse_double(f[3]), parse_double(f[4]), parse_double(f[5]), parse_double(f[6])};
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace hetgdt::eval
