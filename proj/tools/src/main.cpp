// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "CLI11.hpp"
#include "hetgdt/cli/stages.hpp"

namespace {

using hetgdt::cli::Overrides;

void add_common_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Root seed; every stage derives its own seed from it");
  cmd->add_flag("--mock-llm", o.mock_llm, "Use the deterministic offline LLM");
  cmd->add_option("--llm-endpoint", o.llm_endpoint, "OpenAI-compatible base URL, e.g. https://host/v1");
  cmd->add_option("--llm-model", o.llm_model, "Model name sent to the endpoint");
  cmd->add_option("--split", o.split, "Training fraction; selects the matching hyper-parameter row")
      ->check(CLI::IsMember({0.1, 0.2, 0.4}));
  cmd->add_option("--out", o.out, "Run directory for artifacts and manifests");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hetgdt: drug trafficking detection on heterogeneous graphs"};
  app.require_subcommand(1);
  struct Command {
    const char* name;
    const char* help;
    int (*run)(const hetgdt::cli::RunConfig&);
  };
  const Command commands[] = {
      {"synth", "Generate (or import with --graph) the graph and its split", &hetgdt::cli::cmd_synth},
      {"pretrain", "Contrastive pre-training of the encoder", &hetgdt::cli::cmd_pretrain},
      {"augment", "LLM synthesis of minority users and edges", &hetgdt::cli::cmd_augment},
      {"tune", "Prompt tuning on the augmented graph", &hetgdt::cli::cmd_tune},
      {"eval", "Metrics report for the tuned model and configured variants", &hetgdt::cli::cmd_eval},
      {"pipeline", "Run every stage in order", &hetgdt::cli::cmd_pipeline},
  };
  Overrides overrides;
  int rc = hetgdt::cli::kExitOk;
  for (const auto& c : commands) {
    auto* cmd = app.add_subcommand(c.name, c.help);
    add_common_flags(cmd, overrides);
    if (std::string_view(c.name) == "synth" || std::string_view(c.name) == "pipeline")
      cmd->add_option("--graph", overrides.graph, "Use this graph JSONL instead of generating one")
          ->check(CLI::ExistingFile);
    cmd->callback([&, run = c.run, name = c.name] {
      hetgdt::cli::RunConfig cfg;
      rc = hetgdt::cli::guarded(name, [&] { cfg = hetgdt::cli::resolve_config(overrides); });
      if (rc == hetgdt::cli::kExitOk) rc = run(cfg);
    });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hetgdt::cli::kExitValidation;
  }
  return rc;
}
