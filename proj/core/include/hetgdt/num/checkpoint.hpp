// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "hetgdt/num/tape.hpp"

namespace hetgdt::num {

inline constexpr int kCheckpointVersion = 1;

/// On-disk parameter set: `<prefix>.json` manifest plus `<prefix>.bin` holding
/// little-endian float64 values, row-major, in manifest order.
struct Checkpoint {
  std::string config_hash;
  nlohmann::json extra = nlohmann::json::object();
  ParamStore params;
};

void save_checkpoint(const std::filesystem::path& prefix, const ParamStore& params,
                     const std::string& config_hash,
                     const nlohmann::json& extra = nlohmann::json::object());

Checkpoint load_checkpoint(const std::filesystem::path& prefix);

/// Loads values into an existing store; names, shapes and config hash must match.
void load_into(const std::filesystem::path& prefix, ParamStore& params,
               const std::string& expected_config_hash);

std::filesystem::path manifest_path(const std::filesystem::path& prefix);
std::filesystem::path data_path(const std::filesystem::path& prefix);

}  // namespace hetgdt::num
