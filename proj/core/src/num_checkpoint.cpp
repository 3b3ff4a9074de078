// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetgdt/num/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace hetgdt::num {

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little-endian");

}  // namespace

std::filesystem::path manifest_path(const std::filesystem::path& prefix) {
  return std::filesystem::path(prefix.string() + ".json");
}

std::filesystem::path data_path(const std::filesystem::path& prefix) {
  return std::filesystem::path(prefix.string() + ".bin");
}

void save_checkpoint(const std::filesystem::path& prefix, const ParamStore& params,
                     const std::string& config_hash, const nlohmann::json& extra) {
  nlohmann::json manifest;
  manifest["version"] = kCheckpointVersion;
  manifest["config_hash"] = config_hash;
  manifest["params"] = nlohmann::json::array();
  manifest["extra"] = extra;

  std::ofstream bin(data_path(prefix), std::ios::binary | std::ios::trunc);
  if (!bin) throw NumError("cannot write " + data_path(prefix).string());
  std::size_t offset = 0;
  std::vector<double> row_major;
  for (const auto* p : params.all()) {
    const auto rows = p->value.rows(), cols = p->value.cols();
    manifest["params"].push_back(
        {{"name", p->name}, {"rows", rows}, {"cols", cols}, {"offset", offset}});
    row_major.resize(static_cast<std::size_t>(rows * cols));
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        row_major.data(), rows, cols) = p->value;
    bin.write(reinterpret_cast<const char*>(row_major.data()),
              static_cast<std::streamsize>(row_major.size() * sizeof(double)));
    offset += row_major.size();
  }
  if (!bin) throw NumError("short write to " + data_path(prefix).string());

  std::ofstream js(manifest_path(prefix), std::ios::trunc);
  if (!js) throw NumError("cannot write " + manifest_path(prefix).string());
  js << manifest.dump(2) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& prefix) {
  std::ifstream js(manifest_path(prefix));
  if (!js) throw NumError("missing checkpoint manifest " + manifest_path(prefix).string());
  nlohmann::json manifest;
  try {
    js >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw NumError("malformed checkpoint manifest: " + std::string(e.what()));
  }
  if (manifest.value("version", 0) != kCheckpointVersion)
    throw NumError("unsupported checkpoint version");

  std::ifstream bin(data_path(prefix), std::ios::binary);
  if (!bin) throw NumError("missing checkpoint data " + data_path(prefix).string());
  std::vector<double> data;
  {
    bin.seekg(0, std::ios::end);
    const auto bytes = static_cast<std::size_t>(bin.tellg());
    if (bytes % sizeof(double) != 0) throw NumError("checkpoint data is not float64-aligned");
    data.resize(bytes / sizeof(double));
    bin.seekg(0);
    bin.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(bytes));
  }

  Checkpoint out;
  out.config_hash = manifest.at("config_hash").get<std::string>();
  out.extra = manifest.value("extra", nlohmann::json::object());
  for (const auto& entry : manifest.at("params")) {
    const auto rows = entry.at("rows").get<Eigen::Index>();
    const auto cols = entry.at("cols").get<Eigen::Index>();
    const auto offset = entry.at("offset").get<std::size_t>();
    const auto count = static_cast<std::size_t>(rows * cols);
    if (offset + count > data.size())
      throw NumError("checkpoint data truncated at '" + entry.at("name").get<std::string>() + "'");
    Matrix value = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                  Eigen::RowMajor>>(data.data() + offset, rows, cols);
    out.params.add(entry.at("name").get<std::string>(), std::move(value));
  }
  return out;
}

void load_into(const std::filesystem::path& prefix, ParamStore& params,
               const std::string& expected_config_hash) {
  auto ck = load_checkpoint(prefix);
  if (ck.config_hash != expected_config_hash)
    throw NumError("checkpoint config hash " + ck.config_hash + " does not match " +
                   expected_config_hash);
  params.assign_values(ck.params);
}

}  // namespace hetgdt::num
