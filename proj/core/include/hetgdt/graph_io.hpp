// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "hetgdt/hetgraph.hpp"

namespace hetgdt {

// Line-delimited JSON, one object per line:
//   {"kind":"node","id":..,"type":"user"|"tweet"|"keyword","text":..,"label":..}
//   {"kind":"edge","src":..,"dst":..,"rel":"R1".."R6"}
// Output order is deterministic: nodes by id, then edges by (rel, src, dst).

void write_graph_jsonl(const HeteroGraph& g, std::ostream& out);
void write_graph_jsonl(const HeteroGraph& g, const std::filesystem::path& path);
HeteroGraph read_graph_jsonl(std::istream& in);
HeteroGraph read_graph_jsonl(const std::filesystem::path& path);

/// "id,label" rows for labeled users, sorted by id.
void write_labels_csv(const HeteroGraph& g, const std::filesystem::path& path);

void write_split_json(const SplitAssignment& split, const std::filesystem::path& path);
SplitAssignment read_split_json(const std::filesystem::path& path);

}  // namespace hetgdt
