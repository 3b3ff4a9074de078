// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hetgdt/augment/text.hpp"
#include "hetgdt/hetgraph.hpp"

namespace hetgdt::augment {

inline constexpr std::string_view kNodeInstruction =
    "Act as an expert in social network analysis, your task is to generate a synthetic user "
    "based on the given context, including username, user ID, and user profile. The generated "
    "synthetic user information should capture the key information in the original user while "
    "ensuring variability.";

inline constexpr std::string_view kEdgeInstruction =
    "Act as an expert in social network analysis; given the original user information, the "
    "connected neighbor information with neighbor type, and synthetic user information "
    "generated from the original user, your task is to determine which neighbors the synthetic "
    "user should connect to.";

inline constexpr std::string_view kNodeFormatReminder =
    "Respond exactly in the format:\nUsername: <username>;\nUser ID: @<user id>;\n"
    "User Profile: <user profile>.";

inline constexpr std::string_view kEdgeFormatReminder =
    "Respond exactly in the format: Selected Neighbors: [<comma-separated neighbor numbers>].";

/// Instruction (sent as the system message) and context (the user message).
struct RenderedPrompt {
  std::string instruction;
  std::string context;

  /// Full prompt text: instruction, a newline, then the context.
  std::string text() const { return instruction + "\n" + context; }
};

RenderedPrompt render_node_prompt(const UserText& t);

/// Neighbour texts are numbered from 1; embedded newlines become spaces.
RenderedPrompt render_edge_prompt(const UserText& original, NodeType neighbor_type,
                                  const std::vector<std::string>& neighbor_texts,
                                  const UserText& synthetic);

/// Labeled-line reply ("Username:", "User ID:", "User Profile:"). Returns
/// nullopt when a field is missing or empty.
std::optional<UserText> parse_user_response(std::string_view response);

struct Selection {
  std::vector<std::size_t> indices;  // 1-based, sorted, unique, within [1, n]
  std::vector<std::size_t> dropped;  // out-of-range indices that were discarded
};

/// Reads "Selected Neighbors: [..]". Returns nullopt when no well-formed list
/// is present.
std::optional<Selection> parse_selection(std::string_view response, std::size_t n);

/// Capitalized neighbour type as shown to the model ("Tweet", "Keyword", "User").
std::string_view neighbor_type_label(NodeType t);

}  // namespace hetgdt::augment
