// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <charconv>
#include <regex>

#include "hetgdt/augment/prompts.hpp"

namespace hetgdt::augment {

namespace {

std::string one_line(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c == '\n' || c == '\r') c = ' ';
  return out;
}

std::string user_info(const UserText& t) {
  return "Username: " + one_line(t.username) + "; User ID: " + one_line(t.user_id) +
         "; User Profile: " + one_line(t.profile);
}

}  // namespace

std::string_view neighbor_type_label(NodeType t) {
  switch (t) {
    case NodeType::kUser: return "User";
    case NodeType::kTweet: return "Tweet";
    case NodeType::kKeyword: return "Keyword";
  }
  return "?";
}

RenderedPrompt render_node_prompt(const UserText& t) {
  return {std::string(kNodeInstruction), "Context:\n" + user_info(t) + "."};
}

RenderedPrompt render_edge_prompt(const UserText& original, NodeType neighbor_type,
                                  const std::vector<std::string>& neighbor_texts,
                                  const UserText& synthetic) {
  std::string ctx = "Context:\nOriginal User Information: " + user_info(original) + ";\n";
  ctx += "Neighbor Type: ";
  ctx += neighbor_type_label(neighbor_type);
  ctx += ";\nNeighbor Information: [\n";
  for (std::size_t i = 0; i < neighbor_texts.size(); ++i)
    ctx += std::to_string(i + 1) + ". Text Content: " + one_line(neighbor_texts[i]) + "\n";
  ctx += "];\nSynthetic User Information: " + user_info(synthetic) + ".";
  return {std::string(kEdgeInstruction), std::move(ctx)};
}

std::optional<UserText> parse_user_response(std::string_view response) {
  std::optional<std::string> name, id, profile;
  std::size_t pos = 0;
  while (pos <= response.size()) {
    auto end = response.find('\n', pos);
    if (end == std::string_view::npos) end = response.size();
    std::string line = trim(response.substr(pos, end - pos));
    pos = end + 1;
    auto field = [&](std::string_view label, std::optional<std::string>& slot) {
      if (slot || !line.starts_with(label)) return;
      std::string v = trim(std::string_view(line).substr(label.size()));
      while (!v.empty() && v.back() == ';') v.pop_back();
      slot = trim(v);
    };
    field("Username:", name);
    field("User ID:", id);
    field("User Profile:", profile);
  }
  if (!name || !id || !profile || name->empty() || profile->empty()) return std::nullopt;
  std::string handle = *id;
  if (!handle.empty() && handle.front() != '@') handle.insert(handle.begin(), '@');
  if (handle.size() < 2) return std::nullopt;
  return UserText::make(*name, handle, *profile);
}

std::optional<Selection> parse_selection(std::string_view response, std::size_t n) {
  static const std::regex kList(R"(Selected Neighbors:\s*\[([^\]]*)\])");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_search(response.begin(), response.end(), m, kList)) return std::nullopt;
  const std::string body = m[1].str();
  Selection out;
  std::size_t pos = 0;
  while (pos < body.size()) {
    auto comma = body.find(',', pos);
    if (comma == std::string::npos) comma = body.size();
    const std::string item = trim(std::string_view(body).substr(pos, comma - pos));
    pos = comma + 1;
    if (item.empty()) {
      if (comma == body.size()) break;
      return std::nullopt;
    }
    std::size_t value = 0;
    auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc() || p != item.data() + item.size()) return std::nullopt;
    if (value < 1 || value > n) out.dropped.push_back(value);
    else out.indices.push_back(value);
  }
  std::sort(out.indices.begin(), out.indices.end());
  out.indices.erase(std::unique(out.indices.begin(), out.indices.end()), out.indices.end());
  return out;
}

}  // namespace hetgdt::augment
