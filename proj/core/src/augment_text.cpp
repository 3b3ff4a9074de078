// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#include <cctype>
#include <cmath>

#include "hetgdt/augment/embedder.hpp"
#include "hetgdt/augment/text.hpp"
#include "hetgdt/num/rng.hpp"

namespace hetgdt::augment {

namespace {

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

}  // namespace

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

UserText UserText::make(std::string username, std::string user_id, std::string profile) {
  username = trim(username);
  user_id = trim(user_id);
  profile = trim(profile);
  if (!user_id.empty() && user_id.front() != '@') user_id.insert(user_id.begin(), '@');
  if (username.empty() || user_id.size() < 2 || profile.empty())
    throw AugmentError("user text requires a non-empty username, user ID and profile");
  return {std::move(username), std::move(user_id), std::move(profile)};
}

std::string format_user_text(const UserText& t) {
  return "Username: " + t.username + "; User ID: " + t.user_id + "; User Profile: " + t.profile;
}

UserText parse_user_text(std::string_view text, std::string_view fallback_id) {
  constexpr std::string_view kName = "Username: ";
  constexpr std::string_view kId = "; User ID: ";
  constexpr std::string_view kProfile = "; User Profile: ";
  if (text.starts_with(kName)) {
    const auto id_at = text.find(kId);
    const auto profile_at = text.find(kProfile);
    if (id_at != std::string_view::npos && profile_at != std::string_view::npos && id_at < profile_at) {
      auto name = text.substr(kName.size(), id_at - kName.size());
      auto id = text.substr(id_at + kId.size(), profile_at - id_at - kId.size());
      auto profile = text.substr(profile_at + kProfile.size());
      if (!trim(name).empty() && !trim(id).empty() && !trim(profile).empty())
        return UserText::make(std::string(name), std::string(id), std::string(profile));
    }
  }
  std::string profile = trim(text);
  if (profile.empty()) profile = "(no profile)";
  return UserText::make(std::string(fallback_id), "@" + std::string(fallback_id), profile);
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (is_alnum(c)) {
      cur.push_back(lower(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::vector<std::string> hashtags(std::string_view text) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '#') continue;
    std::string tag;
    std::size_t j = i + 1;
    while (j < text.size() && is_alnum(text[j])) tag.push_back(lower(text[j++]));
    if (!tag.empty()) out.push_back(std::move(tag));
    i = j - 1;
  }
  return out;
}

HashEmbedder::HashEmbedder(Eigen::Index dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
  if (dim <= 0) throw AugmentError("embedder dimension must be positive");
}

Eigen::RowVectorXd HashEmbedder::embed(std::string_view text) const {
  Eigen::RowVectorXd v = Eigen::RowVectorXd::Zero(dim_);
  const auto tokens = tokenize(text);
  const std::uint64_t basis = num::mix64(seed_);
  auto bump = [&](std::string_view feature) {
    const std::uint64_t h = num::mix64(num::fnv1a(feature, basis));
    const auto slot = static_cast<Eigen::Index>(h % static_cast<std::uint64_t>(dim_));
    v(slot) += (h >> 63) != 0 ? -1.0 : 1.0;
  };
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    bump(tokens[i]);
    if (i + 1 < tokens.size()) bump(tokens[i] + ' ' + tokens[i + 1]);
  }
  const double n = v.norm();
  if (n > 0.0) v /= n;
  return v;
}

Eigen::RowVectorXd encode_text(const TextEmbedder& embedder, std::string_view text) {
  return embedder.embed(text);
}

encoder::TypeFeatures embed_graph(const HeteroGraph& g, const TextEmbedder& embedder) {
  encoder::TypeFeatures out;
  for (auto t : kAllNodeTypes) {
    const auto k = static_cast<std::size_t>(t);
    const auto n = g.num_nodes(t);
    out[k].resize(static_cast<Eigen::Index>(n), embedder.dim());
    for (std::size_t i = 0; i < n; ++i)
      out[k].row(static_cast<Eigen::Index>(i)) = embedder.embed(g.node_at(t, i).text);
  }
  return out;
}

}  // namespace hetgdt::augment
