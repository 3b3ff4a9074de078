// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#include <httplib.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <thread>

#include "hetgdt/augment/llm.hpp"
#include "hetgdt/augment/prompts.hpp"
#include "hetgdt/num/rng.hpp"
#include "hetgdt/util/hash.hpp"
#include "hetgdt/util/log.hpp"

namespace hetgdt::augment {

namespace {

constexpr std::array<std::string_view, 44> kDrugTerms = {
    "cannabis", "weed",     "marijuana", "kush",      "thc",       "cbd",     "oxycodone",
    "oxy",      "codeine",  "lean",      "percocet",  "fentanyl",  "heroin",  "morphine",
    "xanax",    "valium",   "halcion",   "adderall",  "lsd",       "acid",    "mdma",
    "molly",    "ecstasy",  "shroom",    "shrooms",   "mushrooms", "dmt",     "psilocybin",
    "cocaine",  "coke",     "meth",      "crystal",   "amphetamine", "ketamine", "420",
    "psychedelic", "psychedelics", "pills", "edibles", "dabs",     "tabs",    "benzo",
    "benzos",   "opioids"};

constexpr std::array<std::string_view, 17> kPromoTerms = {
    "shipping", "delivery", "menu",    "dm",       "order",  "orders",  "plug",       "vendor",  "discreet",
    "stealth",  "wickr",    "telegram", "prices",  "deals",  "restock", "dispensary", "giveaway"};

struct Phrase {
  std::string_view from;
  std::string_view to;
};

constexpr std::array<Phrase, 16> kParaphrases = {{
    {"online dispensary", "your one-stop shop"},
    {"premium", "top-quality"},
    {"must be 18+", "adults 18+ only"},
    {"best", "finest"},
    {"love", "enjoy"},
    {"hello", "hi there"},
    {"welcome", "glad to have you"},
    {"daily", "every day"},
    {"new", "fresh"},
    {"great", "awesome"},
    {"fan of", "big on"},
    {"sharing", "posting"},
    {"thoughts", "ideas"},
    {"just", "simply"},
    {"life", "living"},
    {"happy", "glad"},
}};

constexpr std::array<std::string_view, 8> kNameSuffixes = {"_x",  "_hq",    "_real", "_2",
                                                           "_vip", "_daily", "_one",  "_alt"};

constexpr std::array<std::string_view, 3> kTaglines = {"Get ready for the weekend.",
                                                       "Stay tuned for more.", "Good vibes only."};

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

/// Whole-word, case-insensitive phrase substitution. Hashtag bodies are left alone.
std::string paraphrase(std::string_view profile) {
  std::string out(profile);
  for (const auto& p : kParaphrases) {
    std::string lower = to_lower(out);
    std::string next;
    std::size_t pos = 0;
    while (true) {
      auto hit = lower.find(p.from, pos);
      if (hit == std::string::npos) break;
      const auto end = hit + p.from.size();
      const bool left_ok = hit == 0 || (!word_char(out[hit - 1]) && out[hit - 1] != '#');
      const bool right_ok = end >= out.size() || !word_char(out[end]) ||
                            !word_char(p.from.back());
      if (!left_ok || !right_ok) {
        next.append(out, pos, end - pos);
        pos = end;
        continue;
      }
      next.append(out, pos, hit - pos);
      std::string rep(p.to);
      if (std::isupper(static_cast<unsigned char>(out[hit])))
        rep[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(rep[0])));
      next += rep;
      pos = end;
    }
    next.append(out, pos, std::string::npos);
    out = std::move(next);
  }
  return out;
}

std::string perturb_name(std::string_view name, std::uint64_t salt) {
  std::string stem(name.substr(0, std::min<std::size_t>(name.size(), 14)));
  while (!stem.empty() && (stem.back() == '_' || std::isdigit(static_cast<unsigned char>(stem.back()))))
    stem.pop_back();
  if (stem.empty()) stem = "user";
  const auto h = num::mix64(num::fnv1a(name) ^ salt);
  return stem + std::string(kNameSuffixes[h % kNameSuffixes.size()]);
}

std::optional<std::string> line_with_prefix(std::string_view text, std::string_view prefix) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    if (line.starts_with(prefix)) return std::string(line.substr(prefix.size()));
    pos = end + 1;
  }
  return std::nullopt;
}

std::string strip_final_period(std::string s) {
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

std::string mock_node_reply(const LlmRequest& req) {
  auto line = line_with_prefix(req.user, "Username: ");
  if (!line) throw LlmError("mock: node request without a user line");
  const UserText t = parse_user_text("Username: " + strip_final_period(*line), "user");
  std::string handle_body = t.user_id.substr(1);
  std::string profile = paraphrase(t.profile);
  const auto h = num::fnv1a(t.profile);
  if (h % 3 != 0) {
    profile = trim(profile);
    if (!profile.empty() && profile.back() != '.') profile += '.';
    profile += " " + std::string(kTaglines[(h / 3) % kTaglines.size()]);
  }
  return "Username: " + perturb_name(t.username, 0x11) + ";\nUser ID: @" +
         perturb_name(handle_body, 0x22) + ";\nUser Profile: " + profile + "\n";
}

std::set<std::string> keyword_tokens(std::string_view text) {
  std::set<std::string> out;
  for (auto& tok : tokenize(text))
    if (is_drug_term(tok) || is_promo_term(tok)) out.insert(tok);
  for (auto& tag : hashtags(text)) out.insert(tag);
  return out;
}

std::string mock_edge_reply(const LlmRequest& req) {
  if (!line_with_prefix(req.user, "Synthetic User Information: "))
    throw LlmError("mock: edge request without synthetic user information");

  std::vector<std::size_t> picked;
  std::string reasons;
  std::size_t pos = 0;
  const std::string_view text = req.user;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    pos = end + 1;
    const auto dot = line.find(". Text Content: ");
    if (dot == std::string_view::npos || dot == 0) continue;
    const auto num = line.substr(0, dot);
    if (!std::all_of(num.begin(), num.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      continue;
    const auto found = keyword_tokens(line.substr(dot + std::string_view(". Text Content: ").size()));
    std::vector<std::string> shared;
    for (const auto& w : found)
      if (is_drug_term(w) || is_promo_term(w)) shared.push_back(w);
    if (shared.empty()) continue;
    picked.push_back(std::stoul(std::string(num)));
    reasons += "Neighbor " + std::string(num) + " mentions:";
    for (const auto& w : shared) reasons += " " + w;
    reasons += "\n";
  }
  std::string out = "Selected Neighbors: [";
  for (std::size_t i = 0; i < picked.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(picked[i]);
  }
  out += "].\nReasons:\n" + reasons;
  return out;
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

bool is_drug_term(std::string_view token) {
  return std::find(kDrugTerms.begin(), kDrugTerms.end(), token) != kDrugTerms.end();
}

bool is_promo_term(std::string_view token) {
  return std::find(kPromoTerms.begin(), kPromoTerms.end(), token) != kPromoTerms.end();
}

std::string prompt_hash(const LlmRequest& request) {
  return util::sha256_hex(request.system + "\n" + request.user);
}

LlmResponse MockLlmClient::complete(const LlmRequest& request) {
  ++calls_;
  LlmResponse r;
  if (request.system == kNodeInstruction) r.text = mock_node_reply(request);
  else if (request.system == kEdgeInstruction) r.text = mock_edge_reply(request);
  else throw LlmError("mock: unrecognized instruction");
  r.usage.prompt_tokens = static_cast<int>(tokenize(request.system + " " + request.user).size());
  r.usage.completion_tokens = static_cast<int>(tokenize(r.text).size());
  return r;
}

HttpChatClient::HttpChatClient(HttpClientConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.endpoint.empty()) throw LlmError("LLM endpoint URL is not configured");
  if (cfg_.model.empty()) throw LlmError("LLM model name is not configured");
  const char* key = std::getenv(cfg_.api_key_env.c_str());
  if (key == nullptr || *key == '\0')
    throw LlmError("credentials missing: environment variable " + cfg_.api_key_env + " is not set");
  api_key_ = key;
  const auto scheme_end = cfg_.endpoint.find("://");
  if (scheme_end == std::string::npos) throw LlmError("LLM endpoint must start with http:// or https://");
  const auto path_start = cfg_.endpoint.find('/', scheme_end + 3);
  scheme_host_ = cfg_.endpoint.substr(0, path_start);
  path_prefix_ = path_start == std::string::npos ? "" : cfg_.endpoint.substr(path_start);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

LlmResponse HttpChatClient::complete(const LlmRequest& request) {
  nlohmann::json body = {
      {"model", request.model.empty() ? cfg_.model : request.model},
      {"messages",
       {{{"role", "system"}, {"content", request.system}}, {{"role", "user"}, {"content", request.user}}}},
      {"temperature", request.temperature},
      {"max_tokens", request.max_tokens},
  };
  const std::string payload = body.dump();
  httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};
  auto backoff = cfg_.initial_backoff;
  std::string last_error;
  for (int attempt = 1; attempt <= cfg_.max_attempts; ++attempt) {
    httplib::Client cli(scheme_host_);
    cli.set_connection_timeout(cfg_.timeout);
    cli.set_read_timeout(cfg_.timeout);
    cli.set_write_timeout(cfg_.timeout);
    const auto start = std::chrono::steady_clock::now();
    ++calls_;
    auto res = cli.Post(path_prefix_ + "/chat/completions", headers, payload, "application/json");
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
    } else if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
    } else if (res->status != 200) {
      throw LlmError("endpoint rejected request with HTTP " + std::to_string(res->status) + ": " +
                     res->body.substr(0, 200));
    } else {
      try {
        auto j = nlohmann::json::parse(res->body);
        LlmResponse out;
        out.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
        if (j.contains("usage")) {
          out.usage.prompt_tokens = j["usage"].value("prompt_tokens", 0);
          out.usage.completion_tokens = j["usage"].value("completion_tokens", 0);
        }
        out.latency_ms = ms;
        return out;
      } catch (const nlohmann::json::exception& e) {
        throw LlmError(std::string("malformed completion body: ") + e.what());
      }
    }
    if (attempt < cfg_.max_attempts) {
      util::log_warn("LLM request failed (" + last_error + "), retrying in " +
                     std::to_string(backoff.count()) + " ms");
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw TransportError("LLM endpoint unavailable after " + std::to_string(cfg_.max_attempts) +
                       " attempts: " + last_error);
}

CachingClient::CachingClient(std::shared_ptr<LlmClient> inner, std::filesystem::path cache_file)
    : inner_(std::move(inner)), path_(std::move(cache_file)) {
  std::ifstream in(path_);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      auto key = j.at("prompt_hash").get<std::string>() + "\n" + j.at("model").get<std::string>();
      entries_.emplace(std::move(key), j.at("response").get<std::string>());
    } catch (const nlohmann::json::exception&) {
      util::log_warn("ignoring malformed cache line " + std::to_string(lineno) + " in " + path_.string());
    }
  }
}

std::size_t CachingClient::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

LlmResponse CachingClient::complete(const LlmRequest& request) {
  const auto hash = prompt_hash(request);
  const auto key = hash + "\n" + request.model;
  {
    std::lock_guard lock(mu_);
    auto it = entries_.find(key);
    if (it != entries_.end()) {
      LlmResponse r;
      r.text = it->second;
      r.from_cache = true;
      return r;
    }
  }
  LlmResponse r = inner_->complete(request);
  std::lock_guard lock(mu_);
  auto [it, inserted] = entries_.emplace(key, r.text);
  if (!inserted) {
    r.text = it->second;
    return r;
  }
  std::ofstream out(path_, std::ios::app);
  if (!out) throw LlmError("cannot append to cache " + path_.string());
  nlohmann::json rec = {{"prompt_hash", hash},
                        {"model", request.model},
                        {"response", r.text},
                        {"timestamp", utc_timestamp()}};
  out << rec.dump() << '\n';
  return r;
}

}  // namespace hetgdt::augment
