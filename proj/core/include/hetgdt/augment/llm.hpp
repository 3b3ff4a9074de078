// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

namespace hetgdt::augment {

struct LlmRequest {
  std::string model;
  std::string system;  // template instruction
  std::string user;    // context block
  double temperature = 0.0;
  int max_tokens = 512;
};

struct LlmUsage {
  int prompt_tokens = 0;
  int completion_tokens = 0;
};

struct LlmResponse {
  std::string text;
  LlmUsage usage;
  double latency_ms = 0.0;
  bool from_cache = false;
};

/// Non-retryable endpoint failure (bad credentials, malformed reply, ...).
class LlmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Transient failure that survived the client's own retries.
class TransportError : public LlmError {
 public:
  using LlmError::LlmError;
};

/// Chat-completion endpoint. Implementations must be safe to call concurrently.
class LlmClient {
 public:
  virtual ~LlmClient() = default;
  virtual LlmResponse complete(const LlmRequest& request) = 0;
  /// Number of requests that reached the underlying endpoint.
  virtual std::uint64_t endpoint_calls() const = 0;
};

/// The hash identifying a rendered prompt (system and user blocks).
std::string prompt_hash(const LlmRequest& request);

/// Offline stand-in. Node requests get a perturbed copy of the user: the name
/// and handle take a suffix from a fixed table and the profile is paraphrased
/// by phrase substitution, keeping hashtags and drug terms. Edge requests
/// select every candidate that mentions a drug or promotional keyword.
class MockLlmClient final : public LlmClient {
 public:
  LlmResponse complete(const LlmRequest& request) override;
  std::uint64_t endpoint_calls() const override { return calls_.load(); }

 private:
  std::atomic<std::uint64_t> calls_{0};
};

/// Words the mock treats as keyword tokens even without a '#'.
bool is_drug_term(std::string_view token);
bool is_promo_term(std::string_view token);

struct HttpClientConfig {
  /// Base URL up to the API version, e.g. "https://api.example.com/v1".
  std::string endpoint;
  std::string model;
  std::string api_key_env = "LLM_API_KEY";
  int max_attempts = 4;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::seconds timeout{60};
};

/// OpenAI-compatible POST {endpoint}/chat/completions with bearer credentials
/// read from the environment. Retries connection errors, 429 and 5xx with
/// exponential backoff.
class HttpChatClient final : public LlmClient {
 public:
  explicit HttpChatClient(HttpClientConfig cfg);
  LlmResponse complete(const LlmRequest& request) override;
  std::uint64_t endpoint_calls() const override { return calls_.load(); }

 private:
  HttpClientConfig cfg_;
  std::string api_key_;
  std::string scheme_host_;
  std::string path_prefix_;
  std::atomic<std::uint64_t> calls_{0};
};

/// Append-only JSONL response cache in front of another client. Each line is
/// {"prompt_hash", "model", "response", "timestamp"}; the first record for a
/// (hash, model) pair wins.
class CachingClient final : public LlmClient {
 public:
  CachingClient(std::shared_ptr<LlmClient> inner, std::filesystem::path cache_file);
  LlmResponse complete(const LlmRequest& request) override;
  std::uint64_t endpoint_calls() const override { return inner_->endpoint_calls(); }
  std::size_t size() const;

 private:
  std::shared_ptr<LlmClient> inner_;
  std::filesystem::path path_;
  mutable std::mutex mu_;
  std::map<std::string, std::string> entries_;  // hash + '\n' + model -> response
};

}  // namespace hetgdt::augment
