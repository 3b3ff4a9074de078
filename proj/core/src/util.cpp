// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "hetgdt/util/hash.hpp"
#include "hetgdt/util/log.hpp"

namespace hetgdt::util {

namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1)
      throw std::runtime_error("sha256: digest init failed");
  }
  void update(const void* data, std::size_t n) {
    if (EVP_DigestUpdate(ctx_.get(), data, n) != 1) throw std::runtime_error("sha256: update failed");
  }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), md.data(), &len) != 1)
      throw std::runtime_error("sha256: final failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned i = 0; i < len; ++i) {
      out.push_back(kHex[md[i] >> 4]);
      out.push_back(kHex[md[i] & 15]);
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

struct LogState {
  std::mutex mu;
  LogLevel min_level = LogLevel::kInfo;
  LogSink sink;
};

LogState& log_state() {
  static LogState s;
  return s;
}

std::string_view level_name(LogLevel l) {
  switch (l) {
    case LogLevel::kDebug: return "debug";
    case LogLevel::kInfo: return "info";
    case LogLevel::kWarn: return "warn";
    case LogLevel::kError: return "error";
  }
  return "?";
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  Sha256 h;
  h.update(data.data(), data.size());
  return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  Sha256 h;
  std::array<char, 1 << 16> buf{};
  while (f) {
    f.read(buf.data(), buf.size());
    if (f.gcount() > 0) h.update(buf.data(), static_cast<std::size_t>(f.gcount()));
  }
  return h.hex();
}

LogSink set_log_sink(LogSink sink) {
  auto& s = log_state();
  std::lock_guard lock(s.mu);
  std::swap(s.sink, sink);
  return sink;
}

void set_min_log_level(LogLevel level) {
  auto& s = log_state();
  std::lock_guard lock(s.mu);
  s.min_level = level;
}

void log(LogLevel level, std::string_view message) {
  auto& s = log_state();
  std::lock_guard lock(s.mu);
  if (level < s.min_level) return;
  if (s.sink) {
    s.sink(level, message);
    return;
  }
  std::cerr << "[" << level_name(level) << "] " << message << '\n';
}

}  // namespace hetgdt::util
