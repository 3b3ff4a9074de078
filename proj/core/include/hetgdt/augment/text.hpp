// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hetgdt::augment {

class AugmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Username, handle and profile of a user. All fields are non-empty and the
/// handle starts with '@'.
struct UserText {
  std::string username;
  std::string user_id;
  std::string profile;

  static UserText make(std::string username, std::string user_id, std::string profile);
  bool operator==(const UserText&) const = default;
};

/// Node text convention for users: "Username: X; User ID: @Y; User Profile: Z".
std::string format_user_text(const UserText& t);

/// Inverse of format_user_text. Free text that does not follow the convention
/// becomes the profile, with `fallback_id` used for the name and handle.
UserText parse_user_text(std::string_view text, std::string_view fallback_id);

/// Lower-cased alphanumeric runs; everything else separates tokens.
std::vector<std::string> tokenize(std::string_view text);

/// Hashtag bodies in order of appearance, lower-cased ("#LSD#420" -> lsd, 420).
std::vector<std::string> hashtags(std::string_view text);

std::string trim(std::string_view s);

}  // namespace hetgdt::augment
