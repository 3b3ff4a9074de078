// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <string_view>

#include "hetgdt/num/tape.hpp"

namespace hetgdt::num {

/// Places named parameters of a store on a tape, once per name. A frozen
/// binder records constants, so no gradient reaches the store.
class Binder {
 public:
  Binder(Tape& tape, ParamStore& store, bool trainable)
      : tape_(&tape), store_(&store), trainable_(trainable) {}

  Var operator()(std::string_view name) {
    auto it = cache_.find(name);
    if (it != cache_.end()) return it->second;
    auto& p = store_->at(name);
    Var v = trainable_ ? tape_->leaf(p) : tape_->frozen(p);
    cache_.emplace(std::string(name), v);
    return v;
  }

  Tape& tape() const { return *tape_; }
  ParamStore& store() const { return *store_; }
  bool trainable() const { return trainable_; }

 private:
  Tape* tape_;
  ParamStore* store_;
  bool trainable_;
  std::map<std::string, Var, std::less<>> cache_;
};

}  // namespace hetgdt::num
