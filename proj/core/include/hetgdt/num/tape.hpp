// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstddef>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hetgdt::num {

using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

class NumError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A named trainable tensor. `grad` always has the shape of `value`.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
};

/// Owns parameters with stable addresses, iterated in insertion order.
class ParamStore {
 public:
  Parameter& add(std::string name, Matrix init);
  Parameter& at(std::string_view name);
  const Parameter& at(std::string_view name) const;
  bool contains(std::string_view name) const;

  std::size_t size() const { return params_.size(); }
  std::vector<Parameter*> all();
  std::vector<const Parameter*> all() const;
  /// Parameters whose names start with `prefix`.
  std::vector<Parameter*> with_prefix(std::string_view prefix);

  void zero_grad();
  ParamStore clone() const;
  /// Copies values (not gradients) from `other`; names and shapes must match.
  void assign_values(const ParamStore& other);

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

class Tape;

/// Handle to a value recorded on a tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;

  bool valid() const { return tape_ != nullptr; }
  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  /// Value of a 1x1 variable.
  double scalar() const;
  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Reverse-mode tape. Nodes are appended in evaluation order, so the tape is
/// a topological order by construction and backward is a single reverse sweep.
class Tape {
 public:
  /// Accumulates gradient contributions into the parents of node `self`.
  using Backprop = std::function<void(Tape&, std::size_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  /// Trainable leaf; backward adds its gradient into `p.grad`.
  Var leaf(Parameter& p);
  /// Frozen parameter: recorded as a constant copy of its value.
  Var frozen(const Parameter& p) { return constant(p.value); }

  /// Populates gradients for every node reachable from the scalar `loss` and
  /// adds leaf gradients into their parameters. Repeated calls accumulate.
  void backward(Var loss);

  std::size_t size() const { return nodes_.size(); }

  // Op authoring interface.
  Var record(Matrix value, const std::vector<Var>& parents, Backprop backprop);
  const Matrix& value(std::size_t id) const { return nodes_[id].value; }
  bool needs_grad(std::size_t id) const { return nodes_[id].needs_grad; }
  /// Gradient slot of a node, zero-initialised on first access.
  Matrix& grad(std::size_t id);
  const Matrix& grad(Var v) const;

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool has_grad = false;
    bool needs_grad = false;
    Parameter* param = nullptr;
    Backprop backprop;
  };
  // deque keeps references returned by value() stable across appends.
  std::deque<Node> nodes_;
};

}  // namespace hetgdt::num
