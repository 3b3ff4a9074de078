// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetgdt/num/tape.hpp"

namespace hetgdt::num {

Parameter& ParamStore::add(std::string name, Matrix init) {
  if (index_.contains(name)) throw NumError("duplicate parameter '" + name + "'");
  auto p = std::make_unique<Parameter>();
  p->name = name;
  p->grad = Matrix::Zero(init.rows(), init.cols());
  p->value = std::move(init);
  index_.emplace(std::move(name), params_.size());
  params_.push_back(std::move(p));
  return *params_.back();
}

Parameter& ParamStore::at(std::string_view name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw NumError("unknown parameter '" + std::string(name) + "'");
  return *params_[it->second];
}

const Parameter& ParamStore::at(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw NumError("unknown parameter '" + std::string(name) + "'");
  return *params_[it->second];
}

bool ParamStore::contains(std::string_view name) const { return index_.find(name) != index_.end(); }

std::vector<Parameter*> ParamStore::all() {
  std::vector<Parameter*> out;
  out.reserve(params_.size());
  for (auto& p : params_) out.push_back(p.get());
  return out;
}

std::vector<const Parameter*> ParamStore::all() const {
  std::vector<const Parameter*> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p.get());
  return out;
}

std::vector<Parameter*> ParamStore::with_prefix(std::string_view prefix) {
  std::vector<Parameter*> out;
  for (auto& p : params_)
    if (std::string_view(p->name).starts_with(prefix)) out.push_back(p.get());
  return out;
}

void ParamStore::zero_grad() {
  for (auto& p : params_) p->grad.setZero();
}

ParamStore ParamStore::clone() const {
  ParamStore out;
  for (const auto& p : params_) out.add(p->name, p->value);
  return out;
}

void ParamStore::assign_values(const ParamStore& other) {
  if (other.size() != size()) throw NumError("parameter count mismatch");
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const auto& src = *other.params_[i];
    auto& dst = *params_[i];
    if (src.name != dst.name || src.value.rows() != dst.value.rows() ||
        src.value.cols() != dst.value.cols())
      throw NumError("parameter mismatch at '" + dst.name + "'");
    dst.value = src.value;
  }
}

const Matrix& Var::value() const { return tape_->value(id_); }

double Var::scalar() const {
  const auto& v = value();
  if (v.rows() != 1 || v.cols() != 1) throw NumError("scalar() on non-1x1 value");
  return v(0, 0);
}

Var Tape::constant(Matrix value) {
  nodes_.push_back(Node{std::move(value), {}, false, false, nullptr, {}});
  return Var(this, nodes_.size() - 1);
}

Var Tape::leaf(Parameter& p) {
  nodes_.push_back(Node{p.value, {}, false, true, &p, {}});
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Matrix value, const std::vector<Var>& parents, Backprop backprop) {
  bool needs = false;
  for (const auto& p : parents) {
    if (p.tape_ != this) throw NumError("operand recorded on a different tape");
    needs = needs || nodes_[p.id_].needs_grad;
  }
  nodes_.push_back(Node{std::move(value), {}, false, needs, nullptr,
                        needs ? std::move(backprop) : Backprop{}});
  return Var(this, nodes_.size() - 1);
}

Matrix& Tape::grad(std::size_t id) {
  auto& n = nodes_[id];
  if (!n.has_grad) {
    n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
    n.has_grad = true;
  }
  return n.grad;
}

const Matrix& Tape::grad(Var v) const {
  const auto& n = nodes_[v.id_];
  if (!n.has_grad) throw NumError("no gradient recorded for node");
  return n.grad;
}

void Tape::backward(Var loss) {
  if (loss.tape_ != this) throw NumError("loss recorded on a different tape");
  const auto& lv = nodes_[loss.id_].value;
  if (lv.rows() != 1 || lv.cols() != 1)
    throw NumError("backward requires a scalar loss, got " + std::to_string(lv.rows()) + "x" +
                   std::to_string(lv.cols()));
  for (auto& n : nodes_) {
    n.has_grad = false;
    n.grad.resize(0, 0);
  }
  grad(loss.id_)(0, 0) = 1.0;
  for (std::size_t i = loss.id_ + 1; i-- > 0;) {
    auto& n = nodes_[i];
    if (!n.has_grad || !n.needs_grad) continue;
    if (n.backprop) n.backprop(*this, i);
    if (n.param != nullptr) n.param->grad += n.grad;
  }
}

}  // namespace hetgdt::num
