// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetgdt/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hetgdt::eval {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double f1(std::size_t tp, std::size_t fp, std::size_t fn) {
  const double p = ratio(tp, tp + fp);
  const double r = ratio(tp, tp + fn);
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

}  // namespace

ConfusionMatrix confusion_matrix(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  if (y_true.size() != y_pred.size())
    throw std::invalid_argument("label vectors differ in length: " + std::to_string(y_true.size()) +
                                " vs " + std::to_string(y_pred.size()));
  if (y_true.empty()) throw std::invalid_argument("label vectors are empty");
  ConfusionMatrix c;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const int t = y_true[i], p = y_pred[i];
    if ((t != 0 && t != 1) || (p != 0 && p != 1))
      throw std::invalid_argument("labels must be 0 or 1");
    if (t == 1) (p == 1 ? c.tp : c.fn)++;
    else (p == 1 ? c.fp : c.tn)++;
  }
  return c;
}

double f1_participant(const ConfusionMatrix& c) { return f1(c.tp, c.fp, c.fn); }
double f1_benign(const ConfusionMatrix& c) { return f1(c.tn, c.fn, c.fp); }

double macro_f1(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  const auto c = confusion_matrix(y_true, y_pred);
  return 50.0 * (f1_participant(c) + f1_benign(c));
}

double gmean(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  const auto c = confusion_matrix(y_true, y_pred);
  return 100.0 * std::sqrt(ratio(c.tp, c.tp + c.fn) * ratio(c.tn, c.tn + c.fp));
}

Metrics compute_metrics(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  const auto c = confusion_matrix(y_true, y_pred);
  Metrics m;
  m.minority_f1 = 100.0 * f1_participant(c);
  m.majority_f1 = 100.0 * f1_benign(c);
  m.macro_f1 = 0.5 * (m.minority_f1 + m.majority_f1);
  m.gmean = 100.0 * std::sqrt(ratio(c.tp, c.tp + c.fn) * ratio(c.tn, c.tn + c.fp));
  return m;
}

}  // namespace hetgdt::eval
