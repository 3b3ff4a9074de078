// Copyright 2026 The hetgdt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

namespace hetgdt::eval {

/// Binary confusion counts with participant (label 1) as the positive class.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
  std::size_t total() const { return tp + fp + fn + tn; }
};

/// Labels are 1 (participant) or 0 (benign).
ConfusionMatrix confusion_matrix(const std::vector<int>& y_true, const std::vector<int>& y_pred);

/// Per-class F1 in [0, 1]; a zero denominator contributes 0.
double f1_participant(const ConfusionMatrix& c);
double f1_benign(const ConfusionMatrix& c);

/// Unweighted mean of the two per-class F1 scores, times 100.
double macro_f1(const std::vector<int>& y_true, const std::vector<int>& y_pred);
/// sqrt(participant recall * benign recall), times 100.
double gmean(const std::vector<int>& y_true, const std::vector<int>& y_pred);

struct Metrics {
  double macro_f1 = 0.0;
  double gmean = 0.0;
  double minority_f1 = 0.0;  // participant F1 x 100
  double majority_f1 = 0.0;  // benign F1 x 100
  bool operator==(const Metrics&) const = default;
};

Metrics compute_metrics(const std::vector<int>& y_true, const std::vector<int>& y_pred);

}  // namespace hetgdt::eval
