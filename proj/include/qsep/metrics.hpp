/*
 * Copyright 2026 The qsep Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Confusion matrices and the imbalance-aware performance measures.
// Label 1 (separable) is the positive class.

#ifndef QSEP_METRICS_HPP_
#define QSEP_METRICS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "qsep/common.hpp"

namespace qsep::metrics {

struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + tn + fp + fn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

// Throws InvalidInput on empty or unequal-length inputs or labels outside {0, 1}.
ConfusionMatrix confusion(const std::vector<int>& predictions, const std::vector<int>& truths);

// Which measures hit a 0/0 and were set to 0.
struct DegenerateFlags {
  bool sensitivity = false;  // no positives in truth
  bool specificity = false;  // no negatives in truth
  bool precision = false;    // nothing predicted positive
  bool f_measure = false;    // precision + sensitivity == 0
  bool any() const { return sensitivity || specificity || precision || f_measure; }
};

struct MetricsReport {
  double oa = 0.0;
  double oe = 0.0;
  double aa = 0.0;
  double ae = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  double precision = 0.0;
  double f_measure = 0.0;
  double g_mean = 0.0;
  std::uint64_t n1 = 0;  // TP + FN
  std::uint64_t n2 = 0;  // TN + FP
  DegenerateFlags degenerate;
};

enum class SpecificityMode {
  kStandard,        // TN / (TN + FP)
  kLiteralTnOverN,  // TN / N, for comparison runs only
};

// OA = (TP+TN)/N, AA = (TP/N1 + TN/N2)/2, s = TP/N1, r = TN/N2, k = TP/(TP+FP),
// F = 2ks/(k+s), G = sqrt(s r). A 0/0 ratio is 0 and flagged. Throws
// InvalidInput when N == 0.
MetricsReport compute_metrics(const ConfusionMatrix& cm,
                              SpecificityMode mode = SpecificityMode::kStandard);

// |n_pos - n_neg| / N. Throws InvalidInput on an empty list.
double prevalence_difference(const std::vector<int>& labels);
double prevalence_difference(std::uint64_t n_pos, std::uint64_t n_neg);

// "oa,oe,aa,ae,sensitivity,specificity,precision,f_measure,g_mean"
std::string csv_header();
std::string to_csv_row(const MetricsReport& report);

// Field-wise arithmetic mean of reports; n1/n2 are averaged and rounded.
MetricsReport mean_report(const std::vector<MetricsReport>& reports);

}  // namespace qsep::metrics

#endif  // QSEP_METRICS_HPP_
