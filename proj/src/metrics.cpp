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

#include "qsep/metrics.hpp"

#include <cmath>

#include "qsep/csv_util.hpp"

namespace qsep::metrics {

namespace {

double ratio(std::uint64_t num, std::uint64_t den, bool& degenerate) {
  if (den == 0) {
    degenerate = true;
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ConfusionMatrix confusion(const std::vector<int>& predictions, const std::vector<int>& truths) {
  if (predictions.size() != truths.size()) throw InvalidInput("predictions and truths differ in length");
  if (truths.empty()) throw InvalidInput("no samples to score");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const int p = predictions[i];
    const int t = truths[i];
    if ((p != 0 && p != 1) || (t != 0 && t != 1)) throw InvalidInput("labels must be 0 or 1");
    if (t == 1) {
      ++(p == 1 ? cm.tp : cm.fn);
    } else {
      ++(p == 1 ? cm.fp : cm.tn);
    }
  }
  return cm;
}

MetricsReport compute_metrics(const ConfusionMatrix& cm, SpecificityMode mode) {
  const std::uint64_t n = cm.total();
  if (n == 0) throw InvalidInput("confusion matrix is empty");
  MetricsReport r;
  r.n1 = cm.tp + cm.fn;
  r.n2 = cm.tn + cm.fp;
  r.oa = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(n);
  r.oe = 1.0 - r.oa;
  r.sensitivity = ratio(cm.tp, r.n1, r.degenerate.sensitivity);
  const double tnr = ratio(cm.tn, r.n2, r.degenerate.specificity);
  r.specificity = mode == SpecificityMode::kStandard ? tnr : static_cast<double>(cm.tn) / n;
  r.aa = 0.5 * (r.sensitivity + tnr);
  r.ae = 1.0 - r.aa;
  r.precision = ratio(cm.tp, cm.tp + cm.fp, r.degenerate.precision);
  const double ks = r.precision + r.sensitivity;
  if (ks > 0.0) {
    r.f_measure = 2.0 * r.precision * r.sensitivity / ks;
  } else {
    r.degenerate.f_measure = true;
  }
  r.g_mean = std::sqrt(r.sensitivity * r.specificity);
  return r;
}

double prevalence_difference(std::uint64_t n_pos, std::uint64_t n_neg) {
  const std::uint64_t n = n_pos + n_neg;
  if (n == 0) throw InvalidInput("prevalence difference of an empty label set");
  const std::uint64_t diff = n_pos > n_neg ? n_pos - n_neg : n_neg - n_pos;
  return static_cast<double>(diff) / static_cast<double>(n);
}

double prevalence_difference(const std::vector<int>& labels) {
  std::uint64_t pos = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw InvalidInput("labels must be 0 or 1");
    pos += static_cast<std::uint64_t>(y);
  }
  return prevalence_difference(pos, labels.size() - pos);
}

std::string csv_header() {
  return "oa,oe,aa,ae,sensitivity,specificity,precision,f_measure,g_mean";
}

std::string to_csv_row(const MetricsReport& r) {
  std::string out;
  for (double v : {r.oa, r.oe, r.aa, r.ae, r.sensitivity, r.specificity, r.precision, r.f_measure,
                   r.g_mean}) {
    if (!out.empty()) out += ',';
    out += csv::format_double(v);
  }
  return out;
}

MetricsReport mean_report(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) throw InvalidInput("mean of no reports");
  MetricsReport m;
  double n1 = 0.0, n2 = 0.0;
  for (const auto& r : reports) {
    m.oa += r.oa;
    m.oe += r.oe;
    m.aa += r.aa;
    m.ae += r.ae;
    m.sensitivity += r.sensitivity;
    m.specificity += r.specificity;
    m.precision += r.precision;
    m.f_measure += r.f_measure;
    m.g_mean += r.g_mean;
    n1 += static_cast<double>(r.n1);
    n2 += static_cast<double>(r.n2);
    m.degenerate.sensitivity |= r.degenerate.sensitivity;
    m.degenerate.specificity |= r.degenerate.specificity;
    m.degenerate.precision |= r.degenerate.precision;
    m.degenerate.f_measure |= r.degenerate.f_measure;
  }
  const auto k = static_cast<double>(reports.size());
  for (double* v : {&m.oa, &m.oe, &m.aa, &m.ae, &m.sensitivity, &m.specificity, &m.precision,
                    &m.f_measure, &m.g_mean}) {
    *v /= k;
  }
  m.n1 = static_cast<std::uint64_t>(std::llround(n1 / k));
  m.n2 = static_cast<std::uint64_t>(std::llround(n2 / k));
  return m;
}

}  // namespace qsep::metrics
