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

#ifndef QSEP_LABELING_HPP_
#define QSEP_LABELING_HPP_

#include <memory>
#include <string>
#include <variant>

#include "qsep/chacore.hpp"
#include "qsep/statekit.hpp"

namespace qsep::state {

enum class LabelSource { kPptExact, kChaApprox };

std::string to_string(LabelSource source);

// y = 1 separable, y = 0 entangled.
struct GroundTruthLabel {
  int y = 0;
  LabelSource source = LabelSource::kPptExact;
};

// Exact PPT verdict; valid only for d_a * d_b <= 6.
struct PptExact {};

// NPT states are entangled; PPT states are separable iff the reference hull
// certifies them (alpha >= 1). Keep the reference hull apart from any hull
// whose scores are used as classifier features.
struct ChaApprox {
  std::shared_ptr<const cha::HullModel> reference;
  cha::ChaOptions options;
};

using Labeler = std::variant<PptExact, ChaApprox>;

// Throws PolicyError for PptExact above 6 dimensions and InvalidInput when the
// reference hull is missing or has other dims.
GroundTruthLabel label_state(const DensityMatrix& rho, const Labeler& labeler);

// "ppt" or "cha:<hull id>".
std::string describe(const Labeler& labeler);

}  // namespace qsep::state

#endif  // QSEP_LABELING_HPP_
