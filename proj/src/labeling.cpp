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

#include "qsep/labeling.hpp"

namespace qsep::state {

std::string to_string(LabelSource source) {
  return source == LabelSource::kPptExact ? "PPT_EXACT" : "CHA_APPROX";
}

GroundTruthLabel label_state(const DensityMatrix& rho, const Labeler& labeler) {
  if (std::holds_alternative<PptExact>(labeler)) {
    if (rho.dim() > 6) {
      throw PolicyError("PPT labeling is only exact for d_a*d_b <= 6, got " + rho.dims().str());
    }
    return {is_ppt(rho) ? 1 : 0, LabelSource::kPptExact};
  }
  const auto& approx = std::get<ChaApprox>(labeler);
  if (!approx.reference) throw InvalidInput("CHA labeling needs a reference hull");
  if (!(approx.reference->dims() == rho.dims())) {
    throw InvalidInput("reference hull dims differ from the state's dims");
  }
  if (!is_ppt(rho)) return {0, LabelSource::kChaApprox};
  const cha::ChaScore score = cha::alpha_max(to_feature(rho), *approx.reference, approx.options);
  return {cha::cha_classify(score), LabelSource::kChaApprox};
}

std::string describe(const Labeler& labeler) {
  if (std::holds_alternative<PptExact>(labeler)) return "ppt";
  const auto& approx = std::get<ChaApprox>(labeler);
  return "cha:" + (approx.reference ? approx.reference->id() : std::string("none"));
}

}  // namespace qsep::state
