// src/metrics.cc

// Copyright 2026  The mcfe authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "mcfe/metrics.h"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace mcfe {

double SiSdr(const Eigen::VectorXd &estimate,
             const Eigen::VectorXd &reference) {
  if (estimate.size() != reference.size()) {
    throw InvalidInputError("SI-SDR: length mismatch (" +
                            std::to_string(estimate.size()) + " vs " +
                            std::to_string(reference.size()) + ")");
  }
  if (estimate.size() < 1) {
    throw InvalidInputError("SI-SDR: empty signals");
  }
  const double ref_energy = reference.squaredNorm();
  if (ref_energy <= 0.0) {
    throw InvalidInputError("SI-SDR: reference is all-zero");
  }
  const double alpha = estimate.dot(reference) / ref_energy;
  const double target_energy = alpha * alpha * ref_energy;
  const double residual_energy = (estimate - alpha * reference).squaredNorm();
  if (target_energy <= 0.0) return -kSiSdrCapDb;
  if (residual_energy <= 0.0) return kSiSdrCapDb;
  const double db = 10.0 * std::log10(target_energy / residual_energy);
  return std::clamp(db, -kSiSdrCapDb, kSiSdrCapDb);
}

double SiSdrTruncated(const Eigen::VectorXd &estimate,
                      const Eigen::VectorXd &reference, bool *truncated) {
  if (estimate.size() == reference.size()) {
    if (truncated) *truncated = false;
    return SiSdr(estimate, reference);
  }
  const long n = std::min(estimate.size(), reference.size());
  if (truncated) *truncated = true;
  return SiSdr(estimate.head(n), reference.head(n));
}

double SnrGain(const Eigen::VectorXd &enhanced, const Eigen::VectorXd &raw,
               const Eigen::VectorXd &target_image) {
  return SiSdrTruncated(enhanced, target_image, nullptr) -
         SiSdrTruncated(raw, target_image, nullptr);
}

std::string EvalReport::ToJson() const {
  nlohmann::json j;
  j["si_sdr_db"] = si_sdr_db;
  j["si_sdr_improvement_db"] = si_sdr_improvement_db;
  j["snr_gain_db"] = snr_gain_db;
  if (doa_error_deg) {
    j["doa_error_deg"] = *doa_error_deg;
  } else {
    j["doa_error_deg"] = nullptr;
  }
  if (channel_selection_correct) {
    j["channel_selection_correct"] = *channel_selection_correct;
  } else {
    j["channel_selection_correct"] = nullptr;
  }
  j["length_truncated"] = length_truncated;
  return j.dump(2);
}

}  // namespace mcfe
