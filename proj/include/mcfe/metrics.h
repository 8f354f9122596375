// include/mcfe/metrics.h

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

#ifndef MCFE_METRICS_H_
#define MCFE_METRICS_H_

#include <optional>
#include <string>

#include "mcfe/types.h"

namespace mcfe {

// Reports are capped at +/- 60 dB to keep them finite.
constexpr double kSiSdrCapDb = 60.0;

// Scale-invariant SDR: project the estimate onto the reference, ratio of
// projection energy to residual energy in dB. Lengths must match and the
// reference must not be all-zero.
double SiSdr(const Eigen::VectorXd &estimate, const Eigen::VectorXd &reference);

// Same, but a length mismatch truncates both to the shorter and sets
// *truncated instead of throwing.
double SiSdrTruncated(const Eigen::VectorXd &estimate,
                      const Eigen::VectorXd &reference, bool *truncated);

// SNR gain of the enhanced signal over a raw channel, both measured
// against the oracle target image: SiSdr(enhanced) - SiSdr(raw).
double SnrGain(const Eigen::VectorXd &enhanced, const Eigen::VectorXd &raw,
               const Eigen::VectorXd &target_image);

struct EvalReport {
  double si_sdr_db = 0.0;
  double si_sdr_improvement_db = 0.0;
  double snr_gain_db = 0.0;
  std::optional<double> doa_error_deg;
  std::optional<bool> channel_selection_correct;
  bool length_truncated = false;

  std::string ToJson() const;
};

}  // namespace mcfe

#endif  // MCFE_METRICS_H_
