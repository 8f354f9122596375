// include/mcfe/beamform.h

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

#ifndef MCFE_BEAMFORM_H_
#define MCFE_BEAMFORM_H_

#include <optional>
#include <vector>

#include "mcfe/types.h"

namespace mcfe {

// Placeholder covariance for bins that never saw mask weight.
constexpr double kPsdFallbackEps = 1e-10;

// Per-frequency spatial covariance estimates.
struct SpatialCovariance {
  std::vector<Eigen::MatrixXcd> matrices;  // F matrices, each C x C Hermitian
  Eigen::VectorXd weight;                  // accumulated mask weight per bin
  std::vector<uint8_t> fallback;           // 1 where identity*eps was used

  int num_bins() const { return static_cast<int>(matrices.size()); }
  int num_channels() const {
    return matrices.empty() ? 0 : static_cast<int>(matrices[0].rows());
  }
  // Hermitian within 1e-10, PSD within -1e-8 * trace.
  void Validate() const;
};

enum class MvdrVariant { kSteering, kSouden };

struct BeamformerWeights {
  Eigen::MatrixXcd weights;  // F x C, applied as y = w^H x
  MvdrVariant variant = MvdrVariant::kSouden;
  int ref_channel = -1;                     // souden only
  std::optional<Eigen::MatrixXcd> steering;  // F x C unit vectors, steering only
  std::vector<int> failed_bins;              // fallback weights were used
};

// Batch mask-weighted covariance: Phi(f) = sum_t m(t,f) x x^H / sum_t m(t,f).
SpatialCovariance PsdBatch(const Spectrogram &spec, const TfMatrix &mask);

struct RecursivePsd {
  SpatialCovariance final_psd;            // state after the last frame
  std::vector<SpatialCovariance> per_frame;  // filled when requested
};

// Mask-weighted exponential smoothing per bin:
//   N_t = alpha N_{t-1} + (1-alpha) m_t x x^H,  W_t likewise,
//   Phi_t = N_t / max(W_t, 1e-10).
// Requires 0 < alpha < 1.
RecursivePsd PsdRecursive(const Spectrogram &spec, const TfMatrix &mask,
                          double alpha, bool keep_trajectory = false);

// w = Phi_n^-1 d / (d^H Phi_n^-1 d) per bin, with diagonal loading
// loading * trace/C. Bins that stay singular fall back to w = d and are
// listed in failed_bins.
BeamformerWeights MvdrSteering(const SpatialCovariance &phi_noise,
                               const Eigen::MatrixXcd &steering,
                               double loading = 1e-6);

// w = (Phi_n^-1 Phi_x / trace(Phi_n^-1 Phi_x)) e_ref per bin. Near-zero
// trace falls back to the reference-channel passthrough weight.
BeamformerWeights MvdrSouden(const SpatialCovariance &phi_target,
                             const SpatialCovariance &phi_noise,
                             int ref_channel, double loading = 1e-6);

// y(t,f) = w(f)^H x(t,f); returns a single-channel spectrogram.
Spectrogram ApplyBeamformer(const BeamformerWeights &weights,
                            const Spectrogram &spec);

// Far-field unit steering vectors for every bin, relative to the array
// centroid: d_m(f) = exp(+j 2 pi f (r_m - r_bar) . u / c) / sqrt(C).
Eigen::MatrixXcd PlaneWaveSteering(const StftParams &params, int sample_rate,
                                   const std::vector<Vec3> &geometry,
                                   double azimuth_deg,
                                   double speed_of_sound = 343.0);

}  // namespace mcfe

#endif  // MCFE_BEAMFORM_H_
