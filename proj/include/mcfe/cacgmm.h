// include/mcfe/cacgmm.h

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

#ifndef MCFE_CACGMM_H_
#define MCFE_CACGMM_H_

#include <optional>
#include <string>
#include <vector>

#include "mcfe/types.h"

namespace mcfe {

// Binary class-activity over frames; rows are K speakers followed by one
// noise row that is always all ones.
struct ActivityMatrix {
  Eigen::Matrix<uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
      active;                            // (K+1) x frames
  std::vector<std::string> class_labels;  // K speaker labels + "noise"

  int num_classes() const { return static_cast<int>(active.rows()); }
  int num_frames() const { return static_cast<int>(active.cols()); }
};

// Speaker rows are 1 on frames whose centers fall inside any interval
// dilated by context_s on each side; the noise row is all ones.
ActivityMatrix MakeActivityMatrix(
    const std::vector<SegmentAnnotation> &annotations, int n_frames,
    const StftParams &params, int sample_rate, double context_s);

// Per-source soft time-frequency masks; class order matches the activity
// matrix (K speakers + noise).
struct MaskSet {
  Tensor3<double> masks;  // (K+1) x frames x bins, entries in [0, 1]
  std::vector<std::string> class_labels;
};

struct CacgmmState {
  // shape_matrices[k][f] is the C x C Hermitian PD shape of class k at bin
  // f, trace-normalized to C (plus the 1e-6 identity floor).
  std::vector<std::vector<Eigen::MatrixXcd>> shape_matrices;
  // One entry per E-step (n_iter + 1 including the final masking pass),
  // summed over bins. Non-decreasing up to 1e-8 relative slack.
  std::vector<double> log_likelihood_trace;
};

struct CacgmmOptions {
  int n_iter = 20;
  double shape_eps = 1e-6;      // identity floor added after trace norm
  double qform_floor = 1e-10;   // floor on z^H B^-1 z in the density
  double silence_floor = 1e-12; // frames below this norm are skipped
  // Initial responsibilities come from this activity pattern (uniform over
  // active speakers; noise only where no speaker is active). Defaults to
  // the EM activity itself. Passing the undilated annotation activity here
  // anchors each class before the context-extended support takes over.
  std::optional<ActivityMatrix> init_activity;
};

struct CacgmmResult {
  MaskSet masks;
  CacgmmState state;
  std::vector<std::string> warnings;
};

// EM for a complex angular central Gaussian mixture, run independently per
// frequency bin, with time-varying mixture weights fixed to the activity
// matrix. Requires C >= 2 and n_iter >= 1.
CacgmmResult CacgmmEm(const Spectrogram &spec, const ActivityMatrix &activity,
                      const CacgmmOptions &options = {});

}  // namespace mcfe

#endif  // MCFE_CACGMM_H_
