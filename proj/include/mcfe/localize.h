// include/mcfe/localize.h

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

#ifndef MCFE_LOCALIZE_H_
#define MCFE_LOCALIZE_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mcfe/types.h"

namespace mcfe {

struct DoaEstimate {
  double azimuth_deg = 0.0;  // [0, 360)
  double score = 0.0;        // accumulated steered power, >= 0
  std::optional<std::string> source_id;
};

enum class SelectionCriterion { kEnergyPhase, kMaxSnr };

std::string SelectionCriterionName(SelectionCriterion c);
SelectionCriterion SelectionCriterionFromName(const std::string &name);

struct ChannelSelection {
  std::string speaker;
  int channel_index = 0;  // argmax of per_channel_scores, lowest on ties
  SelectionCriterion criterion = SelectionCriterion::kEnergyPhase;
  Eigen::VectorXd per_channel_scores;
  // Set when no target-only frames existed and all target-active frames
  // were used instead.
  bool fallback_all_frames = false;
};

struct LocalizationOptions {
  double grid_deg = 1.0;
  double band_lo_hz = 300.0;   // speech band, avoids spatial aliasing
  double band_hi_hz = 4000.0;
  double speed_of_sound = 343.0;
};

// Frames whose centers fall inside the speaker's intervals.
std::vector<int> ActiveFrames(const SegmentAnnotation &annotation,
                              const Spectrogram &spec);
// Frames where `speaker` is the only active one.
std::vector<int> SoloFrames(const std::vector<SegmentAnnotation> &annotations,
                            const std::string &speaker,
                            const Spectrogram &spec);

// Phase-transform TDOA of channel b relative to channel a (positive when b
// hears the source later), from the cross-power spectrum averaged over the
// given frames, refined by parabolic interpolation. max_tdoa_s <= 0 leaves
// the search range at +/- fft_size/2 samples.
double GccPhat(const Spectrogram &spec, int ch_a, int ch_b,
               const std::vector<int> &frames, double max_tdoa_s = 0.0);

struct SrpMap {
  std::vector<double> azimuth_deg;
  std::vector<double> power;
  int ArgmaxIndex() const;
  double ArgmaxAzimuth() const { return azimuth_deg[ArgmaxIndex()]; }
};

// Steered-response power over an azimuth grid: per-channel phase-normalized
// spectra are aligned with plane-wave steering and accumulated over mic
// pairs and frequency bins, weighted by per-bin magnitude (normalized to
// unit mean over the band).
SrpMap ComputeSrpMap(const Spectrogram &spec, const std::vector<Vec3> &geometry,
                     const std::vector<int> &frames,
                     const LocalizationOptions &options = {});

struct SpeakerLocalization {
  std::map<std::string, DoaEstimate> doas;
  std::map<std::string, std::string> errors;  // per-speaker failures
  std::set<std::string> used_fallback;  // localized on all active frames
};

// Per speaker, SRP restricted to frames where that speaker is the only
// active one (falling back to all of its active frames).
SpeakerLocalization LocalizeSources(
    const Spectrogram &spec, const std::vector<Vec3> &geometry,
    const std::vector<SegmentAnnotation> &annotations,
    const LocalizationOptions &options = {});

// Channel score = energy over target-only frames times a [0,1] coherence
// factor between observed inter-channel phases and the phases the target
// DOA predicts.
ChannelSelection SelectChannelEnergyPhase(
    const Spectrogram &spec, const std::vector<Vec3> &geometry,
    const std::vector<SegmentAnnotation> &annotations,
    const std::string &speaker, const LocalizationOptions &options = {});

// Baseline: mean power over speaker-active frames over mean power over
// no-speaker frames (quietest 10% of frames when none exist).
ChannelSelection SelectChannelMaxSnr(
    const Spectrogram &spec,
    const std::vector<SegmentAnnotation> &annotations,
    const std::string &speaker);

}  // namespace mcfe

#endif  // MCFE_LOCALIZE_H_
