// include/mcfe/scene.h

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

#ifndef MCFE_SCENE_H_
#define MCFE_SCENE_H_

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "mcfe/types.h"

namespace mcfe {

// Deterministic Gaussian stream: mt19937_64 + explicit Box-Muller, so the
// sequence does not depend on the standard library's distribution choices.
class GaussianRng {
 public:
  explicit GaussianRng(uint64_t seed) : engine_(seed), has_spare_(false) {}
  double Next();

 private:
  std::mt19937_64 engine_;
  bool has_spare_;
  double spare_ = 0.0;
};

// splitmix64-style stream derivation, so sub-streams of one scene seed
// never collide.
uint64_t MixSeed(uint64_t seed, uint64_t stream);

struct SourceSpec {
  Eigen::VectorXd signal;  // mono, at the scene sample rate
  Vec3 position;           // meters
  double onset = 0.0;      // seconds
  std::string label;       // defaults to spk<i>
};

struct SceneSpec {
  std::vector<Vec3> mic_positions;
  std::vector<SourceSpec> sources;
  // SNR of the summed source images against additive white noise;
  // +inf disables the noise term.
  double noise_snr_db = std::numeric_limits<double>::infinity();
  int sample_rate = 16000;
  double speed_of_sound = 343.0;
  uint64_t seed = 0;

  void Validate() const;
};

struct SceneTruth {
  MultiChannelWave mixture;
  std::vector<MultiChannelWave> images;  // per-source contribution at every mic
  std::vector<double> doas_deg;          // azimuth w.r.t. array centroid
  std::vector<SegmentAnnotation> activities;
};

// Free-field propagation: per source-to-mic path a d/c delay applied as an
// exact frequency-domain phase ramp plus a 1/max(d, 0.1 m) gain, then white
// Gaussian noise at noise_snr_db, all deterministic in the seed.
SceneTruth Simulate(const SceneSpec &spec);

// Frame-RMS gate: intervals where RMS exceeds (max RMS - threshold_db),
// with gaps shorter than one frame merged. A silent signal yields an
// empty annotation.
SegmentAnnotation DeriveActivities(const Eigen::VectorXd &signal,
                                   int sample_rate,
                                   const std::string &speaker, double frame_s,
                                   double threshold_db);

// Circular band-limited fractional delay of x by delay_samples, evaluated
// on a zero-padded buffer and cut to out_length samples.
Eigen::VectorXd FractionalDelay(const Eigen::VectorXd &x, double delay_samples,
                                long out_length);

// Azimuth of `to` as seen from `from`, degrees in [0, 360).
double AzimuthDeg(const Vec3 &from, const Vec3 &to);

// SceneSpec from its JSON document. Source signals may be inline
// generators ("tone", "white-noise") or WAV paths relative to base_dir.
SceneSpec ParseSceneSpecJson(const std::string &json_text,
                             const std::string &base_dir);

}  // namespace mcfe

#endif  // MCFE_SCENE_H_
