// src/localize.cc

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

#include "mcfe/localize.h"

#include <algorithm>
#include <cmath>

#include "mcfe/fft.h"

namespace mcfe {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kPhatFloor = 1e-12;

void CheckFrames(const Spectrogram &spec, const std::vector<int> &frames) {
  if (frames.empty()) throw InvalidInputError("frame range is empty");
  for (int t : frames) {
    if (t < 0 || t >= spec.num_frames()) {
      throw InvalidInputError("frame index " + std::to_string(t) +
                              " out of range");
    }
  }
}

struct Band {
  int lo;  // first bin, inclusive
  int hi;  // last bin, inclusive
};

Band BandBins(const Spectrogram &spec, const LocalizationOptions &options) {
  const double hz_per_bin =
      static_cast<double>(spec.sample_rate) / spec.params.fft_size;
  int lo = static_cast<int>(std::ceil(options.band_lo_hz / hz_per_bin));
  int hi = static_cast<int>(std::floor(options.band_hi_hz / hz_per_bin));
  lo = std::max(lo, 1);  // skip DC
  hi = std::min(hi, spec.num_bins() - 1);
  if (hi < lo) {
    throw InvalidInputError("localization band is empty for this setup");
  }
  return {lo, hi};
}

Vec3 Centroid(const std::vector<Vec3> &geometry) {
  Vec3 c = Vec3::Zero();
  for (const Vec3 &m : geometry) c += m;
  return c / static_cast<double>(geometry.size());
}

}  // namespace

std::string SelectionCriterionName(SelectionCriterion c) {
  return c == SelectionCriterion::kEnergyPhase ? "energy-phase" : "max-snr";
}

SelectionCriterion SelectionCriterionFromName(const std::string &name) {
  if (name == "energy-phase" || name == "energy_phase") {
    return SelectionCriterion::kEnergyPhase;
  }
  if (name == "max-snr" || name == "max_snr") {
    return SelectionCriterion::kMaxSnr;
  }
  throw InvalidInputError("unknown selection criterion '" + name +
                          "' (expected energy-phase or max-snr)");
}

std::vector<int> ActiveFrames(const SegmentAnnotation &annotation,
                              const Spectrogram &spec) {
  std::vector<int> frames;
  for (int t = 0; t < spec.num_frames(); ++t) {
    if (annotation.ActiveAt(spec.frame_time_s(t))) frames.push_back(t);
  }
  return frames;
}

std::vector<int> SoloFrames(const std::vector<SegmentAnnotation> &annotations,
                            const std::string &speaker,
                            const Spectrogram &spec) {
  std::vector<int> frames;
  for (int t = 0; t < spec.num_frames(); ++t) {
    const double time = spec.frame_time_s(t);
    bool target_on = false, other_on = false;
    for (const auto &ann : annotations) {
      if (!ann.ActiveAt(time)) continue;
      if (ann.speaker == speaker) {
        target_on = true;
      } else {
        other_on = true;
        break;
      }
    }
    if (target_on && !other_on) frames.push_back(t);
  }
  return frames;
}

double GccPhat(const Spectrogram &spec, int ch_a, int ch_b,
               const std::vector<int> &frames, double max_tdoa_s) {
  if (ch_a == ch_b) {
    throw InvalidInputError("gcc-phat needs two distinct channels");
  }
  if (ch_a < 0 || ch_b < 0 || ch_a >= spec.num_channels() ||
      ch_b >= spec.num_channels()) {
    throw InvalidInputError("channel index out of range");
  }
  CheckFrames(spec, frames);

  const int n = spec.params.fft_size;
  const int n_bins = spec.num_bins();
  std::vector<Complex> cross(n_bins, Complex(0.0, 0.0));
  for (int t : frames) {
    for (int f = 0; f < n_bins; ++f) {
      cross[f] += std::conj(spec.data(ch_a, t, f)) * spec.data(ch_b, t, f);
    }
  }

  double peak_mag = 0.0;
  for (const Complex &v : cross) peak_mag = std::max(peak_mag, std::abs(v));
  if (peak_mag < kPhatFloor) {
    throw NumericalError("gcc-phat: insufficient energy in selected frames");
  }

  // Phase transform, then back to a lag-domain correlation.
  std::vector<Complex> full(n, Complex(0.0, 0.0));
  for (int f = 0; f < n_bins; ++f) {
    const Complex v = cross[f] / std::max(std::abs(cross[f]), kPhatFloor);
    if (f == 0 || f == n / 2) {
      full[f] = Complex(v.real(), 0.0);
    } else {
      full[f] = v;
      full[n - f] = std::conj(v);
    }
  }
  Fft(&full, true);

  int max_lag = n / 2 - 1;
  if (max_tdoa_s > 0.0) {
    max_lag = std::min(
        max_lag, static_cast<int>(std::ceil(max_tdoa_s * spec.sample_rate)));
  }
  int best_lag = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int lag = -max_lag; lag <= max_lag; ++lag) {
    const int idx = lag >= 0 ? lag : n + lag;
    const double v = full[idx].real();
    if (v > best_val) {
      best_val = v;
      best_lag = lag;
    }
  }

  // Parabolic refinement around the integer peak.
  double delta = 0.0;
  if (best_lag > -max_lag && best_lag < max_lag) {
    auto at = [&](int lag) {
      return full[lag >= 0 ? lag : n + lag].real();
    };
    const double y0 = at(best_lag - 1), y1 = at(best_lag), y2 = at(best_lag + 1);
    const double denom = y0 - 2.0 * y1 + y2;
    if (std::abs(denom) > 1e-30) delta = 0.5 * (y0 - y2) / denom;
    delta = std::clamp(delta, -0.5, 0.5);
  }
  return (best_lag + delta) / spec.sample_rate;
}

int SrpMap::ArgmaxIndex() const {
  int best = 0;
  for (size_t i = 1; i < power.size(); ++i) {
    if (power[i] > power[best]) best = static_cast<int>(i);
  }
  return best;
}

SrpMap ComputeSrpMap(const Spectrogram &spec,
                     const std::vector<Vec3> &geometry,
                     const std::vector<int> &frames,
                     const LocalizationOptions &options) {
  if (geometry.size() < 2) {
    throw InvalidInputError("srp-phat needs geometry with >= 2 microphones");
  }
  if (static_cast<int>(geometry.size()) != spec.num_channels()) {
    throw InvalidInputError("geometry does not match channel count");
  }
  if (options.grid_deg <= 0.0 || options.grid_deg > 90.0) {
    throw InvalidInputError("grid_deg must lie in (0, 90]");
  }
  CheckFrames(spec, frames);

  const int channels = spec.num_channels();
  const Band band = BandBins(spec, options);
  const int n_band = band.hi - band.lo + 1;
  const Vec3 centroid = Centroid(geometry);

  // Per-bin phase-normalized cross-spectral sums and magnitude weights.
  std::vector<Eigen::MatrixXcd> cross(
      n_band, Eigen::MatrixXcd::Zero(channels, channels));
  Eigen::VectorXd weight = Eigen::VectorXd::Zero(n_band);
  Eigen::VectorXcd v(channels);
  for (int t : frames) {
    for (int b = 0; b < n_band; ++b) {
      const int f = band.lo + b;
      double mag_sum = 0.0;
      for (int c = 0; c < channels; ++c) {
        const Complex x = spec.data(c, t, f);
        const double mag = std::abs(x);
        v[c] = x / std::max(mag, kPhatFloor);
        mag_sum += mag;
      }
      cross[b].noalias() += v * v.adjoint();
      weight[b] += mag_sum / channels;
    }
  }
  const double mean_weight = weight.mean();
  if (mean_weight > 0.0) {
    weight /= mean_weight;
  } else {
    weight.setOnes();
  }

  const int n_az =
      std::max(1, static_cast<int>(std::lround(360.0 / options.grid_deg)));
  SrpMap map;
  map.azimuth_deg.resize(n_az);
  map.power.assign(n_az, 0.0);

  const double scale = 1.0 / static_cast<double>(frames.size());
  Eigen::VectorXcd steer(channels);
  for (int a = 0; a < n_az; ++a) {
    const double az = a * options.grid_deg;
    map.azimuth_deg[a] = az;
    const double rad = az * kPi / 180.0;
    const Vec3 u(std::cos(rad), std::sin(rad), 0.0);
    double acc = 0.0;
    for (int b = 0; b < n_band; ++b) {
      const int f = band.lo + b;
      const double freq = spec.bin_hz(f);
      for (int c = 0; c < channels; ++c) {
        const double tau =
            (geometry[c] - centroid).dot(u) / options.speed_of_sound;
        const double phase = 2.0 * kPi * freq * tau;
        steer[c] = Complex(std::cos(phase), std::sin(phase));
      }
      // steer^H R steer = sum over mic pairs of the aligned cross-spectra
      // (plus the constant diagonal), guaranteed real non-negative.
      const Complex quad = steer.adjoint() * cross[b] * steer;
      acc += weight[b] * quad.real();
    }
    map.power[a] = std::max(0.0, acc * scale);
  }
  return map;
}

SpeakerLocalization LocalizeSources(
    const Spectrogram &spec, const std::vector<Vec3> &geometry,
    const std::vector<SegmentAnnotation> &annotations,
    const LocalizationOptions &options) {
  SpeakerLocalization result;
  for (const auto &ann : annotations) {
    std::vector<int> frames = SoloFrames(annotations, ann.speaker, spec);
    if (frames.empty()) {
      frames = ActiveFrames(ann, spec);
      if (!frames.empty()) result.used_fallback.insert(ann.speaker);
    }
    if (frames.empty()) {
      result.errors[ann.speaker] = "no active frames";
      continue;
    }
    try {
      SrpMap map = ComputeSrpMap(spec, geometry, frames, options);
      DoaEstimate est;
      const int idx = map.ArgmaxIndex();
      est.azimuth_deg = map.azimuth_deg[idx];
      est.score = map.power[idx];
      est.source_id = ann.speaker;
      result.doas[ann.speaker] = est;
    } catch (const Error &e) {
      result.errors[ann.speaker] = e.what();
    }
  }
  return result;
}

ChannelSelection SelectChannelEnergyPhase(
    const Spectrogram &spec, const std::vector<Vec3> &geometry,
    const std::vector<SegmentAnnotation> &annotations,
    const std::string &speaker, const LocalizationOptions &options) {
  if (static_cast<int>(geometry.size()) != spec.num_channels()) {
    throw InvalidInputError("geometry does not match channel count");
  }
  const SegmentAnnotation *target = nullptr;
  for (const auto &ann : annotations) {
    if (ann.speaker == speaker) target = &ann;
  }
  if (target == nullptr) {
    throw InvalidInputError("speaker '" + speaker + "' not in annotations");
  }

  ChannelSelection sel;
  sel.speaker = speaker;
  sel.criterion = SelectionCriterion::kEnergyPhase;

  std::vector<int> frames = SoloFrames(annotations, speaker, spec);
  if (frames.empty()) {
    frames = ActiveFrames(*target, spec);
    sel.fallback_all_frames = true;
  }
  if (frames.empty()) {
    throw InvalidInputError("speaker '" + speaker + "' has no active frames");
  }

  SrpMap map = ComputeSrpMap(spec, geometry, frames, options);
  const double doa = map.ArgmaxAzimuth();

  const int channels = spec.num_channels();
  const Band band = BandBins(spec, options);
  const Vec3 centroid = Centroid(geometry);
  const double rad = doa * kPi / 180.0;
  const Vec3 u(std::cos(rad), std::sin(rad), 0.0);
  const int ref = 0;
  const double tau_ref =
      (geometry[ref] - centroid).dot(u) / options.speed_of_sound;

  sel.per_channel_scores = Eigen::VectorXd::Zero(channels);
  for (int c = 0; c < channels; ++c) {
    double energy = 0.0;
    for (int t : frames) {
      for (int f = 0; f < spec.num_bins(); ++f) {
        energy += std::norm(spec.data(c, t, f));
      }
    }
    energy /= static_cast<double>(frames.size());

    // Mean cosine between the observed phase of channel c relative to the
    // reference and the phase the DOA predicts, mapped to [0, 1].
    double cos_sum = 0.0;
    long cos_count = 0;
    const double tau_c =
        (geometry[c] - centroid).dot(u) / options.speed_of_sound;
    for (int t : frames) {
      for (int f = band.lo; f <= band.hi; ++f) {
        const Complex xc = spec.data(c, t, f);
        const Complex xr = spec.data(ref, t, f);
        const Complex prod = xc * std::conj(xr);
        const double mag = std::abs(prod);
        if (mag < kPhatFloor) continue;
        const double predicted =
            2.0 * kPi * spec.bin_hz(f) * (tau_c - tau_ref);
        const Complex pred(std::cos(predicted), std::sin(predicted));
        cos_sum += (prod / mag * std::conj(pred)).real();
        ++cos_count;
      }
    }
    const double mean_cos = cos_count > 0 ? cos_sum / cos_count : 0.0;
    const double coherence = 0.5 * (1.0 + mean_cos);
    sel.per_channel_scores[c] = energy * coherence;
  }

  int best = 0;
  for (int c = 1; c < channels; ++c) {
    if (sel.per_channel_scores[c] > sel.per_channel_scores[best]) best = c;
  }
  sel.channel_index = best;
  return sel;
}

ChannelSelection SelectChannelMaxSnr(
    const Spectrogram &spec,
    const std::vector<SegmentAnnotation> &annotations,
    const std::string &speaker) {
  const SegmentAnnotation *target = nullptr;
  for (const auto &ann : annotations) {
    if (ann.speaker == speaker) target = &ann;
  }
  if (target == nullptr) {
    throw InvalidInputError("speaker '" + speaker + "' not in annotations");
  }

  std::vector<int> active = ActiveFrames(*target, spec);
  if (active.empty()) {
    throw InvalidInputError("speaker '" + speaker + "' has no active frames");
  }
  std::vector<int> silent;
  for (int t = 0; t < spec.num_frames(); ++t) {
    const double time = spec.frame_time_s(t);
    bool any = false;
    for (const auto &ann : annotations) {
      if (ann.ActiveAt(time)) {
        any = true;
        break;
      }
    }
    if (!any) silent.push_back(t);
  }

  const int channels = spec.num_channels();
  ChannelSelection sel;
  sel.speaker = speaker;
  sel.criterion = SelectionCriterion::kMaxSnr;
  sel.per_channel_scores = Eigen::VectorXd::Zero(channels);

  auto frame_power = [&](int c, int t) {
    double p = 0.0;
    for (int f = 0; f < spec.num_bins(); ++f) p += std::norm(spec.data(c, t, f));
    return p;
  };

  for (int c = 0; c < channels; ++c) {
    double signal = 0.0;
    for (int t : active) signal += frame_power(c, t);
    signal /= static_cast<double>(active.size());

    double noise = 0.0;
    if (!silent.empty()) {
      for (int t : silent) noise += frame_power(c, t);
      noise /= static_cast<double>(silent.size());
    } else {
      // No speaker-free frames: fall back to the quietest 10% of frames.
      std::vector<double> powers(spec.num_frames());
      for (int t = 0; t < spec.num_frames(); ++t) powers[t] = frame_power(c, t);
      std::sort(powers.begin(), powers.end());
      const long take = std::max<long>(1, powers.size() / 10);
      for (long i = 0; i < take; ++i) noise += powers[i];
      noise /= static_cast<double>(take);
    }
    sel.per_channel_scores[c] = signal / std::max(noise, 1e-12);
  }

  int best = 0;
  for (int c = 1; c < channels; ++c) {
    if (sel.per_channel_scores[c] > sel.per_channel_scores[best]) best = c;
  }
  sel.channel_index = best;
  return sel;
}

}  // namespace mcfe
