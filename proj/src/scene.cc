// src/scene.cc

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

#include "mcfe/scene.h"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include <json.hpp>

#include "mcfe/fft.h"
#include "mcfe/io.h"

namespace mcfe {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMinDistance = 0.1;  // meters, gain floor

// Tail guard so circular wrap-around of the band-limited delay falls
// outside the cut region.
constexpr int kDelayGuardSamples = 64;

}  // namespace

double GaussianRng::Next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller on (0,1] uniforms from the raw 64-bit stream.
  double u1, u2;
  do {
    u1 = (engine_() >> 11) * 0x1.0p-53;
  } while (u1 <= 0.0);
  u2 = (engine_() >> 11) * 0x1.0p-53;
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * kPi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

uint64_t MixSeed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void SceneSpec::Validate() const {
  if (mic_positions.size() < 2) {
    throw InvalidInputError("scene needs at least 2 microphones");
  }
  if (sources.empty()) {
    throw InvalidInputError("scene needs at least 1 source");
  }
  if (sample_rate <= 0) throw InvalidInputError("sample_rate must be > 0");
  if (speed_of_sound <= 0.0) {
    throw InvalidInputError("speed_of_sound must be > 0");
  }
  for (const Vec3 &m : mic_positions) {
    if (!m.allFinite()) {
      throw InvalidInputError("microphone position must be finite");
    }
  }
  for (size_t i = 0; i < sources.size(); ++i) {
    const SourceSpec &src = sources[i];
    if (src.signal.size() == 0) {
      throw InvalidInputError("sources[" + std::to_string(i) +
                              "]: empty source signal");
    }
    if (!src.signal.allFinite() || !src.position.allFinite() ||
        !std::isfinite(src.onset)) {
      throw InvalidInputError("sources[" + std::to_string(i) +
                              "]: non-finite signal, position or onset");
    }
    if (src.onset < 0.0) {
      throw InvalidInputError("sources[" + std::to_string(i) +
                              "]: onset must be >= 0");
    }
    for (const Vec3 &m : mic_positions) {
      if ((src.position - m).norm() == 0.0) {
        throw InvalidInputError("sources[" + std::to_string(i) +
                                "]: position coincides with a microphone");
      }
    }
  }
}

Eigen::VectorXd FractionalDelay(const Eigen::VectorXd &x, double delay_samples,
                                long out_length) {
  if (delay_samples < 0.0) {
    throw InvalidInputError("delay must be non-negative");
  }
  const int n = NextPowerOfTwo(
      std::max<long>(out_length + kDelayGuardSamples,
                     x.size() + static_cast<long>(std::ceil(delay_samples)) +
                         kDelayGuardSamples));
  std::vector<Complex> buf(n, Complex(0.0, 0.0));
  for (long i = 0; i < x.size(); ++i) buf[i] = Complex(x[i], 0.0);
  Fft(&buf, false);
  // Linear phase ramp; conjugate symmetry is imposed explicitly so the
  // output stays exactly real.
  for (int k = 1; k < n / 2; ++k) {
    const double phase = -2.0 * kPi * k * delay_samples / n;
    const Complex ramp(std::cos(phase), std::sin(phase));
    buf[k] *= ramp;
    buf[n - k] = std::conj(buf[k]);
  }
  buf[n / 2] *= std::cos(kPi * delay_samples);
  Fft(&buf, true);
  Eigen::VectorXd out(out_length);
  for (long i = 0; i < out_length; ++i) {
    out[i] = (i < n) ? buf[i].real() : 0.0;
  }
  return out;
}

double AzimuthDeg(const Vec3 &from, const Vec3 &to) {
  double az = std::atan2(to.y() - from.y(), to.x() - from.x()) * 180.0 / kPi;
  if (az < 0.0) az += 360.0;
  return az;
}

SceneTruth Simulate(const SceneSpec &spec) {
  spec.Validate();
  const int n_mics = static_cast<int>(spec.mic_positions.size());
  const int n_sources = static_cast<int>(spec.sources.size());
  const double fs = spec.sample_rate;

  // Scene length: every delayed source must fit.
  long total_len = 0;
  for (const SourceSpec &src : spec.sources) {
    double max_delay_s = 0.0;
    for (const Vec3 &m : spec.mic_positions) {
      max_delay_s = std::max(
          max_delay_s, (src.position - m).norm() / spec.speed_of_sound);
    }
    long end = static_cast<long>(
        std::ceil((src.onset + max_delay_s) * fs)) + src.signal.size();
    total_len = std::max(total_len, end);
  }
  total_len += kDelayGuardSamples;

  SceneTruth truth;
  Vec3 centroid = Vec3::Zero();
  for (const Vec3 &m : spec.mic_positions) centroid += m;
  centroid /= n_mics;

  SampleMatrix mixture = SampleMatrix::Zero(n_mics, total_len);
  for (int s = 0; s < n_sources; ++s) {
    const SourceSpec &src = spec.sources[s];
    MultiChannelWave image;
    image.sample_rate = spec.sample_rate;
    image.samples = SampleMatrix(n_mics, total_len);
    image.geometry = spec.mic_positions;
    for (int m = 0; m < n_mics; ++m) {
      const double dist = (src.position - spec.mic_positions[m]).norm();
      const double delay = src.onset * fs + dist / spec.speed_of_sound * fs;
      const double gain = 1.0 / std::max(dist, kMinDistance);
      Eigen::VectorXd delayed = FractionalDelay(src.signal, delay, total_len);
      image.samples.row(m) = gain * delayed.transpose();
    }
    mixture += image.samples;
    truth.doas_deg.push_back(AzimuthDeg(centroid, src.position));
    truth.images.push_back(std::move(image));
  }

  if (std::isfinite(spec.noise_snr_db)) {
    const double signal_power = mixture.array().square().mean();
    const double noise_power =
        signal_power / std::pow(10.0, spec.noise_snr_db / 10.0);
    const double sigma = std::sqrt(noise_power);
    GaussianRng rng(MixSeed(spec.seed, 0));
    for (int m = 0; m < n_mics; ++m) {
      for (long t = 0; t < total_len; ++t) {
        mixture(m, t) += sigma * rng.Next();
      }
    }
  }

  truth.mixture.samples = std::move(mixture);
  truth.mixture.sample_rate = spec.sample_rate;
  truth.mixture.geometry = spec.mic_positions;

  for (int s = 0; s < n_sources; ++s) {
    std::string label = spec.sources[s].label.empty()
                            ? "spk" + std::to_string(s)
                            : spec.sources[s].label;
    // Channel 0 of the image carries onset plus propagation delay.
    Eigen::VectorXd mono = truth.images[s].samples.row(0).transpose();
    truth.activities.push_back(
        DeriveActivities(mono, spec.sample_rate, label, 0.025, 40.0));
  }
  return truth;
}

SegmentAnnotation DeriveActivities(const Eigen::VectorXd &signal,
                                   int sample_rate,
                                   const std::string &speaker, double frame_s,
                                   double threshold_db) {
  if (frame_s <= 0.0) throw InvalidInputError("frame must be > 0");
  SegmentAnnotation ann;
  ann.speaker = speaker;
  const long frame_len =
      std::max<long>(1, static_cast<long>(std::lround(frame_s * sample_rate)));
  const long n = signal.size();
  if (n == 0) return ann;

  const long n_frames = (n + frame_len - 1) / frame_len;
  std::vector<double> rms(n_frames, 0.0);
  double max_rms = 0.0;
  for (long k = 0; k < n_frames; ++k) {
    const long start = k * frame_len;
    const long len = std::min(frame_len, n - start);
    double acc = 0.0;
    for (long i = 0; i < len; ++i) acc += signal[start + i] * signal[start + i];
    rms[k] = std::sqrt(acc / len);
    max_rms = std::max(max_rms, rms[k]);
  }
  if (max_rms <= 0.0) return ann;  // silent signal: empty annotation

  const double gate = max_rms * std::pow(10.0, -threshold_db / 20.0);
  const double duration = static_cast<double>(n) / sample_rate;
  for (long k = 0; k < n_frames; ++k) {
    if (rms[k] <= gate) continue;
    double start = k * frame_s;
    double end = std::min((k + 1) * frame_s, duration);
    if (!ann.intervals.empty() &&
        start - ann.intervals.back().second < frame_s - 1e-9) {
      ann.intervals.back().second = end;
    } else {
      ann.intervals.emplace_back(start, end);
    }
  }
  return ann;
}

namespace {

const nlohmann::json &RequireField(const nlohmann::json &j,
                                   const std::string &context,
                                   const std::string &name) {
  if (!j.contains(name)) {
    throw InvalidInputError(context + ": missing field '" + name + "'");
  }
  return j.at(name);
}

Vec3 ParseVec3(const nlohmann::json &j, const std::string &context) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() ||
      !j[1].is_number() || !j[2].is_number()) {
    throw InvalidInputError(context + ": expected [x, y, z] in meters");
  }
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

Eigen::VectorXd GenerateSignal(const nlohmann::json &j,
                               const std::string &context, int sample_rate,
                               uint64_t seed, const std::string &base_dir) {
  if (!j.is_object()) {
    throw InvalidInputError(context + ": expected an object with a 'kind'");
  }
  const std::string kind =
      RequireField(j, context, "kind").get<std::string>();
  const double amplitude = j.value("amplitude", 1.0);
  if (kind == "tone") {
    const double freq = RequireField(j, context, "freq_hz").get<double>();
    const double dur = RequireField(j, context, "duration_s").get<double>();
    if (dur <= 0.0) throw InvalidInputError(context + ": duration_s <= 0");
    const long n = static_cast<long>(std::lround(dur * sample_rate));
    Eigen::VectorXd x(n);
    for (long i = 0; i < n; ++i) {
      x[i] = amplitude * std::sin(2.0 * kPi * freq * i / sample_rate);
    }
    return x;
  }
  if (kind == "white-noise") {
    const double dur = RequireField(j, context, "duration_s").get<double>();
    if (dur <= 0.0) throw InvalidInputError(context + ": duration_s <= 0");
    const long n = static_cast<long>(std::lround(dur * sample_rate));
    GaussianRng rng(seed);
    Eigen::VectorXd x(n);
    for (long i = 0; i < n; ++i) x[i] = amplitude * rng.Next();
    return x;
  }
  if (kind == "wav") {
    const std::string rel = RequireField(j, context, "path").get<std::string>();
    std::filesystem::path p(rel);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    MultiChannelWave wave = ReadWav(p.string());
    if (wave.sample_rate != sample_rate) {
      throw InvalidInputError(context + ": WAV sample rate " +
                              std::to_string(wave.sample_rate) +
                              " does not match scene rate " +
                              std::to_string(sample_rate) +
                              " (resampling is not supported)");
    }
    return amplitude * wave.samples.row(0).transpose();
  }
  throw InvalidInputError(context + ": unknown signal kind '" + kind +
                          "' (expected tone, white-noise or wav)");
}

}  // namespace

SceneSpec ParseSceneSpecJson(const std::string &json_text,
                             const std::string &base_dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error &e) {
    throw InvalidInputError(std::string("scene: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) {
    throw InvalidInputError("scene: expected a JSON object");
  }

  SceneSpec spec;
  const auto &mics = RequireField(j, "scene", "mic_positions");
  if (!mics.is_array()) {
    throw InvalidInputError("mic_positions: expected a list");
  }
  for (size_t i = 0; i < mics.size(); ++i) {
    spec.mic_positions.push_back(
        ParseVec3(mics[i], "mic_positions[" + std::to_string(i) + "]"));
  }
  if (spec.mic_positions.size() < 2) {
    throw InvalidInputError(
        "mic_positions: scene needs at least 2 microphones");
  }

  spec.sample_rate = j.value("sample_rate", 16000);
  if (spec.sample_rate <= 0) {
    throw InvalidInputError("sample_rate: must be > 0");
  }
  spec.speed_of_sound = j.value("speed_of_sound", 343.0);
  spec.seed = j.value("seed", 0ULL);

  if (j.contains("noise_snr_db")) {
    const auto &snr = j.at("noise_snr_db");
    if (snr.is_number()) {
      spec.noise_snr_db = snr.get<double>();
    } else if (snr.is_string() &&
               (snr.get<std::string>() == "inf" ||
                snr.get<std::string>() == "+inf")) {
      spec.noise_snr_db = std::numeric_limits<double>::infinity();
    } else if (!snr.is_null()) {
      throw InvalidInputError(
          "noise_snr_db: expected a number, \"inf\" or null");
    }
  }

  const auto &sources = RequireField(j, "scene", "sources");
  if (!sources.is_array() || sources.empty()) {
    throw InvalidInputError("sources: expected a non-empty list");
  }
  for (size_t i = 0; i < sources.size(); ++i) {
    const std::string ctx = "sources[" + std::to_string(i) + "]";
    const auto &sj = sources[i];
    if (!sj.is_object()) throw InvalidInputError(ctx + ": expected an object");
    SourceSpec src;
    src.position = ParseVec3(RequireField(sj, ctx, "position"),
                             ctx + ".position");
    src.onset = sj.value("onset", 0.0);
    src.label = sj.value("label", "spk" + std::to_string(i));
    src.signal = GenerateSignal(RequireField(sj, ctx, "signal"),
                                ctx + ".signal", spec.sample_rate,
                                MixSeed(spec.seed, 1000 + i), base_dir);
    spec.sources.push_back(std::move(src));
  }
  return spec;
}

}  // namespace mcfe
