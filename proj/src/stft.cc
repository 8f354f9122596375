// src/stft.cc

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

#include "mcfe/stft.h"

#include <algorithm>
#include <cmath>

#include "mcfe/fft.h"

namespace mcfe {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kOlaFloor = 1e-10;

// Reflected index into [0, n) without repeating the edge sample.
inline long ReflectIndex(long i, long n) {
  if (i < 0) i = -i;
  if (i >= n) i = 2 * n - 2 - i;
  return i;
}

}  // namespace

std::vector<double> MakeWindow(WindowKind kind, int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    double hann = 0.5 * (1.0 - std::cos(2.0 * kPi * i / n));
    w[i] = (kind == WindowKind::kSqrtHann) ? std::sqrt(hann) : hann;
  }
  return w;
}

double ColaDeviation(const StftParams &params) {
  const int n = params.fft_size;
  const int hop = params.hop;
  std::vector<double> w = MakeWindow(params.window, n);
  // Interior sample of an infinite frame sequence: accumulate all shifts
  // of w_a * w_s that touch positions [0, hop).
  std::vector<double> sum(hop, 0.0);
  for (int shift = 0; shift < n; shift += hop) {
    for (int i = 0; i < hop; ++i) {
      int idx = shift + i;
      if (idx < n) sum[i] += w[idx] * w[idx];
    }
  }
  double mean = 0.0;
  for (double v : sum) mean += v;
  mean /= hop;
  if (mean <= 0.0) return 1.0;
  double dev = 0.0;
  for (double v : sum) dev = std::max(dev, std::abs(v - mean));
  return dev / mean;
}

int NumStftFrames(long num_samples, const StftParams &params) {
  return static_cast<int>(num_samples / params.hop) + 1;
}

Spectrogram Stft(const MultiChannelWave &wave, const StftParams &params) {
  params.Validate();
  wave.Validate();
  const int n = params.fft_size;
  const long t_len = wave.num_samples();
  if (t_len < n) {
    throw InvalidInputError(
        "signal too short for one frame: " + std::to_string(t_len) +
        " samples < fft_size " + std::to_string(n));
  }

  const int channels = wave.num_channels();
  const int n_frames = NumStftFrames(t_len, params);
  const int n_bins = params.num_bins();
  const int half = n / 2;
  const std::vector<double> window = MakeWindow(params.window, n);

  Spectrogram spec;
  spec.data = Tensor3<Complex>(channels, n_frames, n_bins);
  spec.params = params;
  spec.sample_rate = wave.sample_rate;

  std::vector<double> frame(n);
  for (int c = 0; c < channels; ++c) {
    const double *x = wave.samples.row(c).data();
    for (int t = 0; t < n_frames; ++t) {
      const long start = static_cast<long>(t) * params.hop - half;
      for (int i = 0; i < n; ++i) {
        frame[i] = x[ReflectIndex(start + i, t_len)] * window[i];
      }
      std::vector<Complex> bins = Rfft(frame.data(), n);
      for (int f = 0; f < n_bins; ++f) spec.data(c, t, f) = bins[f];
    }
  }
  return spec;
}

MultiChannelWave Istft(const Spectrogram &spec, long target_length) {
  spec.Validate();
  if (target_length < 0) {
    throw InvalidInputError("target_length must be >= 0");
  }
  const int n = spec.params.fft_size;
  const int hop = spec.params.hop;
  const int half = n / 2;
  const int channels = spec.num_channels();
  const int n_frames = spec.num_frames();
  const int n_bins = spec.num_bins();
  const std::vector<double> window = MakeWindow(spec.params.window, n);

  const long padded_len = static_cast<long>(n_frames - 1) * hop + n;
  std::vector<double> den(padded_len, 0.0);
  for (int t = 0; t < n_frames; ++t) {
    const long start = static_cast<long>(t) * hop;
    for (int i = 0; i < n; ++i) den[start + i] += window[i] * window[i];
  }

  MultiChannelWave wave;
  wave.samples = SampleMatrix::Zero(channels, target_length);
  wave.sample_rate = spec.sample_rate;

  std::vector<Complex> bins(n_bins);
  std::vector<double> acc(padded_len);
  for (int c = 0; c < channels; ++c) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int t = 0; t < n_frames; ++t) {
      for (int f = 0; f < n_bins; ++f) bins[f] = spec.data(c, t, f);
      std::vector<double> frame = Irfft(bins.data(), n);
      const long start = static_cast<long>(t) * hop;
      for (int i = 0; i < n; ++i) acc[start + i] += window[i] * frame[i];
    }
    double *out = wave.samples.row(c).data();
    const long copy_len = std::min(target_length, padded_len - half);
    for (long i = 0; i < copy_len; ++i) {
      double d = den[half + i];
      out[i] = (d > kOlaFloor) ? acc[half + i] / d : 0.0;
    }
  }
  return wave;
}

}  // namespace mcfe
