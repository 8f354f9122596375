// src/types.cc

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

#include "mcfe/types.h"

#include <cmath>

#include "mcfe/fft.h"
#include "mcfe/stft.h"

namespace mcfe {

void MultiChannelWave::Validate() const {
  if (samples.rows() < 1) throw InvalidInputError("wave has no channels");
  if (sample_rate <= 0) throw InvalidInputError("sample_rate must be > 0");
  if (geometry && static_cast<int>(geometry->size()) != num_channels()) {
    throw InvalidInputError("geometry size (" +
                            std::to_string(geometry->size()) +
                            ") does not match channel count (" +
                            std::to_string(num_channels()) + ")");
  }
  if (!samples.allFinite()) {
    throw InvalidInputError("wave contains non-finite samples");
  }
}

std::string WindowKindName(WindowKind kind) {
  switch (kind) {
    case WindowKind::kSqrtHann:
      return "sqrt-hann";
    case WindowKind::kHann:
      return "hann";
  }
  return "sqrt-hann";
}

WindowKind WindowKindFromName(const std::string &name) {
  if (name == "sqrt-hann" || name == "sqrt_hann") return WindowKind::kSqrtHann;
  if (name == "hann") return WindowKind::kHann;
  throw InvalidInputError("unknown window kind '" + name +
                          "' (expected sqrt-hann or hann)");
}

void StftParams::Validate() const {
  if (fft_size < 8 || !IsPowerOfTwo(fft_size)) {
    throw InvalidInputError("fft_size must be a power of two >= 8, got " +
                            std::to_string(fft_size));
  }
  if (hop <= 0 || fft_size % hop != 0) {
    throw InvalidInputError("hop must divide fft_size, got hop=" +
                            std::to_string(hop) +
                            " fft_size=" + std::to_string(fft_size));
  }
  double deviation = ColaDeviation(*this);
  if (deviation > 1e-10) {
    throw InvalidInputError(
        "window/hop pair violates constant overlap-add (deviation " +
        std::to_string(deviation) + ")");
  }
}

void Spectrogram::Validate() const {
  params.Validate();
  if (num_bins() != params.num_bins()) {
    throw InvalidInputError("spectrogram has " + std::to_string(num_bins()) +
                            " bins but params imply " +
                            std::to_string(params.num_bins()));
  }
  if (sample_rate <= 0) throw InvalidInputError("sample_rate must be > 0");
  const Complex *p = data.data();
  for (size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(p[i].real()) || !std::isfinite(p[i].imag())) {
      throw InvalidInputError("spectrogram contains non-finite values");
    }
  }
}

void SegmentAnnotation::Validate() const {
  double last_end = -1.0;
  for (const auto &[start, end] : intervals) {
    if (!(end > start) || start < 0.0) {
      throw InvalidInputError("speaker '" + speaker +
                              "': interval must satisfy 0 <= start < end");
    }
    if (start < last_end) {
      throw InvalidInputError("speaker '" + speaker +
                              "': intervals must be sorted and disjoint");
    }
    last_end = end;
  }
}

bool SegmentAnnotation::ActiveAt(double t) const {
  for (const auto &[start, end] : intervals) {
    if (t >= start && t < end) return true;
    if (start > t) break;
  }
  return false;
}

double SegmentAnnotation::TotalDuration() const {
  double total = 0.0;
  for (const auto &[start, end] : intervals) total += end - start;
  return total;
}

double SegmentAnnotation::MaxEnd() const {
  double max_end = 0.0;
  for (const auto &[start, end] : intervals) max_end = std::max(max_end, end);
  return max_end;
}

}  // namespace mcfe
