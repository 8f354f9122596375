// include/mcfe/types.h

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

#ifndef MCFE_TYPES_H_
#define MCFE_TYPES_H_

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace mcfe {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;

// Channels-by-samples storage; row-major so each channel is contiguous.
using SampleMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Frames-by-bins real matrix (time-frequency masks, weights).
using TfMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input or violated precondition; maps to CLI exit code 2.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// Numerical breakdown past all regularization; maps to CLI exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Dense row-major rank-3 tensor, the storage behind spectrograms and masks.
template <typename T>
class Tensor3 {
 public:
  Tensor3() : d0_(0), d1_(0), d2_(0) {}
  Tensor3(int d0, int d1, int d2, T fill = T())
      : d0_(d0), d1_(d1), d2_(d2),
        data_(static_cast<size_t>(d0) * d1 * d2, fill) {}

  T &operator()(int i, int j, int k) {
    return data_[(static_cast<size_t>(i) * d1_ + j) * d2_ + k];
  }
  const T &operator()(int i, int j, int k) const {
    return data_[(static_cast<size_t>(i) * d1_ + j) * d2_ + k];
  }

  int dim0() const { return d0_; }
  int dim1() const { return d1_; }
  int dim2() const { return d2_; }
  size_t size() const { return data_.size(); }
  T *data() { return data_.data(); }
  const T *data() const { return data_.data(); }

 private:
  int d0_, d1_, d2_;
  std::vector<T> data_;
};

struct MultiChannelWave {
  SampleMatrix samples;  // C x T
  int sample_rate = 16000;
  std::optional<std::vector<Vec3>> geometry;  // meters, one entry per channel

  int num_channels() const { return static_cast<int>(samples.rows()); }
  long num_samples() const { return static_cast<long>(samples.cols()); }
  double duration_s() const {
    return static_cast<double>(num_samples()) / sample_rate;
  }

  // Throws InvalidInputError if a type invariant is violated.
  void Validate() const;
};

enum class WindowKind { kSqrtHann, kHann };

std::string WindowKindName(WindowKind kind);
WindowKind WindowKindFromName(const std::string &name);

struct StftParams {
  int fft_size = 512;
  int hop = 128;
  WindowKind window = WindowKind::kSqrtHann;

  int num_bins() const { return fft_size / 2 + 1; }
  // Throws InvalidInputError unless fft_size is a power of two, hop divides
  // fft_size, and the window pair satisfies constant overlap-add.
  void Validate() const;
};

struct Spectrogram {
  Tensor3<Complex> data;  // C x frames x bins
  StftParams params;
  int sample_rate = 16000;

  int num_channels() const { return data.dim0(); }
  int num_frames() const { return data.dim1(); }
  int num_bins() const { return data.dim2(); }

  // Frame t is centered on sample t * hop of the original signal.
  double frame_time_s(int frame) const {
    return static_cast<double>(frame) * params.hop / sample_rate;
  }
  double bin_hz(int bin) const {
    return static_cast<double>(bin) * sample_rate / params.fft_size;
  }

  void Validate() const;
};

// Per-speaker activity intervals in seconds, [start, end).
struct SegmentAnnotation {
  std::string speaker;
  std::vector<std::pair<double, double>> intervals;

  // Throws InvalidInputError unless intervals are sorted, non-overlapping
  // and have end > start.
  void Validate() const;
  bool ActiveAt(double t) const;
  double TotalDuration() const;
  double MaxEnd() const;
};

}  // namespace mcfe

#endif  // MCFE_TYPES_H_
