// include/mcfe/stft.h

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

#ifndef MCFE_STFT_H_
#define MCFE_STFT_H_

#include <vector>

#include "mcfe/types.h"

namespace mcfe {

// Periodic window of length n.
std::vector<double> MakeWindow(WindowKind kind, int n);

// Max deviation of sum_m w_a[n - m*hop] * w_s[n - m*hop] from its mean,
// relative to the mean. Zero (to rounding) iff the pair satisfies COLA.
double ColaDeviation(const StftParams &params);

// Frames produced for a signal of num_samples, given the fft_size/2
// reflection padding applied on each side: floor(T / hop) + 1.
int NumStftFrames(long num_samples, const StftParams &params);

// Analysis transform. Signals are reflection-padded by fft_size/2 on each
// side so that frame t is centered on sample t * hop. Requires
// num_samples >= fft_size.
Spectrogram Stft(const MultiChannelWave &wave, const StftParams &params);

// Weighted overlap-add synthesis with the matching window; the result is
// truncated or zero-padded to target_length samples.
MultiChannelWave Istft(const Spectrogram &spec, long target_length);

}  // namespace mcfe

#endif  // MCFE_STFT_H_
