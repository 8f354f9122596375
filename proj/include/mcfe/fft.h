// include/mcfe/fft.h

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

#ifndef MCFE_FFT_H_
#define MCFE_FFT_H_

#include <vector>

#include "mcfe/types.h"

namespace mcfe {

bool IsPowerOfTwo(int n);
int NextPowerOfTwo(long n);

// In-place iterative radix-2 transform; x->size() must be a power of two.
// The inverse includes the 1/N scaling.
void Fft(std::vector<Complex> *x, bool inverse);

// One-sided spectrum of a real signal: n/2 + 1 bins.
std::vector<Complex> Rfft(const double *x, int n);

// Real signal from a one-sided spectrum of n/2 + 1 bins; negative
// frequencies are reconstructed by conjugate symmetry.
std::vector<double> Irfft(const Complex *bins, int n);

}  // namespace mcfe

#endif  // MCFE_FFT_H_
