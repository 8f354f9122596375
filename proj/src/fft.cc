// src/fft.cc

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

#include "mcfe/fft.h"

#include <cmath>

namespace mcfe {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

bool IsPowerOfTwo(int n) { return n > 0 && (n & (n - 1)) == 0; }

int NextPowerOfTwo(long n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

void Fft(std::vector<Complex> *x, bool inverse) {
  const size_t n = x->size();
  if (n <= 1) return;
  if (!IsPowerOfTwo(static_cast<int>(n))) {
    throw InvalidInputError("FFT size must be a power of two, got " +
                            std::to_string(n));
  }
  Complex *a = x->data();

  // Bit-reversal permutation.
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  const double sign = inverse ? 1.0 : -1.0;
  for (size_t len = 2; len <= n; len <<= 1) {
    const double angle = sign * 2.0 * kPi / static_cast<double>(len);
    const Complex wlen(std::cos(angle), std::sin(angle));
    for (size_t i = 0; i < n; i += len) {
      Complex w(1.0, 0.0);
      for (size_t j = 0; j < len / 2; ++j) {
        Complex u = a[i + j];
        Complex v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }

  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (size_t i = 0; i < n; ++i) a[i] *= scale;
  }
}

std::vector<Complex> Rfft(const double *x, int n) {
  std::vector<Complex> buf(n);
  for (int i = 0; i < n; ++i) buf[i] = Complex(x[i], 0.0);
  Fft(&buf, false);
  buf.resize(n / 2 + 1);
  return buf;
}

std::vector<double> Irfft(const Complex *bins, int n) {
  std::vector<Complex> buf(n);
  buf[0] = Complex(bins[0].real(), 0.0);
  buf[n / 2] = Complex(bins[n / 2].real(), 0.0);
  for (int k = 1; k < n / 2; ++k) {
    buf[k] = bins[k];
    buf[n - k] = std::conj(bins[k]);
  }
  Fft(&buf, true);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = buf[i].real();
  return out;
}

}  // namespace mcfe
