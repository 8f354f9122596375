// src/beamform.cc

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

#include "mcfe/beamform.h"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace mcfe {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kWeightFloor = 1e-10;

void Hermitize(Eigen::MatrixXcd *m) {
  *m = 0.5 * (*m + m->adjoint().eval());
}

Eigen::MatrixXcd Loaded(const Eigen::MatrixXcd &phi, double loading) {
  const int c = static_cast<int>(phi.rows());
  double tr = phi.trace().real();
  if (!(tr > 0.0) || !std::isfinite(tr)) tr = 1.0;
  return phi + loading * (tr / c) * Eigen::MatrixXcd::Identity(c, c);
}

void CheckMaskShape(const Spectrogram &spec, const TfMatrix &mask) {
  if (mask.rows() != spec.num_frames() || mask.cols() != spec.num_bins()) {
    throw InvalidInputError(
        "mask shape (" + std::to_string(mask.rows()) + " x " +
        std::to_string(mask.cols()) + ") does not match spectrogram (" +
        std::to_string(spec.num_frames()) + " x " +
        std::to_string(spec.num_bins()) + ")");
  }
  if ((mask.array() < -1e-12).any() || (mask.array() > 1.0 + 1e-12).any()) {
    throw InvalidInputError("mask entries must lie in [0, 1]");
  }
}

}  // namespace

void SpatialCovariance::Validate() const {
  for (const auto &m : matrices) {
    const double scale = std::max(1.0, m.norm());
    if ((m - m.adjoint()).norm() > 1e-10 * scale) {
      throw NumericalError("covariance matrix is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m,
                                                       Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    const double tr = m.trace().real();
    if (min_eig < -1e-8 * std::max(tr, 1e-30)) {
      throw NumericalError("covariance matrix is not positive semi-definite");
    }
  }
}

SpatialCovariance PsdBatch(const Spectrogram &spec, const TfMatrix &mask) {
  CheckMaskShape(spec, mask);
  const int channels = spec.num_channels();
  const int n_frames = spec.num_frames();
  const int n_bins = spec.num_bins();

  SpatialCovariance psd;
  psd.matrices.assign(n_bins, Eigen::MatrixXcd::Zero(channels, channels));
  psd.weight = Eigen::VectorXd::Zero(n_bins);
  psd.fallback.assign(n_bins, 0);

  Eigen::VectorXcd x(channels);
  for (int f = 0; f < n_bins; ++f) {
    Eigen::MatrixXcd &acc = psd.matrices[f];
    double wsum = 0.0;
    for (int t = 0; t < n_frames; ++t) {
      const double m = mask(t, f);
      if (m <= 0.0) continue;
      for (int c = 0; c < channels; ++c) x[c] = spec.data(c, t, f);
      acc.noalias() += m * (x * x.adjoint());
      wsum += m;
    }
    psd.weight[f] = wsum;
    if (wsum <= 0.0) {
      acc = kPsdFallbackEps * Eigen::MatrixXcd::Identity(channels, channels);
      psd.fallback[f] = 1;
    } else {
      acc /= std::max(wsum, kWeightFloor);
      Hermitize(&acc);
    }
  }
  return psd;
}

RecursivePsd PsdRecursive(const Spectrogram &spec, const TfMatrix &mask,
                          double alpha, bool keep_trajectory) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInputError("alpha must lie in (0, 1), got " +
                            std::to_string(alpha));
  }
  CheckMaskShape(spec, mask);
  const int channels = spec.num_channels();
  const int n_frames = spec.num_frames();
  const int n_bins = spec.num_bins();
  const Eigen::MatrixXcd eps_identity =
      kPsdFallbackEps * Eigen::MatrixXcd::Identity(channels, channels);

  std::vector<Eigen::MatrixXcd> numer(
      n_bins, Eigen::MatrixXcd::Zero(channels, channels));
  Eigen::VectorXd denom = Eigen::VectorXd::Zero(n_bins);

  RecursivePsd result;
  if (keep_trajectory) result.per_frame.reserve(n_frames);

  SpatialCovariance state;
  state.matrices.assign(n_bins, eps_identity);
  state.weight = Eigen::VectorXd::Zero(n_bins);
  state.fallback.assign(n_bins, 1);

  Eigen::VectorXcd x(channels);
  for (int t = 0; t < n_frames; ++t) {
    for (int f = 0; f < n_bins; ++f) {
      const double m = mask(t, f);
      Eigen::MatrixXcd &n = numer[f];
      n *= alpha;
      denom[f] *= alpha;
      if (m > 0.0) {
        for (int c = 0; c < channels; ++c) x[c] = spec.data(c, t, f);
        n.noalias() += (1.0 - alpha) * m * (x * x.adjoint());
        denom[f] += (1.0 - alpha) * m;
      }
      state.weight[f] = denom[f];
      if (denom[f] <= kWeightFloor) {
        state.matrices[f] = eps_identity;
        state.fallback[f] = 1;
      } else {
        state.matrices[f] = n / denom[f];
        Hermitize(&state.matrices[f]);
        state.fallback[f] = 0;
      }
    }
    if (keep_trajectory) result.per_frame.push_back(state);
  }
  result.final_psd = std::move(state);
  return result;
}

BeamformerWeights MvdrSteering(const SpatialCovariance &phi_noise,
                               const Eigen::MatrixXcd &steering,
                               double loading) {
  const int n_bins = phi_noise.num_bins();
  const int channels = phi_noise.num_channels();
  if (steering.rows() != n_bins || steering.cols() != channels) {
    throw InvalidInputError("steering matrix must be F x C");
  }

  BeamformerWeights bf;
  bf.variant = MvdrVariant::kSteering;
  bf.steering = steering;
  bf.weights = Eigen::MatrixXcd::Zero(n_bins, channels);

  for (int f = 0; f < n_bins; ++f) {
    const Eigen::VectorXcd d = steering.row(f).transpose();
    Eigen::MatrixXcd phi = Loaded(phi_noise.matrices[f], loading);
    Eigen::LLT<Eigen::MatrixXcd> llt(phi);
    Eigen::VectorXcd u;
    bool ok = (llt.info() == Eigen::Success);
    if (ok) {
      u = llt.solve(d);
      ok = u.allFinite();
    }
    if (ok) {
      const Complex denom = d.adjoint() * u;
      ok = std::isfinite(std::abs(denom)) && std::abs(denom) > 1e-300;
      if (ok) bf.weights.row(f) = (u / denom).transpose();
    }
    if (!ok) {
      // matched-filter fallback keeps w^H d = 1 for unit steering
      bf.weights.row(f) = (d / d.squaredNorm()).transpose();
      bf.failed_bins.push_back(f);
    }
  }
  return bf;
}

BeamformerWeights MvdrSouden(const SpatialCovariance &phi_target,
                             const SpatialCovariance &phi_noise,
                             int ref_channel, double loading) {
  const int n_bins = phi_noise.num_bins();
  const int channels = phi_noise.num_channels();
  if (phi_target.num_bins() != n_bins ||
      phi_target.num_channels() != channels) {
    throw InvalidInputError("target/noise covariance shapes disagree");
  }
  if (ref_channel < 0 || ref_channel >= channels) {
    throw InvalidInputError("ref_channel out of range");
  }

  BeamformerWeights bf;
  bf.variant = MvdrVariant::kSouden;
  bf.ref_channel = ref_channel;
  bf.weights = Eigen::MatrixXcd::Zero(n_bins, channels);

  for (int f = 0; f < n_bins; ++f) {
    Eigen::MatrixXcd phi_n = Loaded(phi_noise.matrices[f], loading);
    Eigen::LLT<Eigen::MatrixXcd> llt(phi_n);
    bool ok = (llt.info() == Eigen::Success);
    Eigen::MatrixXcd ratio;
    if (ok) {
      ratio = llt.solve(phi_target.matrices[f]);
      ok = ratio.allFinite();
    }
    if (ok) {
      const Complex tr = ratio.trace();
      if (std::abs(tr) < 1e-10) {
        ok = false;
      } else {
        bf.weights.row(f) = (ratio.col(ref_channel) / tr).transpose();
      }
    }
    if (!ok) {
      bf.weights(f, ref_channel) = Complex(1.0, 0.0);  // passthrough
      bf.failed_bins.push_back(f);
    }
  }
  return bf;
}

Spectrogram ApplyBeamformer(const BeamformerWeights &weights,
                            const Spectrogram &spec) {
  const int channels = spec.num_channels();
  const int n_frames = spec.num_frames();
  const int n_bins = spec.num_bins();
  if (weights.weights.rows() != n_bins || weights.weights.cols() != channels) {
    throw InvalidInputError("beamformer weights must be F x C");
  }

  Spectrogram out;
  out.data = Tensor3<Complex>(1, n_frames, n_bins);
  out.params = spec.params;
  out.sample_rate = spec.sample_rate;
  for (int t = 0; t < n_frames; ++t) {
    for (int f = 0; f < n_bins; ++f) {
      Complex acc(0.0, 0.0);
      for (int c = 0; c < channels; ++c) {
        acc += std::conj(weights.weights(f, c)) * spec.data(c, t, f);
      }
      out.data(0, t, f) = acc;
    }
  }
  return out;
}

Eigen::MatrixXcd PlaneWaveSteering(const StftParams &params, int sample_rate,
                                   const std::vector<Vec3> &geometry,
                                   double azimuth_deg, double speed_of_sound) {
  if (geometry.size() < 2) {
    throw InvalidInputError("steering needs at least 2 microphone positions");
  }
  const int channels = static_cast<int>(geometry.size());
  const int n_bins = params.num_bins();
  Vec3 centroid = Vec3::Zero();
  for (const Vec3 &m : geometry) centroid += m;
  centroid /= channels;

  const double az = azimuth_deg * kPi / 180.0;
  const Vec3 u(std::cos(az), std::sin(az), 0.0);
  const double norm = 1.0 / std::sqrt(static_cast<double>(channels));

  Eigen::MatrixXcd steering(n_bins, channels);
  for (int c = 0; c < channels; ++c) {
    const double tau = (geometry[c] - centroid).dot(u) / speed_of_sound;
    for (int f = 0; f < n_bins; ++f) {
      const double freq = static_cast<double>(f) * sample_rate /
                          params.fft_size;
      const double phase = 2.0 * kPi * freq * tau;
      steering(f, c) = norm * Complex(std::cos(phase), std::sin(phase));
    }
  }
  return steering;
}

}  // namespace mcfe
