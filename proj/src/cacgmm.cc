// src/cacgmm.cc

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

#include "mcfe/cacgmm.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mcfe {

namespace {

// z^H M z for Hermitian M in packed row-major storage.
inline double HermitianQuadForm(const Complex *m, const Complex *z, int c) {
  double acc = 0.0;
  for (int i = 0; i < c; ++i) {
    acc += m[i * c + i].real() * std::norm(z[i]);
    for (int j = i + 1; j < c; ++j) {
      // m_ij conj(z_i) z_j + conj over (j,i) fold to twice the real part
      const Complex cross = m[i * c + j] * std::conj(z[i]) * z[j];
      acc += 2.0 * cross.real();
    }
  }
  return acc;
}

void NormalizeShape(Eigen::MatrixXcd *b, double eps) {
  const int c = static_cast<int>(b->rows());
  *b = 0.5 * (*b + b->adjoint().eval());
  double tr = b->trace().real();
  if (tr > 0.0 && std::isfinite(tr)) {
    *b *= static_cast<double>(c) / tr;
  } else {
    *b = Eigen::MatrixXcd::Identity(c, c);
  }
  *b += eps * Eigen::MatrixXcd::Identity(c, c);
}

}  // namespace

ActivityMatrix MakeActivityMatrix(
    const std::vector<SegmentAnnotation> &annotations, int n_frames,
    const StftParams &params, int sample_rate, double context_s) {
  params.Validate();
  if (n_frames < 1) throw InvalidInputError("n_frames must be >= 1");
  if (context_s < 0.0) throw InvalidInputError("context must be >= 0");

  const int k = static_cast<int>(annotations.size());
  ActivityMatrix activity;
  activity.active.setZero(k + 1, n_frames);
  for (int i = 0; i < k; ++i) {
    annotations[i].Validate();
    activity.class_labels.push_back(annotations[i].speaker);
    for (int t = 0; t < n_frames; ++t) {
      const double center =
          static_cast<double>(t) * params.hop / sample_rate;
      for (const auto &[start, end] : annotations[i].intervals) {
        if (center >= start - context_s && center < end + context_s) {
          activity.active(i, t) = 1;
          break;
        }
      }
    }
  }
  activity.class_labels.push_back("noise");
  activity.active.row(k).setOnes();
  return activity;
}

CacgmmResult CacgmmEm(const Spectrogram &spec, const ActivityMatrix &activity,
                      const CacgmmOptions &options) {
  spec.Validate();
  const int channels = spec.num_channels();
  const int n_frames = spec.num_frames();
  const int n_bins = spec.num_bins();
  const int n_classes = activity.num_classes();
  if (channels < 2) {
    throw InvalidInputError("CACGMM needs at least 2 channels");
  }
  if (options.n_iter < 1) throw InvalidInputError("n_iter must be >= 1");
  if (activity.num_frames() != n_frames) {
    throw InvalidInputError("activity matrix frame count (" +
                            std::to_string(activity.num_frames()) +
                            ") does not match spectrogram (" +
                            std::to_string(n_frames) + ")");
  }
  const ActivityMatrix &init =
      options.init_activity ? *options.init_activity : activity;
  if (init.num_frames() != n_frames || init.num_classes() != n_classes) {
    throw InvalidInputError("init activity shape mismatch");
  }

  CacgmmResult result;
  result.masks.masks = Tensor3<double>(n_classes, n_frames, n_bins, 0.0);
  result.masks.class_labels = activity.class_labels;
  result.state.shape_matrices.assign(
      n_classes, std::vector<Eigen::MatrixXcd>(
                     n_bins, Eigen::MatrixXcd::Identity(channels, channels)));
  result.state.log_likelihood_trace.assign(options.n_iter + 1, 0.0);

  for (int k = 0; k < n_classes; ++k) {
    if (activity.active.row(k).sum() == 0) {
      result.warnings.push_back("class '" + activity.class_labels[k] +
                                "' has no active frames; mask left all-zero");
    }
  }

  // Number of active classes per frame, and the initial responsibilities:
  // uniform over speakers marked active in the init pattern, noise claiming
  // only the frames with no active speaker. This pins each class to its own
  // frames before EM widens the support to the full activity matrix.
  const int noise_class = n_classes - 1;
  std::vector<int> n_active(n_frames, 0);
  for (int t = 0; t < n_frames; ++t) {
    for (int k = 0; k < n_classes; ++k) {
      if (activity.active(k, t)) ++n_active[t];
    }
  }
  std::vector<double> gamma_init(static_cast<size_t>(n_classes) * n_frames,
                                 0.0);
  for (int t = 0; t < n_frames; ++t) {
    int speakers_on = 0;
    for (int k = 0; k + 1 < n_classes; ++k) {
      if (init.active(k, t)) ++speakers_on;
    }
    if (speakers_on > 0) {
      const double share = 1.0 / speakers_on;
      for (int k = 0; k + 1 < n_classes; ++k) {
        if (init.active(k, t)) {
          gamma_init[static_cast<size_t>(k) * n_frames + t] = share;
        }
      }
    } else {
      gamma_init[static_cast<size_t>(noise_class) * n_frames + t] = 1.0;
    }
  }

  // Per-bin workspace.
  std::vector<Complex> z(static_cast<size_t>(channels) * n_frames);
  std::vector<uint8_t> valid(n_frames);
  std::vector<double> gamma(static_cast<size_t>(n_classes) * n_frames);
  std::vector<double> qform(static_cast<size_t>(n_classes) * n_frames);
  std::vector<Eigen::MatrixXcd> shapes(n_classes);
  std::vector<std::vector<Complex>> packed_inv(
      n_classes,
      std::vector<Complex>(static_cast<size_t>(channels) * channels));
  std::vector<double> log_dets(n_classes);
  std::vector<Eigen::MatrixXcd> scatter(n_classes);
  std::vector<double> gamma_sums(n_classes);
  std::vector<double> log_dens(n_classes);

  // Cholesky of the current shapes; the identity floor keeps them PD, so a
  // failure means the state is corrupt beyond repair.
  auto refresh_inverses = [&]() {
    for (int k = 0; k < n_classes; ++k) {
      Eigen::LLT<Eigen::MatrixXcd> llt(shapes[k]);
      if (llt.info() != Eigen::Success) {
        throw NumericalError("CACGMM shape matrix lost positive definiteness");
      }
      Eigen::MatrixXcd inv =
          llt.solve(Eigen::MatrixXcd::Identity(channels, channels));
      for (int i = 0; i < channels; ++i) {
        for (int j = 0; j < channels; ++j) {
          packed_inv[k][static_cast<size_t>(i) * channels + j] = inv(i, j);
        }
      }
      double log_det = 0.0;
      for (int i = 0; i < channels; ++i) {
        log_det += 2.0 * std::log(llt.matrixL()(i, i).real());
      }
      log_dets[k] = log_det;
    }
  };

  // B_k = C * sum_t gamma (z z^H) / q / sum_t gamma, trace-normalized plus
  // the identity floor. With qf == nullptr the current shapes are
  // identities, so q = z^H z = 1.
  auto m_step = [&](const double *g, const double *qf) {
    for (int k = 0; k < n_classes; ++k) {
      scatter[k] = Eigen::MatrixXcd::Zero(channels, channels);
      gamma_sums[k] = 0.0;
    }
    for (int t = 0; t < n_frames; ++t) {
      if (!valid[t]) continue;
      const Complex *zt = &z[static_cast<size_t>(t) * channels];
      for (int k = 0; k < n_classes; ++k) {
        const double gv = g[static_cast<size_t>(k) * n_frames + t];
        if (gv <= 0.0) continue;
        const double q =
            qf ? std::max(qf[static_cast<size_t>(k) * n_frames + t],
                          options.qform_floor)
               : 1.0;
        const double w = gv / q;
        Eigen::MatrixXcd &s = scatter[k];
        for (int i = 0; i < channels; ++i) {
          for (int j = i; j < channels; ++j) {
            s(i, j) += w * zt[i] * std::conj(zt[j]);  // (z z^H)_ij
          }
        }
        gamma_sums[k] += gv;
      }
    }
    for (int k = 0; k < n_classes; ++k) {
      if (gamma_sums[k] <= 1e-12) continue;  // shape left at current value
      Eigen::MatrixXcd b = scatter[k];
      for (int i = 0; i < channels; ++i) {
        for (int j = 0; j < i; ++j) b(i, j) = std::conj(b(j, i));
      }
      b *= static_cast<double>(channels) / gamma_sums[k];
      NormalizeShape(&b, options.shape_eps);
      shapes[k] = std::move(b);
    }
  };

  for (int f = 0; f < n_bins; ++f) {
    // Direction-normalized observations for this bin.
    for (int t = 0; t < n_frames; ++t) {
      double norm_sq = 0.0;
      for (int c = 0; c < channels; ++c) {
        const Complex v = spec.data(c, t, f);
        z[static_cast<size_t>(t) * channels + c] = v;
        norm_sq += std::norm(v);
      }
      const double norm = std::sqrt(norm_sq);
      valid[t] = norm >= options.silence_floor ? 1 : 0;
      if (valid[t]) {
        const double inv_norm = 1.0 / norm;
        for (int c = 0; c < channels; ++c) {
          z[static_cast<size_t>(t) * channels + c] *= inv_norm;
        }
      }
    }

    for (int k = 0; k < n_classes; ++k) {
      shapes[k] = Eigen::MatrixXcd::Identity(channels, channels);
    }

    // Anchor the classes with one M-step from the initial responsibilities.
    m_step(gamma_init.data(), nullptr);

    for (int iter = 0; iter <= options.n_iter; ++iter) {
      // E-step; the activity matrix acts as time-varying mixture weights.
      refresh_inverses();
      double bin_ll = 0.0;
      for (int t = 0; t < n_frames; ++t) {
        if (n_active[t] == 0) {
          for (int k = 0; k < n_classes; ++k) {
            gamma[static_cast<size_t>(k) * n_frames + t] = 0.0;
          }
          continue;
        }
        if (!valid[t]) {
          // Uniform over active classes; no likelihood contribution.
          for (int k = 0; k < n_classes; ++k) {
            gamma[static_cast<size_t>(k) * n_frames + t] =
                activity.active(k, t) ? 1.0 / n_active[t] : 0.0;
          }
          continue;
        }
        const Complex *zt = &z[static_cast<size_t>(t) * channels];
        double max_log = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < n_classes; ++k) {
          if (!activity.active(k, t)) continue;
          const double q =
              std::max(HermitianQuadForm(packed_inv[k].data(), zt, channels),
                       options.qform_floor);
          qform[static_cast<size_t>(k) * n_frames + t] = q;
          log_dens[k] = -log_dets[k] - channels * std::log(q);
          max_log = std::max(max_log, log_dens[k]);
        }
        double denom = 0.0;
        for (int k = 0; k < n_classes; ++k) {
          double gv = 0.0;
          if (activity.active(k, t)) {
            gv = std::exp(log_dens[k] - max_log);
            denom += gv;
          }
          gamma[static_cast<size_t>(k) * n_frames + t] = gv;
        }
        for (int k = 0; k < n_classes; ++k) {
          gamma[static_cast<size_t>(k) * n_frames + t] /= denom;
        }
        bin_ll += max_log + std::log(denom);
      }
      result.state.log_likelihood_trace[iter] += bin_ll;

      if (iter < options.n_iter) m_step(gamma.data(), qform.data());
    }

    for (int k = 0; k < n_classes; ++k) {
      result.state.shape_matrices[k][f] = shapes[k];
      for (int t = 0; t < n_frames; ++t) {
        result.masks.masks(k, t, f) =
            gamma[static_cast<size_t>(k) * n_frames + t];
      }
    }
  }
  return result;
}

}  // namespace mcfe
