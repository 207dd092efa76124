/* Copyright 2026 The QEK Lab Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "qekl/alignment.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "qekl/hash.hpp"
#include "qekl/parallel.hpp"
#include "qekl/rng.hpp"

namespace qekl {

namespace {

void check_labels(const std::vector<int>& labels) {
  for (int label : labels) {
    if (label != 1 && label != -1) {
      throw std::invalid_argument("labels must be +-1");
    }
  }
}

// y_i / |class(i)|; throws when a class is empty.
Eigen::VectorXd rescaled_labels(const std::vector<int>& labels) {
  int plus = 0, minus = 0;
  for (int label : labels) (label == 1 ? plus : minus)++;
  if (plus == 0 || minus == 0) {
    throw std::invalid_argument("label rescaling needs both classes present");
  }
  Eigen::VectorXd y(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    y[static_cast<Eigen::Index>(i)] =
        labels[i] / static_cast<double>(labels[i] == 1 ? plus : minus);
  }
  return y;
}

}  // namespace

Eigen::MatrixXd ideal_kernel(const std::vector<int>& labels) {
  check_labels(labels);
  if (labels.empty()) throw std::invalid_argument("ideal_kernel: no labels");
  Eigen::VectorXd y(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    y[static_cast<Eigen::Index>(i)] = labels[i];
  }
  return y * y.transpose();
}

double matrix_alignment(const Eigen::Ref<const Eigen::MatrixXd>& a,
                        const Eigen::Ref<const Eigen::MatrixXd>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("matrix_alignment: dimension mismatch");
  }
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) {
    throw std::invalid_argument("matrix_alignment: zero-norm input");
  }
  return a.cwiseProduct(b).sum() / (na * nb);
}

double polarity(const Eigen::Ref<const Eigen::MatrixXd>& kernel,
                const std::vector<int>& labels, bool rescale_unbalanced) {
  check_labels(labels);
  const Eigen::Index n = kernel.rows();
  if (n != static_cast<Eigen::Index>(labels.size()) || n != kernel.cols()) {
    throw std::invalid_argument("polarity: size mismatch");
  }
  Eigen::VectorXd y;
  if (rescale_unbalanced) {
    y = rescaled_labels(labels);
  } else {
    y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = labels[static_cast<std::size_t>(i)];
  }
  return y.dot(kernel * y);
}

double target_alignment(const Eigen::Ref<const Eigen::MatrixXd>& kernel,
                        const std::vector<int>& labels,
                        bool rescale_unbalanced) {
  const double kernel_norm = kernel.norm();
  if (kernel_norm == 0.0) {
    throw std::invalid_argument("target_alignment: zero kernel matrix");
  }
  if (!rescale_unbalanced) {
    const double n = static_cast<double>(labels.size());
    return polarity(kernel, labels, false) / (n * kernel_norm);
  }
  // general form with rescaled labels; ||K*||_F = sum_i yhat_i^2
  const Eigen::VectorXd y = rescaled_labels(labels);
  const double numer = polarity(kernel, labels, true);
  return numer / (kernel_norm * y.squaredNorm());
}

double hs_class_distance(const LabeledDataset& data,
                         const ParameterVector& theta,
                         const AnsatzShape& shape) {
  data.validate();
  const Eigen::Index dim = Eigen::Index{1} << shape.num_qubits;
  DensityMatrix rho_plus = DensityMatrix::Zero(dim, dim);
  DensityMatrix rho_minus = DensityMatrix::Zero(dim, dim);
  int plus = 0, minus = 0;
  for (int i = 0; i < data.size(); ++i) {
    Eigen::VectorXd x = data.points[i];
    const Statevector psi = simulate_pure(build_embedding(x, theta, shape));
    if (data.labels[i] == 1) {
      rho_plus += psi * psi.adjoint();
      ++plus;
    } else {
      rho_minus += psi * psi.adjoint();
      ++minus;
    }
  }
  if (plus == 0 || minus == 0) {
    throw std::invalid_argument("hs_class_distance: a class is empty");
  }
  rho_plus /= plus;
  rho_minus /= minus;
  // Tr(D^2) = ||D||_F^2 for Hermitian D
  return (rho_plus - rho_minus).squaredNorm();
}

namespace {

struct BatchContext {
  const LabeledDataset& data;
  const AnsatzShape& shape;
  std::vector<int> indices;  // global dataset indices of the batch
  std::vector<int> labels;
  const NoiseModel* noise;
  const ShotConfig* shots;
  std::uint64_t iteration_key;
};

// Alignment of the batch-restricted kernel at theta. The diagonal is pinned
// to 1 (exact path); sampled entries use streams keyed by the iteration and
// the global dataset indices so reruns and thread schedules agree.
double batch_alignment(const BatchContext& ctx, const ParameterVector& theta) {
  const int b = static_cast<int>(ctx.indices.size());
  Eigen::MatrixXd kernel = Eigen::MatrixXd::Ones(b, b);
  for (int a = 0; a < b; ++a) {
    for (int c = a + 1; c < b; ++c) {
      const int gi = ctx.indices[static_cast<std::size_t>(a)];
      const int gj = ctx.indices[static_cast<std::size_t>(c)];
      double p =
          (ctx.noise != nullptr && ctx.noise->enabled)
              ? overlap_device(ctx.data.points[static_cast<std::size_t>(gi)],
                               ctx.data.points[static_cast<std::size_t>(gj)],
                               theta, ctx.shape, *ctx.noise)
              : overlap_pure(ctx.data.points[static_cast<std::size_t>(gi)],
                             ctx.data.points[static_cast<std::size_t>(gj)],
                             theta, ctx.shape);
      if (ctx.shots != nullptr) {
        ShotConfig cfg = *ctx.shots;
        cfg.seed = stream_key(ctx.shots->seed, ctx.iteration_key);
        p = sample_entry(p, cfg, gi, gj);
      }
      kernel(a, c) = p;
      kernel(c, a) = p;
    }
  }
  // stratification guarantees both classes; rescaling also covers odd sizes
  return target_alignment(kernel, ctx.labels, true);
}

}  // namespace

TrainResult train_alignment(const LabeledDataset& data,
                            const ParameterVector& theta0,
                            const AnsatzShape& shape, const TrainConfig& cfg,
                            const NoiseModel* noise, const ShotConfig* shots) {
  data.validate();
  shape.validate();
  if (theta0.size() != shape.parameter_count()) {
    throw std::invalid_argument("train_alignment: theta0 length mismatch");
  }
  if (cfg.batch_size < 2) {
    throw std::invalid_argument("train_alignment: batch_size < 2");
  }
  if (cfg.fd_step <= 0.0) {
    throw std::invalid_argument("train_alignment: fd_step <= 0");
  }
  if (cfg.iterations < 0) {
    throw std::invalid_argument("train_alignment: negative iterations");
  }

  std::vector<int> plus_idx, minus_idx;
  for (int i = 0; i < data.size(); ++i) {
    (data.labels[static_cast<std::size_t>(i)] == 1 ? plus_idx : minus_idx)
        .push_back(i);
  }
  if (plus_idx.empty() || minus_idx.empty()) {
    throw std::invalid_argument("train_alignment: need both classes");
  }
  const int batch = std::min(cfg.batch_size, data.size());

  TrainResult result;
  result.theta = theta0;
  result.history.reserve(static_cast<std::size_t>(cfg.iterations));

  const int p_count = shape.parameter_count();
  for (int it = 0; it < cfg.iterations; ++it) {
    Rng rng = keyed_rng(cfg.seed, 0xba7c4, static_cast<std::uint64_t>(it));

    // stratified batch: split as evenly as the class pools allow, odd
    // leftover assigned by the draw
    int want_plus = batch / 2;
    if (batch % 2 == 1 && rng.bernoulli(0.5)) ++want_plus;
    want_plus = std::min(want_plus, static_cast<int>(plus_idx.size()));
    want_plus = std::max(want_plus, batch - static_cast<int>(minus_idx.size()));
    want_plus = std::max(1, std::min(want_plus, batch - 1));

    std::vector<int> pool_plus = plus_idx, pool_minus = minus_idx;
    rng.shuffle(pool_plus);
    rng.shuffle(pool_minus);

    BatchContext ctx{data, shape, {}, {}, noise, shots,
                     static_cast<std::uint64_t>(it)};
    for (int k = 0; k < want_plus; ++k) ctx.indices.push_back(pool_plus[static_cast<std::size_t>(k)]);
    for (int k = 0; k < batch - want_plus; ++k) {
      ctx.indices.push_back(pool_minus[static_cast<std::size_t>(k)]);
    }
    for (int gi : ctx.indices) {
      ctx.labels.push_back(data.labels[static_cast<std::size_t>(gi)]);
    }

    const double base = batch_alignment(ctx, result.theta);
    if (!std::isfinite(base)) {
      throw std::runtime_error(
          "train_alignment: non-finite batch alignment at iteration " +
          std::to_string(it));
    }

    // central differences, one coordinate per work item
    Eigen::VectorXd gradient(p_count);
    const ParameterVector theta_snapshot = result.theta;
    parallel_for(p_count, cfg.threads, [&](int k) {
      ParameterVector shifted = theta_snapshot;
      shifted[k] = theta_snapshot[k] + cfg.fd_step;
      const double up = batch_alignment(ctx, shifted);
      shifted[k] = theta_snapshot[k] - cfg.fd_step;
      const double down = batch_alignment(ctx, shifted);
      gradient[k] = (up - down) / (2.0 * cfg.fd_step);
    });
    if (!gradient.allFinite()) {
      throw std::runtime_error(
          "train_alignment: non-finite gradient at iteration " +
          std::to_string(it));
    }
    result.theta += cfg.learning_rate * gradient;

    TrainHistoryEntry entry;
    entry.iteration = it;
    entry.batch_alignment = base;
    entry.full_alignment = std::numeric_limits<double>::quiet_NaN();
    if (cfg.log_full_every > 0 && it % cfg.log_full_every == 0) {
      const KernelMatrix full =
          kernel_matrix(data, result.theta, shape, noise, shots, cfg.threads);
      entry.full_alignment = target_alignment(full.entries, data.labels, true);
    }
    entry.theta_hash = hash_vector(result.theta);
    result.history.push_back(entry);
  }
  return result;
}

}  // namespace qekl
