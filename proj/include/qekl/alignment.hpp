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
#ifndef QEKL_ALIGNMENT_HPP_
#define QEKL_ALIGNMENT_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <numbers>
#include <vector>

#include "qekl/data.hpp"
#include "qekl/kernel.hpp"

namespace qekl {

// K* = y y^T.
Eigen::MatrixXd ideal_kernel(const std::vector<int>& labels);

// Frobenius-cosine of two equally sized matrices, in [-1, 1].
double matrix_alignment(const Eigen::Ref<const Eigen::MatrixXd>& a,
                        const Eigen::Ref<const Eigen::MatrixXd>& b);

// Kernel-target alignment. With rescale_unbalanced the labels are divided
// by their class sizes before entering the general formula; on balanced
// data that reduces to the plain form.
double target_alignment(const Eigen::Ref<const Eigen::MatrixXd>& kernel,
                        const std::vector<int>& labels,
                        bool rescale_unbalanced = false);

// Unnormalized alignment numerator sum_ij y_i y_j K_ij (labels rescaled by
// class size when requested).
double polarity(const Eigen::Ref<const Eigen::MatrixXd>& kernel,
                const std::vector<int>& labels, bool rescale_unbalanced = false);

// Tr{(rho_+ - rho_-)^2} of the class-averaged pure embedding states. Equal
// to the class-rescaled polarity of the exact kernel matrix.
double hs_class_distance(const LabeledDataset& data,
                         const ParameterVector& theta,
                         const AnsatzShape& shape);

struct TrainConfig {
  double learning_rate = 0.2;
  int batch_size = 4;       // stratified, at least one point per class
  int iterations = 500;
  double fd_step = std::numbers::pi / 100.0;  // central-difference step
  std::uint64_t seed = 0;
  int threads = 1;
  int log_full_every = 0;  // 0 = never log full-dataset alignment
};

struct TrainHistoryEntry {
  int iteration = 0;
  double batch_alignment = 0.0;
  double full_alignment = 0.0;  // NaN when not logged
  std::uint64_t theta_hash = 0;
};

struct TrainResult {
  ParameterVector theta;
  std::vector<TrainHistoryEntry> history;
};

// Stochastic gradient ascent on the batch-restricted target alignment.
// Each iteration draws a class-stratified batch, estimates the gradient by
// central finite differences with step fd_step per coordinate and takes an
// ascent step. Optional noise/shots make the batch kernels device-noisy or
// shot-sampled (streams keyed by iteration and global dataset indices).
TrainResult train_alignment(const LabeledDataset& data,
                            const ParameterVector& theta0,
                            const AnsatzShape& shape, const TrainConfig& cfg,
                            const NoiseModel* noise = nullptr,
                            const ShotConfig* shots = nullptr);

}  // namespace qekl

#endif  // QEKL_ALIGNMENT_HPP_
