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
#ifndef QEKL_SVM_HPP_
#define QEKL_SVM_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qekl {

struct IndefiniteKernel : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Soft-margin kernel SVM in dual form. The decision function is
// f(t) = sum_i alpha_i y_i k(x_i, t) + b with 0 <= alpha_i <= C.
struct SvmModel {
  Eigen::VectorXd alpha;
  double b = 0.0;
  std::vector<int> support_indices;  // indices with alpha_i > 1e-8
  std::vector<int> labels;           // training labels, +-1
  double C = 1.0;
};

struct SvmOptions {
  double kkt_tol = 1e-3;
  int max_passes = 100000;
  std::uint64_t seed = 0;  // pair-selection stream
};

// Fits by sequential minimal optimization on the precomputed training
// kernel. Throws IndefiniteKernel when the matrix has an eigenvalue below
// -1e-8 (regularize first) and NonConvergence when the pass budget runs out.
SvmModel svm_fit(const Eigen::Ref<const Eigen::MatrixXd>& kernel,
                 const std::vector<int>& labels, double C,
                 const SvmOptions& options = {});

// kernel_cross has one row per evaluation point and one column per
// training point.
Eigen::VectorXd svm_decision_function(
    const SvmModel& model, const Eigen::Ref<const Eigen::MatrixXd>& kernel_cross);

// sign of the decision function; a value of exactly 0 maps to +1.
std::vector<int> svm_predict(const SvmModel& model,
                             const Eigen::Ref<const Eigen::MatrixXd>& kernel_cross);

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth);

std::string svm_to_json(const SvmModel& model);
SvmModel svm_from_json(const std::string& text);

}  // namespace qekl

#endif  // QEKL_SVM_HPP_
