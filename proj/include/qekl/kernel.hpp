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
#ifndef QEKL_KERNEL_HPP_
#define QEKL_KERNEL_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "qekl/data.hpp"
#include "qekl/embedding.hpp"
#include "qekl/quantum.hpp"

namespace qekl {

enum class Provenance { Exact, Device, Sampled, Post };

std::string provenance_name(Provenance p);
Provenance provenance_from_name(const std::string& name);

struct KernelMatrix {
  Eigen::MatrixXd entries;
  Provenance provenance = Provenance::Exact;
  std::int64_t shots = 0;  // shots per entry, 0 = analytic
  bool diagonal_measured = false;
  int clamp_warnings = 0;  // probabilities clamped into [0,1] before sampling
  int out_of_range_entries = 0;  // post-processing outputs outside [0,1]

  int size() const { return static_cast<int>(entries.rows()); }
};

struct ShotConfig {
  std::int64_t shots = 1;
  std::uint64_t seed = 0;
  bool measure_diagonal = false;
};

// |<0|U^dag(x2) U(x1)|0>|^2 via the adjoint circuit.
double overlap_pure(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                    const ParameterVector& theta, const AnsatzShape& shape);

// Tr(rho1 rho2); equals overlap_pure for pure inputs.
double overlap_mixed(const DensityMatrix& rho1, const DensityMatrix& rho2);

// <0...0| rho_out |0...0> of the noisy adjoint circuit.
double overlap_device(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                      const ParameterVector& theta, const AnsatzShape& shape,
                      const NoiseModel& noise);

// Entrywise K_ij -> l_i l_j K_ij + (1 - l_i l_j) / 2^N: the analytic
// global-depolarization picture used as the mitigation round-trip oracle.
KernelMatrix global_depolarized_matrix(const KernelMatrix& exact,
                                       const Eigen::VectorXd& lambdas,
                                       int qubits);

// Mean of `shots` Bernoulli(p) draws from the stream keyed by
// (cfg.seed, i, j). A p outside [0,1] is clamped and counted through
// clamp_warnings when given.
double sample_entry(double p, const ShotConfig& cfg, int i, int j,
                    int* clamp_warnings = nullptr);

// Full kernel matrix of a dataset. Off-diagonal entries are computed on
// the upper triangle and mirrored. The exact path pins the diagonal to 1
// without simulation; device/sampled paths simulate the diagonal only when
// shots.measure_diagonal is set (otherwise it is filled with the known
// noiseless value 1 and diagonal_measured stays false).
KernelMatrix kernel_matrix(const LabeledDataset& data,
                           const ParameterVector& theta,
                           const AnsatzShape& shape,
                           const NoiseModel* noise = nullptr,
                           const ShotConfig* shots = nullptr, int threads = 1);

// Rectangular kernel between two point sets (rows x columns), used for
// prediction on unseen data.
Eigen::MatrixXd cross_kernel(const LabeledDataset& rows,
                             const LabeledDataset& cols,
                             const ParameterVector& theta,
                             const AnsatzShape& shape, int threads = 1);

// Gaussian baseline exp(-|x - x'|^2 / (2 sigma^2)).
double rbf_kernel(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                  double sigma);
KernelMatrix rbf_kernel_matrix(const LabeledDataset& data, double sigma);
Eigen::MatrixXd rbf_cross_kernel(const LabeledDataset& rows,
                                 const LabeledDataset& cols, double sigma);

// Spectral norm by power iteration on A^T A (tolerance 1e-8, at most 1e4
// iterations).
double spectral_norm(const Eigen::Ref<const Eigen::MatrixXd>& a);

struct NormScanRow {
  std::int64_t shots = 0;
  double mean_operator_norm_error = 0.0;
};

// For each M, samples `trials` shot-sampled matrices from K_exact and
// averages the spectral norm of the deviation. Streams are keyed by
// (seed, trial, i, j), so the table is reproducible.
std::vector<NormScanRow> operator_norm_error_scan(
    const KernelMatrix& exact, const std::vector<std::int64_t>& shot_counts,
    int trials, std::uint64_t seed);

}  // namespace qekl

#endif  // QEKL_KERNEL_HPP_
