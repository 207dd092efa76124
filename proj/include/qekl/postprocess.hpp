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
#ifndef QEKL_POSTPROCESS_HPP_
#define QEKL_POSTPROCESS_HPP_

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "qekl/kernel.hpp"

namespace qekl {

// Raised when a survival-probability estimate falls outside (0, 1]: a used
// diagonal entry at or below 2^-N would make it imaginary or zero, one
// above 1 would make it exceed one. Deliberately an error instead of a
// clamp; such inputs signal unusable device output.
struct MitigationInfeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class MitigationMode { Id, Single, Mean, Split };
enum class RegularizationMode { Id, Tik, Thr, Sdp };

std::string mitigation_name(MitigationMode mode);
std::string regularization_name(RegularizationMode mode);

struct SurvivalEstimate {
  MitigationMode mode = MitigationMode::Id;
  // length 1 for Single/Mean, n for Split, empty for Id
  Eigen::VectorXd lambdas;

  double lambda_for(int i) const {
    return lambdas.size() == 1 ? lambdas[0] : lambdas[i];
  }
};

// Infers survival probabilities from the diagonal, l_i = sqrt((K_ii - 2^-N)
// / (1 - 2^-N)). Single uses entry (0,0), Mean averages the l_i over the
// first n_mean measured entries (0 = all), Split keeps one per point. The
// input must carry a measured diagonal (or be EXACT, where it is 1).
SurvivalEstimate estimate_survival(const KernelMatrix& device,
                                   MitigationMode mode, int qubits,
                                   int n_mean = 0);

// Entrywise inversion of the global-depolarization map,
// K_ij = (K^dev_ij - 2^-N (1 - l_i l_j)) / (l_i l_j). Output entries may
// leave [0,1]; they are counted in out_of_range_entries, not clamped.
KernelMatrix mitigate(const KernelMatrix& device, const SurvivalEstimate& est,
                      int qubits);

// Spectrum shift A - sigma_min * I when sigma_min < -1e-12 (inputs are
// symmetrized first, as for all regularizers here).
Eigen::MatrixXd regularize_tikhonov(const Eigen::Ref<const Eigen::MatrixXd>& a);

// Clamps negative eigenvalues to zero: the Frobenius-nearest PSD matrix.
Eigen::MatrixXd regularize_threshold(const Eigen::Ref<const Eigen::MatrixXd>& a);

struct SdpOptions {
  double tol = 1e-8;
  int max_iterations = 10000;
};

struct SdpResult {
  Eigen::MatrixXd matrix;
  bool converged = false;
  int iterations = 0;
};

// Frobenius-nearest PSD matrix with unit diagonal (the nearest-correlation
// projection), by alternating projections with Dykstra's correction on the
// PSD step. On non-convergence the best iterate is returned with
// converged = false.
SdpResult regularize_sdp(const Eigen::Ref<const Eigen::MatrixXd>& a,
                         const SdpOptions& options = {});

Eigen::MatrixXd regularize(const Eigen::Ref<const Eigen::MatrixXd>& a,
                           RegularizationMode mode);

// Ordered triple applied as R1, then mitigation M (which estimates survival
// from R1's output), then R2.
struct PostProcessStrategy {
  RegularizationMode r1 = RegularizationMode::Id;
  MitigationMode m = MitigationMode::Id;
  RegularizationMode r2 = RegularizationMode::Id;

  bool operator==(const PostProcessStrategy&) const = default;
  std::string token() const;  // e.g. "THR-Id-Id", "Id-SPLIT-TIK"
  static PostProcessStrategy parse(const std::string& token);
};

// Reduces a triple to its canonical representative: mitigation after SDP
// estimates survival 1 and drops out; without mitigation, a second
// regularizer acting on an already PSD (and for SDP unit-diagonal) input
// drops out; a lone regularizer moves to the R1 slot.
PostProcessStrategy canonical_strategy(PostProcessStrategy s);

// The deduplicated strategy set: all 4x4x4 triples reduced to canonical
// form, 42 distinct members starting with (Id, Id, Id).
std::vector<PostProcessStrategy> enumerate_strategies();

KernelMatrix apply_strategy(const KernelMatrix& device,
                            const PostProcessStrategy& strategy, int qubits,
                            int n_mean = 0);

// q = (A(post) - A(raw)) / (1 - A(raw)) with alignments taken against the
// exact matrix; 1 means full recovery, negative values mean degradation.
double relative_improvement(const Eigen::Ref<const Eigen::MatrixXd>& post,
                            const Eigen::Ref<const Eigen::MatrixXd>& raw,
                            const Eigen::Ref<const Eigen::MatrixXd>& exact);

struct StrategyScore {
  PostProcessStrategy strategy;
  double alignment = 0.0;
  double q = 0.0;
  bool feasible = false;
  std::string failure_reason;
};

// Applies every canonical strategy and sorts the feasible ones by
// descending alignment with the exact matrix (ties keep enumeration
// order); infeasible strategies follow with their failure reason. On a raw
// matrix already perfectly aligned, q is reported as 0 for all strategies.
std::vector<StrategyScore> rank_strategies(const KernelMatrix& device,
                                           const Eigen::Ref<const Eigen::MatrixXd>& exact,
                                           int qubits, int n_mean = 0);

}  // namespace qekl

#endif  // QEKL_POSTPROCESS_HPP_
