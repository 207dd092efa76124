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
#include "qekl/postprocess.hpp"

#include <algorithm>
#include <climits>
#include <cmath>

#include "qekl/alignment.hpp"

namespace qekl {

namespace {

constexpr double kTikhonovShiftThreshold = -1e-12;

Eigen::MatrixXd symmetrized(const Eigen::Ref<const Eigen::MatrixXd>& a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("regularizer input must be square");
  }
  return 0.5 * (a + a.transpose());
}

Eigen::MatrixXd psd_projection(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition failed");
  }
  const Eigen::VectorXd clamped = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * clamped.asDiagonal() *
         es.eigenvectors().transpose();
}

}  // namespace

std::string mitigation_name(MitigationMode mode) {
  switch (mode) {
    case MitigationMode::Id: return "Id";
    case MitigationMode::Single: return "SINGLE";
    case MitigationMode::Mean: return "MEAN";
    case MitigationMode::Split: return "SPLIT";
  }
  throw std::logic_error("mitigation_name");
}

std::string regularization_name(RegularizationMode mode) {
  switch (mode) {
    case RegularizationMode::Id: return "Id";
    case RegularizationMode::Tik: return "TIK";
    case RegularizationMode::Thr: return "THR";
    case RegularizationMode::Sdp: return "SDP";
  }
  throw std::logic_error("regularization_name");
}

SurvivalEstimate estimate_survival(const KernelMatrix& device,
                                   MitigationMode mode, int qubits,
                                   int n_mean) {
  if (mode == MitigationMode::Id) {
    return {MitigationMode::Id, Eigen::VectorXd()};
  }
  if (!device.diagonal_measured && device.provenance != Provenance::Exact) {
    throw MitigationInfeasible("diagonal entries were not measured");
  }
  const int n = device.size();
  const double mixed = std::pow(2.0, -qubits);

  auto lambda_at = [&](int i) {
    const double kii = device.entries(i, i);
    if (kii <= mixed) {
      throw MitigationInfeasible(
          "diagonal entry at or below 2^-N gives no real survival estimate");
    }
    if (kii > 1.0) {
      throw MitigationInfeasible("diagonal entry above 1 gives survival > 1");
    }
    return std::sqrt((kii - mixed) / (1.0 - mixed));
  };

  SurvivalEstimate est;
  est.mode = mode;
  switch (mode) {
    case MitigationMode::Single:
      est.lambdas = Eigen::VectorXd::Constant(1, lambda_at(0));
      break;
    case MitigationMode::Mean: {
      int used = n_mean > 0 ? std::min(n_mean, n) : n;
      double sum = 0.0;
      for (int i = 0; i < used; ++i) sum += lambda_at(i);
      est.lambdas = Eigen::VectorXd::Constant(1, sum / used);
      break;
    }
    case MitigationMode::Split: {
      est.lambdas.resize(n);
      for (int i = 0; i < n; ++i) est.lambdas[i] = lambda_at(i);
      break;
    }
    case MitigationMode::Id:
      break;
  }
  return est;
}

KernelMatrix mitigate(const KernelMatrix& device, const SurvivalEstimate& est,
                      int qubits) {
  KernelMatrix out = device;
  out.provenance = Provenance::Post;
  if (est.mode == MitigationMode::Id) return out;

  const int n = device.size();
  if (est.mode == MitigationMode::Split && est.lambdas.size() != n) {
    throw std::invalid_argument("mitigate: split estimate length mismatch");
  }
  const double mixed = std::pow(2.0, -qubits);
  int out_of_range = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double ll = est.lambda_for(i) * est.lambda_for(j);
      const double v = (device.entries(i, j) - mixed * (1.0 - ll)) / ll;
      if (v < 0.0 || v > 1.0) ++out_of_range;
      out.entries(i, j) = v;
    }
  }
  out.out_of_range_entries = out_of_range;
  return out;
}

Eigen::MatrixXd regularize_tikhonov(const Eigen::Ref<const Eigen::MatrixXd>& a) {
  Eigen::MatrixXd sym = symmetrized(a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym,
                                                    Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("regularize_tikhonov: eigensolver failed");
  }
  const double sigma_min = es.eigenvalues().minCoeff();
  // threshold below zero so eigensolver round-off does not trigger a shift
  if (sigma_min < kTikhonovShiftThreshold) {
    sym.diagonal().array() -= sigma_min;
  }
  return sym;
}

Eigen::MatrixXd regularize_threshold(const Eigen::Ref<const Eigen::MatrixXd>& a) {
  return psd_projection(symmetrized(a));
}

SdpResult regularize_sdp(const Eigen::Ref<const Eigen::MatrixXd>& a,
                         const SdpOptions& options) {
  // Alternating projections between the PSD cone and the unit-diagonal
  // affine set; the Dykstra correction is carried on the cone step only.
  Eigen::MatrixXd y = symmetrized(a);
  Eigen::MatrixXd correction = Eigen::MatrixXd::Zero(y.rows(), y.cols());
  SdpResult result;
  for (int it = 1; it <= options.max_iterations; ++it) {
    const Eigen::MatrixXd shifted = y - correction;
    const Eigen::MatrixXd cone = psd_projection(shifted);
    correction = cone - shifted;
    Eigen::MatrixXd y_next = cone;
    y_next.diagonal().setOnes();
    const double step = (y_next - y).norm();
    const double gap = (y_next - cone).norm();
    y = y_next;
    result.iterations = it;
    if (std::max(step, gap) < options.tol) {
      result.converged = true;
      break;
    }
  }
  result.matrix = y;
  return result;
}

Eigen::MatrixXd regularize(const Eigen::Ref<const Eigen::MatrixXd>& a,
                           RegularizationMode mode) {
  switch (mode) {
    case RegularizationMode::Id: return a;
    case RegularizationMode::Tik: return regularize_tikhonov(a);
    case RegularizationMode::Thr: return regularize_threshold(a);
    case RegularizationMode::Sdp: return regularize_sdp(a).matrix;
  }
  throw std::logic_error("regularize");
}

std::string PostProcessStrategy::token() const {
  return regularization_name(r1) + "-" + mitigation_name(m) + "-" +
         regularization_name(r2);
}

PostProcessStrategy PostProcessStrategy::parse(const std::string& token) {
  const auto first = token.find('-');
  const auto second = token.find('-', first + 1);
  if (first == std::string::npos || second == std::string::npos) {
    throw std::invalid_argument("strategy token must be R1-M-R2: " + token);
  }
  auto reg_of = [&](const std::string& name) {
    if (name == "Id") return RegularizationMode::Id;
    if (name == "TIK") return RegularizationMode::Tik;
    if (name == "THR") return RegularizationMode::Thr;
    if (name == "SDP") return RegularizationMode::Sdp;
    throw std::invalid_argument("unknown regularization: " + name);
  };
  auto mit_of = [&](const std::string& name) {
    if (name == "Id") return MitigationMode::Id;
    if (name == "SINGLE") return MitigationMode::Single;
    if (name == "MEAN") return MitigationMode::Mean;
    if (name == "SPLIT") return MitigationMode::Split;
    throw std::invalid_argument("unknown mitigation: " + name);
  };
  PostProcessStrategy s;
  s.r1 = reg_of(token.substr(0, first));
  s.m = mit_of(token.substr(first + 1, second - first - 1));
  s.r2 = reg_of(token.substr(second + 1));
  return s;
}

PostProcessStrategy canonical_strategy(PostProcessStrategy s) {
  // After SDP the diagonal is exactly 1, so any mitigation estimates
  // survival 1 and acts as the identity.
  if (s.r1 == RegularizationMode::Sdp && s.m != MitigationMode::Id) {
    s.m = MitigationMode::Id;
  }
  if (s.m == MitigationMode::Id) {
    // Every regularizer outputs a PSD matrix, on which TIK and THR act as
    // the identity; SDP is idempotent.
    if (s.r1 != RegularizationMode::Id &&
        (s.r2 == RegularizationMode::Tik || s.r2 == RegularizationMode::Thr)) {
      s.r2 = RegularizationMode::Id;
    }
    if (s.r1 == RegularizationMode::Sdp && s.r2 == RegularizationMode::Sdp) {
      s.r2 = RegularizationMode::Id;
    }
    // A lone regularizer is written in the R1 slot.
    if (s.r1 == RegularizationMode::Id && s.r2 != RegularizationMode::Id) {
      std::swap(s.r1, s.r2);
    }
  }
  return s;
}

std::vector<PostProcessStrategy> enumerate_strategies() {
  static const RegularizationMode regs[] = {
      RegularizationMode::Id, RegularizationMode::Tik, RegularizationMode::Thr,
      RegularizationMode::Sdp};
  static const MitigationMode mits[] = {MitigationMode::Id,
                                        MitigationMode::Single,
                                        MitigationMode::Mean,
                                        MitigationMode::Split};
  std::vector<PostProcessStrategy> out;
  for (auto r1 : regs) {
    for (auto m : mits) {
      for (auto r2 : regs) {
        const PostProcessStrategy s = canonical_strategy({r1, m, r2});
        if (std::find(out.begin(), out.end(), s) == out.end()) {
          out.push_back(s);
        }
      }
    }
  }
  return out;
}

KernelMatrix apply_strategy(const KernelMatrix& device,
                            const PostProcessStrategy& strategy, int qubits,
                            int n_mean) {
  const PostProcessStrategy s = canonical_strategy(strategy);

  KernelMatrix stage = device;
  stage.entries = regularize(device.entries, s.r1);
  if (s.m != MitigationMode::Id) {
    // survival is estimated from the R1-processed diagonal; structural
    // availability (measured or exact) is that of the input matrix
    const SurvivalEstimate est = estimate_survival(stage, s.m, qubits, n_mean);
    stage = mitigate(stage, est, qubits);
  }
  stage.entries = regularize(stage.entries, s.r2);
  stage.provenance = Provenance::Post;
  return stage;
}

double relative_improvement(const Eigen::Ref<const Eigen::MatrixXd>& post,
                            const Eigen::Ref<const Eigen::MatrixXd>& raw,
                            const Eigen::Ref<const Eigen::MatrixXd>& exact) {
  const double a_raw = matrix_alignment(raw, exact);
  const double headroom = 1.0 - a_raw;
  if (headroom <= 1e-15) {
    throw std::invalid_argument(
        "relative_improvement: raw matrix already perfectly aligned");
  }
  return (matrix_alignment(post, exact) - a_raw) / headroom;
}

std::vector<StrategyScore> rank_strategies(
    const KernelMatrix& device, const Eigen::Ref<const Eigen::MatrixXd>& exact,
    int qubits, int n_mean) {
  const double a_raw = matrix_alignment(device.entries, exact);
  const double headroom = 1.0 - a_raw;

  std::vector<StrategyScore> scores;
  for (const PostProcessStrategy& s : enumerate_strategies()) {
    StrategyScore score;
    score.strategy = s;
    try {
      const KernelMatrix post = apply_strategy(device, s, qubits, n_mean);
      score.alignment = matrix_alignment(post.entries, exact);
      score.q = headroom <= 1e-15 ? 0.0 : (score.alignment - a_raw) / headroom;
      score.feasible = true;
    } catch (const MitigationInfeasible& err) {
      score.feasible = false;
      score.failure_reason = err.what();
    }
    scores.push_back(std::move(score));
  }

  // descending alignment, quantized so float dust cannot break enumeration
  // order among ties; infeasible entries sink to the bottom
  auto rank_of = [](const StrategyScore& s) {
    return s.feasible ? std::llround(s.alignment / 1e-12) : LLONG_MIN;
  };
  std::stable_sort(scores.begin(), scores.end(),
                   [&](const StrategyScore& a, const StrategyScore& b) {
                     return rank_of(a) > rank_of(b);
                   });
  return scores;
}

}  // namespace qekl
