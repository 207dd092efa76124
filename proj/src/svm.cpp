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
#include "qekl/svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "qekl/rng.hpp"

namespace qekl {

namespace {

constexpr double kSupportThreshold = 1e-8;
constexpr double kIndefiniteTol = -1e-8;

// Analytic two-variable update of Platt's SMO. Returns true when the pair
// (i, j) made progress; alpha, f_cache and b are updated in place.
bool take_step(int i, int j, const Eigen::Ref<const Eigen::MatrixXd>& K,
               const std::vector<int>& y, double C, Eigen::VectorXd& alpha,
               Eigen::VectorXd& f_cache, double& b) {
  if (i == j) return false;
  const double yi = y[i], yj = y[j];
  const double ei = f_cache[i] - yi;
  const double ej = f_cache[j] - yj;
  const double ai_old = alpha[i], aj_old = alpha[j];

  double lo, hi;
  if (yi != yj) {
    lo = std::max(0.0, aj_old - ai_old);
    hi = std::min(C, C + aj_old - ai_old);
  } else {
    lo = std::max(0.0, ai_old + aj_old - C);
    hi = std::min(C, ai_old + aj_old);
  }
  if (hi - lo < 1e-12) return false;

  const double eta = K(i, i) + K(j, j) - 2.0 * K(i, j);
  if (eta <= 1e-12) return false;

  double aj = aj_old + yj * (ei - ej) / eta;
  aj = std::clamp(aj, lo, hi);
  if (std::abs(aj - aj_old) < 1e-5 * (aj + aj_old + 1e-8)) return false;
  const double ai = ai_old + yi * yj * (aj_old - aj);

  const double b1 = b - ei - yi * (ai - ai_old) * K(i, i) -
                    yj * (aj - aj_old) * K(i, j);
  const double b2 = b - ej - yi * (ai - ai_old) * K(i, j) -
                    yj * (aj - aj_old) * K(j, j);
  double b_new;
  if (ai > 0.0 && ai < C) {
    b_new = b1;
  } else if (aj > 0.0 && aj < C) {
    b_new = b2;
  } else {
    b_new = 0.5 * (b1 + b2);
  }

  const double db = b_new - b;
  f_cache += (yi * (ai - ai_old)) * K.col(i) + (yj * (aj - aj_old)) * K.col(j);
  f_cache.array() += db;
  alpha[i] = ai;
  alpha[j] = aj;
  b = b_new;
  return true;
}

}  // namespace

SvmModel svm_fit(const Eigen::Ref<const Eigen::MatrixXd>& kernel,
                 const std::vector<int>& labels, double C,
                 const SvmOptions& options) {
  const int n = static_cast<int>(labels.size());
  if (kernel.rows() != n || kernel.cols() != n) {
    throw std::invalid_argument("svm_fit: kernel/label size mismatch");
  }
  if (C <= 0.0) throw std::invalid_argument("svm_fit: C must be positive");
  for (int label : labels) {
    if (label != 1 && label != -1) {
      throw std::invalid_argument("svm_fit: labels must be +-1");
    }
  }
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        0.5 * (kernel + kernel.transpose()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < kIndefiniteTol) {
      throw IndefiniteKernel("svm_fit: kernel matrix is indefinite");
    }
  }

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd f_cache = Eigen::VectorXd::Zero(n);  // f(x_i) at alpha=0,b=0
  double b = 0.0;
  Rng rng = keyed_rng(options.seed, 0x53564d);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  const double tol = options.kkt_tol;
  int passes = 0;
  for (;;) {
    int changed = 0;
    for (int i = 0; i < n; ++i) {
      const double ei = f_cache[i] - labels[i];
      const double r = ei * labels[i];
      const bool violates =
          (r < -tol && alpha[i] < C) || (r > tol && alpha[i] > 0.0);
      if (!violates) continue;

      // second-choice heuristic: largest |E_i - E_j|, index tie-break
      int best_j = -1;
      double best_gap = -1.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const double gap = std::abs(ei - (f_cache[j] - labels[j]));
        if (gap > best_gap) {
          best_gap = gap;
          best_j = j;
        }
      }
      if (best_j >= 0 &&
          take_step(i, best_j, kernel, labels, C, alpha, f_cache, b)) {
        ++changed;
        continue;
      }
      rng.shuffle(order);
      for (int j : order) {
        if (j == i || j == best_j) continue;
        if (take_step(i, j, kernel, labels, C, alpha, f_cache, b)) {
          ++changed;
          break;
        }
      }
    }
    if (changed == 0) break;  // KKT satisfied within tol for every point
    if (++passes > options.max_passes) {
      throw NonConvergence("svm_fit: pass budget exhausted");
    }
  }

  SvmModel model;
  model.alpha = alpha;
  model.b = b;
  model.labels = labels;
  model.C = C;
  for (int i = 0; i < n; ++i) {
    if (alpha[i] > kSupportThreshold) model.support_indices.push_back(i);
  }
  return model;
}

Eigen::VectorXd svm_decision_function(
    const SvmModel& model,
    const Eigen::Ref<const Eigen::MatrixXd>& kernel_cross) {
  const int n_train = static_cast<int>(model.labels.size());
  if (kernel_cross.cols() != n_train) {
    throw std::invalid_argument("svm_decision_function: column count mismatch");
  }
  Eigen::VectorXd coeff(n_train);
  for (int i = 0; i < n_train; ++i) coeff[i] = model.alpha[i] * model.labels[i];
  return (kernel_cross * coeff).array() + model.b;
}

std::vector<int> svm_predict(
    const SvmModel& model,
    const Eigen::Ref<const Eigen::MatrixXd>& kernel_cross) {
  const Eigen::VectorXd decision = svm_decision_function(model, kernel_cross);
  std::vector<int> labels(decision.size());
  for (Eigen::Index i = 0; i < decision.size(); ++i) {
    labels[i] = decision[i] >= 0.0 ? 1 : -1;
  }
  return labels;
}

double accuracy(const std::vector<int>& predicted,
                const std::vector<int>& truth) {
  if (predicted.empty() || predicted.size() != truth.size()) {
    throw std::invalid_argument("accuracy: empty or mismatched inputs");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] == truth[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

std::string svm_to_json(const SvmModel& model) {
  nlohmann::json j;
  j["alpha"] = std::vector<double>(model.alpha.begin(), model.alpha.end());
  j["b"] = model.b;
  j["support_indices"] = model.support_indices;
  j["labels"] = model.labels;
  j["C"] = model.C;
  return j.dump(2);
}

SvmModel svm_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  SvmModel model;
  const auto alpha = j.at("alpha").get<std::vector<double>>();
  model.alpha = Eigen::Map<const Eigen::VectorXd>(alpha.data(),
                                                  static_cast<Eigen::Index>(alpha.size()));
  model.b = j.at("b").get<double>();
  model.support_indices = j.at("support_indices").get<std::vector<int>>();
  model.labels = j.at("labels").get<std::vector<int>>();
  model.C = j.at("C").get<double>();
  return model;
}

}  // namespace qekl
