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
#include "qekl/kernel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

#include "qekl/parallel.hpp"
#include "qekl/rng.hpp"

namespace qekl {

namespace {

Circuit adjoint_overlap_circuit(const Eigen::VectorXd& x1,
                                const Eigen::VectorXd& x2,
                                const ParameterVector& theta,
                                const AnsatzShape& shape) {
  Circuit circuit = build_embedding(x1, theta, shape);
  const Circuit back = adjoint(build_embedding(x2, theta, shape));
  circuit.gates.insert(circuit.gates.end(), back.gates.begin(),
                       back.gates.end());
  return circuit;
}

}  // namespace

std::string provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Exact: return "EXACT";
    case Provenance::Device: return "DEVICE";
    case Provenance::Sampled: return "SAMPLED";
    case Provenance::Post: return "POST";
  }
  throw std::logic_error("provenance_name: unknown tag");
}

Provenance provenance_from_name(const std::string& name) {
  if (name == "EXACT") return Provenance::Exact;
  if (name == "DEVICE") return Provenance::Device;
  if (name == "SAMPLED") return Provenance::Sampled;
  if (name == "POST") return Provenance::Post;
  throw std::invalid_argument("unknown provenance tag: " + name);
}

double overlap_pure(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                    const ParameterVector& theta, const AnsatzShape& shape) {
  const Statevector psi =
      simulate_pure(adjoint_overlap_circuit(x1, x2, theta, shape));
  return std::norm(psi[0]);
}

double overlap_mixed(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  if (rho1.rows() != rho2.rows() || rho1.cols() != rho2.cols()) {
    throw std::invalid_argument("overlap_mixed: dimension mismatch");
  }
  // Tr(AB) = sum_ij A_ij B_ji; both are Hermitian so the result is real.
  return (rho1.array() * rho2.transpose().array()).sum().real();
}

double overlap_device(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                      const ParameterVector& theta, const AnsatzShape& shape,
                      const NoiseModel& noise) {
  const DensityMatrix rho =
      simulate_noisy(adjoint_overlap_circuit(x1, x2, theta, shape), noise);
  return rho(0, 0).real();
}

KernelMatrix global_depolarized_matrix(const KernelMatrix& exact,
                                       const Eigen::VectorXd& lambdas,
                                       int qubits) {
  const int n = exact.size();
  if (lambdas.size() != n) {
    throw std::invalid_argument("global_depolarized_matrix: lambda length");
  }
  if ((lambdas.array() < 0.0).any() || (lambdas.array() > 1.0).any()) {
    throw std::invalid_argument("global_depolarized_matrix: lambda outside [0,1]");
  }
  const double mixed = std::pow(2.0, -qubits);
  KernelMatrix out;
  out.provenance = Provenance::Device;
  out.diagonal_measured = true;
  out.entries.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double ll = lambdas[i] * lambdas[j];
      out.entries(i, j) = ll * exact.entries(i, j) + (1.0 - ll) * mixed;
    }
  }
  return out;
}

double sample_entry(double p, const ShotConfig& cfg, int i, int j,
                    int* clamp_warnings) {
  if (cfg.shots < 1) throw std::invalid_argument("sample_entry: shots < 1");
  if (p < 0.0 || p > 1.0) {
    if (clamp_warnings) ++*clamp_warnings;
    p = std::clamp(p, 0.0, 1.0);
  }
  Rng rng = keyed_rng(cfg.seed, static_cast<std::uint64_t>(i),
                      static_cast<std::uint64_t>(j));
  std::int64_t successes = 0;
  for (std::int64_t s = 0; s < cfg.shots; ++s) {
    if (rng.bernoulli(p)) ++successes;
  }
  return static_cast<double>(successes) / static_cast<double>(cfg.shots);
}

KernelMatrix kernel_matrix(const LabeledDataset& data,
                           const ParameterVector& theta,
                           const AnsatzShape& shape, const NoiseModel* noise,
                           const ShotConfig* shots, int threads) {
  data.validate();
  const int n = data.size();
  if (n < 2) throw std::invalid_argument("kernel_matrix: need n >= 2");

  const bool noisy = noise != nullptr && noise->enabled;
  const bool sampled = shots != nullptr;
  const bool measure_diagonal = sampled ? shots->measure_diagonal : noisy;

  KernelMatrix out;
  out.entries.setOnes(n, n);
  out.provenance = sampled   ? Provenance::Sampled
                   : noisy   ? Provenance::Device
                             : Provenance::Exact;
  out.shots = sampled ? shots->shots : 0;
  out.diagonal_measured = (noisy || sampled) && measure_diagonal;

  struct Entry {
    int i, j;
  };
  std::vector<Entry> todo;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      // The exact diagonal is known to be 1 and never simulated; noisy
      // paths measure it only on request.
      if (i == j && !out.diagonal_measured) continue;
      todo.push_back({i, j});
    }
  }

  std::atomic<int> clamps{0};
  parallel_for(
      static_cast<int>(todo.size()), threads,
      [&](int k) {
        const auto [i, j] = todo[static_cast<std::size_t>(k)];
        double p = noisy ? overlap_device(data.points[i], data.points[j],
                                          theta, shape, *noise)
                         : overlap_pure(data.points[i], data.points[j], theta,
                                        shape);
        if (sampled) {
          int local_clamps = 0;
          p = sample_entry(p, *shots, i, j, &local_clamps);
          if (local_clamps) clamps += local_clamps;
        }
        out.entries(i, j) = p;
        out.entries(j, i) = p;
      });
  out.clamp_warnings = clamps.load();
  return out;
}

Eigen::MatrixXd cross_kernel(const LabeledDataset& rows,
                             const LabeledDataset& cols,
                             const ParameterVector& theta,
                             const AnsatzShape& shape, int threads) {
  rows.validate();
  cols.validate();
  const int nr = rows.size();
  const int nc = cols.size();
  Eigen::MatrixXd out(nr, nc);
  parallel_for(nr * nc, threads, [&](int k) {
    const int i = k / nc;
    const int j = k % nc;
    out(i, j) = overlap_pure(rows.points[i], cols.points[j], theta, shape);
  });
  return out;
}

double rbf_kernel(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                  double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("rbf_kernel: sigma <= 0");
  return std::exp(-(x1 - x2).squaredNorm() / (2.0 * sigma * sigma));
}

KernelMatrix rbf_kernel_matrix(const LabeledDataset& data, double sigma) {
  data.validate();
  const int n = data.size();
  KernelMatrix out;
  out.entries.setOnes(n, n);
  out.provenance = Provenance::Exact;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double v = rbf_kernel(data.points[i], data.points[j], sigma);
      out.entries(i, j) = v;
      out.entries(j, i) = v;
    }
  }
  return out;
}

Eigen::MatrixXd rbf_cross_kernel(const LabeledDataset& rows,
                                 const LabeledDataset& cols, double sigma) {
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (int i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < cols.size(); ++j) {
      out(i, j) = rbf_kernel(rows.points[i], cols.points[j], sigma);
    }
  }
  return out;
}

double spectral_norm(const Eigen::Ref<const Eigen::MatrixXd>& a) {
  constexpr double kTol = 1e-8;
  constexpr int kMaxIterations = 10000;
  if (a.size() == 0) return 0.0;
  // power iteration on A^T A; the norm is the square root of its top
  // eigenvalue
  Rng rng = keyed_rng(0x9f0b, static_cast<std::uint64_t>(a.rows()),
                      static_cast<std::uint64_t>(a.cols()));
  Eigen::VectorXd v(a.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.uniform(-1.0, 1.0);
  double vnorm = v.norm();
  if (vnorm == 0.0) return 0.0;
  v /= vnorm;
  double eigen_prev = 0.0;
  for (int it = 0; it < kMaxIterations; ++it) {
    Eigen::VectorXd w = a.transpose() * (a * v);
    const double eigen_est = v.dot(w);
    const double wnorm = w.norm();
    if (wnorm == 0.0) return 0.0;
    v = w / wnorm;
    if (std::abs(eigen_est - eigen_prev) <= kTol * std::max(1.0, eigen_est)) {
      return std::sqrt(std::max(0.0, eigen_est));
    }
    eigen_prev = eigen_est;
  }
  return std::sqrt(std::max(0.0, eigen_prev));
}

std::vector<NormScanRow> operator_norm_error_scan(
    const KernelMatrix& exact, const std::vector<std::int64_t>& shot_counts,
    int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("norm scan: trials < 1");
  const int n = exact.size();
  std::vector<NormScanRow> table;
  table.reserve(shot_counts.size());
  for (const std::int64_t shots : shot_counts) {
    double total = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
      ShotConfig cfg{shots, stream_key(seed, static_cast<std::uint64_t>(trial)),
                     true};
      Eigen::MatrixXd sampled(n, n);
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
          const double est = sample_entry(exact.entries(i, j), cfg, i, j);
          sampled(i, j) = est;
          sampled(j, i) = est;
        }
      }
      total += spectral_norm(sampled - exact.entries);
    }
    table.push_back({shots, total / trials});
  }
  return table;
}

}  // namespace qekl
