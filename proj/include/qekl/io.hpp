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
#ifndef QEKL_IO_HPP_
#define QEKL_IO_HPP_

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "qekl/alignment.hpp"
#include "qekl/data.hpp"
#include "qekl/kernel.hpp"
#include "qekl/postprocess.hpp"

namespace qekl {

// Sidecar metadata stored next to every kernel-matrix file as
// <matrix>.meta.json.
struct MatrixMeta {
  std::string provenance = "EXACT";
  std::int64_t shots = 0;
  std::uint64_t seed = 0;
  int n = 0;
  int qubits = 0;
  int layers = 0;
  std::string dataset_id;
  std::string theta_hash;
  bool diagonal_measured = false;
  std::string config_hash;
};

std::string meta_path_for(const std::string& matrix_path);

// Full n x n matrix, one row per line, >= 15 significant digits.
void write_matrix_csv(const std::string& path, const KernelMatrix& matrix,
                      const MatrixMeta& meta);

// Rejects non-square input and asymmetry beyond 1e-9. The sidecar is
// loaded when present.
KernelMatrix read_matrix_csv(const std::string& path,
                             MatrixMeta* meta_out = nullptr);

// Rectangular cross-kernel files skip the symmetry check.
void write_cross_csv(const std::string& path, const Eigen::MatrixXd& matrix);
Eigen::MatrixXd read_cross_csv(const std::string& path);

// Header "x1,x2,label"; labels are +-1.
void write_dataset_csv(const std::string& path, const LabeledDataset& data);
LabeledDataset read_dataset_csv(const std::string& path,
                                const std::string& split = "",
                                const std::string& dataset_id = "");

// Plain JSON array of parameter values.
void write_parameters_json(const std::string& path, const ParameterVector& theta);
ParameterVector read_parameters_json(const std::string& path);

// Columns: iteration, batch_alignment, full_alignment (blank if unlogged),
// theta_hash.
void write_history_csv(const std::string& path,
                       const std::vector<TrainHistoryEntry>& history);

// Columns: strategy, alignment, q, feasible (+ failure reason).
void write_ranking_csv(const std::string& path,
                       const std::vector<StrategyScore>& scores);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace qekl

#endif  // QEKL_IO_HPP_
