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
#ifndef QEKL_PIPELINE_HPP_
#define QEKL_PIPELINE_HPP_

#include <stdexcept>
#include <string>
#include <vector>

#include "qekl/config.hpp"
#include "qekl/data.hpp"
#include "qekl/kernel.hpp"
#include "qekl/postprocess.hpp"

namespace qekl {

// Any pipeline failure, tagged with the stage that raised it.
struct StageError : std::runtime_error {
  StageError(const std::string& stage_name, const std::string& message)
      : std::runtime_error("[" + stage_name + "] " + message),
        stage(stage_name) {}
  std::string stage;
};

struct ExperimentReport {
  std::string name;
  std::string dataset_id;
  std::string config_hash;
  int n_train = 0;
  int n_test = 0;
  int qubits = 0;
  int layers = 0;
  std::vector<double> untrained_accuracies;
  double untrained_min = 0.0;
  double untrained_max = 0.0;
  int selected_init = -1;
  double alignment_before = 0.0;
  double alignment_after = 0.0;
  double trained_accuracy = 0.0;
  std::string strategy_used;
  double best_q = 0.0;  // only meaningful when ranking ran
  bool ranked = false;
};

// Generate/load data, pick the weakest of a few random initializations,
// train by kernel-target alignment, compute the configured kernel matrix,
// post-process, fit the SVM and score the test split. All artifacts land
// in config.output_dir; every failure is rethrown as a StageError.
ExperimentReport run_pipeline(const ExperimentConfig& config);

std::string report_to_json(const ExperimentReport& report);
void write_report_csv(const std::string& path, const ExperimentReport& report);

struct SweepCell {
  double lambda0 = 0.0;
  std::int64_t shots = 0;  // 0 = analytic device matrix
  std::string best_strategy;
  double alignment_raw = 0.0;
  double alignment_best = 0.0;
  double best_q = 0.0;
};

// The lambda0 x M post-processing study on the configured dataset at fixed
// embedding parameters: every grid cell ranks all 42 strategies against
// the exact matrix.
std::vector<SweepCell> run_sweep(const ExperimentConfig& config);

void write_sweep_csv(const std::string& path, const std::vector<SweepCell>& cells);

// Datasets and parameters prepared exactly the way run_pipeline does it;
// shared by the CLI subcommands.
struct PreparedExperiment {
  LabeledDataset train;
  LabeledDataset test;
  AnsatzShape shape;
  ParameterVector theta;  // loaded, or drawn from the train seed
};

PreparedExperiment prepare_experiment(const ExperimentConfig& config);

}  // namespace qekl

#endif  // QEKL_PIPELINE_HPP_
