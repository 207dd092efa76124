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
#ifndef QEKL_CONFIG_HPP_
#define QEKL_CONFIG_HPP_

#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

namespace qekl {

// Experiment configuration, stored as a line-oriented "key = value" file
// with [section] headers. serialize() emits a canonical form (fixed key
// order, %.17g numbers) that parses back to an identical config; its hash
// tags every artifact sidecar.
struct ExperimentConfig {
  struct Data {
    std::string generator = "checkerboard";  // checkerboard | donuts | file
    std::uint64_t seed = 7;
    std::string train_file;
    std::string test_file;
    int subset_train = 0;  // keep only the first k points, 0 = all
    int subset_test = 0;
  } data;

  struct Ansatz {
    int qubits = 5;
    int layers = 8;
  } ansatz;

  struct Train {
    bool enabled = true;
    double learning_rate = 0.2;
    int batch_size = 4;
    int iterations = 500;
    double fd_step = std::numbers::pi / 100.0;
    std::uint64_t seed = 1;
    int init_samples = 5;  // untrained initializations to draw
    int log_full_every = 0;
    std::string theta_file;  // skip training/init sampling, load parameters
  } train;

  struct Noise {
    bool enabled = false;
    double lambda0 = 1.0;
  } noise;

  struct Shots {
    bool enabled = false;
    std::int64_t shots = 0;
    std::uint64_t seed = 1;
    bool measure_diagonal = false;
  } shots;

  struct Postprocess {
    std::string strategy = "Id-Id-Id";  // strategy token or "rank"
    int n_mean = 0;                     // diagonal entries used by MEAN, 0 = all
  } postprocess;

  struct Svm {
    double C = 1.0;
    std::uint64_t seed = 0;
  } svm;

  struct Sweep {
    std::vector<double> lambda0_grid{0.95, 0.99};
    std::vector<std::int64_t> shots_grid{256, 4096};  // 0 = analytic
  } sweep;

  struct Report {
    bool boundary_grid = false;
    int boundary_resolution = 100;
  } report;

  std::string name = "experiment";
  std::string output_dir = "out";
  int threads = 1;

  std::string serialize() const;
  static ExperimentConfig parse(const std::string& text);
  std::string hash() const;  // hex64 of the canonical serialization
};

// Equal iff the canonical serializations agree.
bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

ExperimentConfig load_config(const std::string& path);
void save_config(const std::string& path, const ExperimentConfig& config);

}  // namespace qekl

#endif  // QEKL_CONFIG_HPP_
