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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qekl/alignment.hpp"
#include "qekl/config.hpp"
#include "qekl/hash.hpp"
#include "qekl/io.hpp"
#include "qekl/pipeline.hpp"
#include "qekl/postprocess.hpp"
#include "qekl/svm.hpp"

namespace fs = std::filesystem;
using namespace qekl;

namespace {

ExperimentConfig load_with_overrides(const std::string& config_path,
                                     int threads_override,
                                     const std::string& output_override) {
  ExperimentConfig config =
      config_path.empty() ? ExperimentConfig{} : load_config(config_path);
  if (threads_override > 0) config.threads = threads_override;
  if (!output_override.empty()) config.output_dir = output_override;
  return config;
}

int run_command(const std::string& config_path, int threads,
                const std::string& output_dir) {
  const ExperimentConfig config =
      load_with_overrides(config_path, threads, output_dir);
  const ExperimentReport report = run_pipeline(config);
  std::cout << report_to_json(report);
  return 0;
}

int gen_data_command(const std::string& generator, std::uint64_t seed,
                     const std::string& out_dir) {
  fs::create_directories(out_dir);
  std::pair<LabeledDataset, LabeledDataset> split;
  if (generator == "checkerboard") {
    split = gen_checkerboard(seed);
  } else if (generator == "donuts") {
    split = gen_symmetric_donuts(seed);
  } else {
    throw std::invalid_argument("unknown generator: " + generator);
  }
  const fs::path dir(out_dir);
  write_dataset_csv((dir / "train.csv").string(), split.first);
  write_dataset_csv((dir / "test.csv").string(), split.second);
  std::cout << "wrote " << (dir / "train.csv").string() << " ("
            << split.first.size() << " points) and "
            << (dir / "test.csv").string() << " (" << split.second.size()
            << " points)\n";
  return 0;
}

int kernel_command(const std::string& config_path, const std::string& out_path,
                   bool force_exact, bool cross, double rbf_sigma, int threads) {
  const ExperimentConfig config = load_with_overrides(config_path, threads, "");
  const PreparedExperiment prep = prepare_experiment(config);

  if (cross) {
    Eigen::MatrixXd k =
        rbf_sigma > 0.0
            ? rbf_cross_kernel(prep.test, prep.train, rbf_sigma)
            : cross_kernel(prep.test, prep.train, prep.theta, prep.shape,
                           config.threads);
    write_cross_csv(out_path, k);
    std::cout << "wrote " << out_path << " (" << k.rows() << "x" << k.cols()
              << " cross kernel)\n";
    return 0;
  }

  const NoiseModel noise{config.noise.lambda0, config.noise.enabled && !force_exact};
  const ShotConfig shot_cfg{config.shots.shots, config.shots.seed,
                            config.shots.measure_diagonal};
  const bool sampled = config.shots.enabled && !force_exact;

  KernelMatrix k =
      rbf_sigma > 0.0
          ? rbf_kernel_matrix(prep.train, rbf_sigma)
          : kernel_matrix(prep.train, prep.theta, prep.shape,
                          noise.enabled ? &noise : nullptr,
                          sampled ? &shot_cfg : nullptr, config.threads);

  MatrixMeta meta;
  meta.provenance = provenance_name(k.provenance);
  meta.shots = k.shots;
  meta.seed = sampled ? config.shots.seed : config.data.seed;
  meta.n = k.size();
  meta.qubits = config.ansatz.qubits;
  meta.layers = config.ansatz.layers;
  meta.dataset_id = prep.train.dataset_id;
  meta.theta_hash = hex64(hash_vector(prep.theta));
  meta.diagonal_measured = k.diagonal_measured;
  meta.config_hash = config.hash();
  write_matrix_csv(out_path, k, meta);
  std::cout << "wrote " << out_path << " (" << meta.provenance << ", n=" << meta.n
            << ")\n";
  return 0;
}

int train_command(const std::string& config_path, const std::string& out_dir,
                  int threads) {
  const ExperimentConfig config = load_with_overrides(config_path, threads, "");
  const PreparedExperiment prep = prepare_experiment(config);
  fs::create_directories(out_dir);

  TrainConfig tc;
  tc.learning_rate = config.train.learning_rate;
  tc.batch_size = config.train.batch_size;
  tc.iterations = config.train.iterations;
  tc.fd_step = config.train.fd_step;
  tc.seed = config.train.seed;
  tc.threads = config.threads;
  tc.log_full_every = config.train.log_full_every;

  const NoiseModel noise{config.noise.lambda0, config.noise.enabled};
  const ShotConfig shot_cfg{config.shots.shots, config.shots.seed,
                            config.shots.measure_diagonal};
  const TrainResult result = train_alignment(
      prep.train, prep.theta, prep.shape, tc,
      config.noise.enabled ? &noise : nullptr,
      config.shots.enabled ? &shot_cfg : nullptr);

  const fs::path dir(out_dir);
  write_parameters_json((dir / "theta.json").string(), result.theta);
  write_history_csv((dir / "history.csv").string(), result.history);
  const double final_alignment = target_alignment(
      kernel_matrix(prep.train, result.theta, prep.shape, nullptr, nullptr,
                    config.threads)
          .entries,
      prep.train.labels, true);
  std::cout << "trained " << tc.iterations << " iterations; full-train alignment "
            << final_alignment << "\n";
  return 0;
}

int postprocess_command(const std::string& matrix_path,
                        const std::string& strategy_token, bool rank,
                        const std::string& exact_path, int qubits_flag,
                        int n_mean, const std::string& out_prefix) {
  MatrixMeta meta;
  const KernelMatrix device = read_matrix_csv(matrix_path, &meta);
  const int qubits = qubits_flag > 0 ? qubits_flag : meta.qubits;
  if (qubits <= 0) {
    throw std::invalid_argument(
        "qubit count unknown: pass --qubits or provide a sidecar");
  }

  if (rank) {
    if (exact_path.empty()) {
      throw std::invalid_argument("--rank needs --exact <matrix.csv>");
    }
    const KernelMatrix exact = read_matrix_csv(exact_path);
    const auto scores = rank_strategies(device, exact.entries, qubits, n_mean);
    std::printf("%-16s %12s %12s %s\n", "strategy", "alignment", "q", "feasible");
    for (const auto& score : scores) {
      if (score.feasible) {
        std::printf("%-16s %12.8f %12.8f yes\n", score.strategy.token().c_str(),
                    score.alignment, score.q);
      } else {
        std::printf("%-16s %12s %12s no (%s)\n", score.strategy.token().c_str(),
                    "-", "-", score.failure_reason.c_str());
      }
    }
    if (!out_prefix.empty()) {
      write_ranking_csv(out_prefix + "ranking.csv", scores);
    }
    return 0;
  }

  const PostProcessStrategy strategy = PostProcessStrategy::parse(strategy_token);
  const KernelMatrix post = apply_strategy(device, strategy, qubits, n_mean);
  const std::string out_path = out_prefix.empty()
                                   ? matrix_path + ".post.csv"
                                   : out_prefix + "post.csv";
  meta.provenance = provenance_name(post.provenance);
  meta.diagonal_measured = post.diagonal_measured;
  write_matrix_csv(out_path, post, meta);
  std::cout << "applied " << strategy.token() << ", wrote " << out_path;
  if (post.out_of_range_entries > 0) {
    std::cout << " (" << post.out_of_range_entries
              << " entries left [0,1] during mitigation)";
  }
  std::cout << "\n";
  return 0;
}

int svm_fit_command(const std::string& matrix_path, const std::string& data_path,
                    double C, std::uint64_t seed, const std::string& model_path) {
  const KernelMatrix k = read_matrix_csv(matrix_path);
  const LabeledDataset data = read_dataset_csv(data_path, "train");
  if (data.size() != k.size()) {
    throw std::invalid_argument("dataset size does not match kernel matrix");
  }
  const SvmModel model = svm_fit(k.entries, data.labels, C, {.seed = seed});
  write_text_file(model_path, svm_to_json(model));
  std::cout << "fit SVM with " << model.support_indices.size()
            << " support vectors, wrote " << model_path << "\n";
  return 0;
}

int svm_predict_command(const std::string& model_path, const std::string& cross_path,
                        const std::string& out_path) {
  const SvmModel model = svm_from_json(read_text_file(model_path));
  const Eigen::MatrixXd cross = read_cross_csv(cross_path);
  const std::vector<int> labels = svm_predict(model, cross);
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << "label\n";
  for (int label : labels) out << label << "\n";
  std::cout << "wrote " << labels.size() << " predictions to " << out_path << "\n";
  return 0;
}

int svm_score_command(const std::string& pred_path, const std::string& data_path) {
  std::ifstream in(pred_path);
  if (!in) throw std::runtime_error("cannot open " + pred_path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<int> predicted;
  while (std::getline(in, line)) {
    if (!line.empty()) predicted.push_back(std::stoi(line));
  }
  const LabeledDataset data = read_dataset_csv(data_path, "test");
  std::printf("accuracy %.6f\n", accuracy(predicted, data.labels));
  return 0;
}

int sweep_command(const std::string& config_path, const std::string& out_path,
                  int threads) {
  const ExperimentConfig config = load_with_overrides(config_path, threads, "");
  const auto cells = run_sweep(config);
  write_sweep_csv(out_path, cells);
  std::cout << "wrote " << cells.size() << " sweep cells to " << out_path << "\n";
  return 0;
}

int report_command(const std::vector<std::string>& dirs,
                   const std::string& out_path) {
  std::string table =
      "dataset,total_samples,width,depth,untrained_min,untrained_max,trained\n";
  for (const auto& dir : dirs) {
    const nlohmann::json j =
        nlohmann::json::parse(read_text_file((fs::path(dir) / "report.json").string()));
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s,%d,%d,%d,%.4g,%.4g,%.4g\n",
                  j.value("dataset-id", std::string("?")).c_str(),
                  j.value("n-train", 0) + j.value("n-test", 0),
                  j.value("qubits", 0), j.value("layers", 0),
                  j.value("untrained-min", 0.0), j.value("untrained-max", 0.0),
                  j.value("trained-accuracy", 0.0));
    table += buf;
  }
  std::cout << table;
  if (!out_path.empty()) write_text_file(out_path, table);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum embedding kernel laboratory"};
  app.require_subcommand(1);

  std::string config_path, output_dir, out_path, out_prefix;
  std::string generator = "checkerboard";
  std::string matrix_path, exact_path, strategy_token = "Id-Id-Id";
  std::string model_path, data_path, cross_path, pred_path;
  std::vector<std::string> report_dirs;
  std::uint64_t seed = 7, svm_seed = 0;
  int threads = 0, qubits_flag = 0, n_mean = 0;
  double C = 1.0, rbf_sigma = 0.0;
  bool force_exact = false, rank = false, cross = false;

  auto* run = app.add_subcommand("run", "full pipeline from a config file");
  run->add_option("--config", config_path, "experiment config file")->required();
  run->add_option("--threads", threads, "worker cap");
  run->add_option("--output", output_dir, "override output directory");

  auto* gen = app.add_subcommand("gen-data", "write dataset CSVs");
  gen->add_option("--generator", generator, "checkerboard | donuts");
  gen->add_option("--seed", seed, "generation seed");
  gen->add_option("--out", output_dir, "output directory")->required();

  auto* kern = app.add_subcommand("kernel", "compute and write a kernel matrix");
  kern->add_option("--config", config_path, "experiment config file")->required();
  kern->add_option("--out", out_path, "output matrix CSV")->required();
  kern->add_flag("--exact", force_exact, "ignore noise/shots sections");
  kern->add_flag("--cross", cross, "test x train rectangular kernel");
  kern->add_option("--rbf", rbf_sigma, "RBF baseline with this sigma");
  kern->add_option("--threads", threads, "worker cap");

  auto* train = app.add_subcommand("train", "alignment training");
  train->add_option("--config", config_path, "experiment config file")->required();
  train->add_option("--out", output_dir, "output directory")->required();
  train->add_option("--threads", threads, "worker cap");

  auto* post = app.add_subcommand("postprocess", "mitigate/regularize a matrix file");
  post->add_option("--matrix", matrix_path, "device matrix CSV")->required();
  post->add_option("--strategy", strategy_token, "strategy token R1-M-R2");
  post->add_flag("--rank", rank, "rank all 42 strategies");
  post->add_option("--exact", exact_path, "exact matrix CSV (for --rank)");
  post->add_option("--qubits", qubits_flag, "qubit count override");
  post->add_option("--n-mean", n_mean, "diagonal entries used by MEAN (0 = all)");
  post->add_option("--out", out_prefix, "output path prefix");

  auto* svm_cmd = app.add_subcommand("svm", "kernel SVM");
  svm_cmd->require_subcommand(1);
  auto* fit = svm_cmd->add_subcommand("fit", "fit on a precomputed kernel");
  fit->add_option("--matrix", matrix_path, "training kernel CSV")->required();
  fit->add_option("--data", data_path, "training dataset CSV")->required();
  fit->add_option("--C", C, "soft-margin parameter");
  fit->add_option("--seed", svm_seed, "pair-selection seed");
  fit->add_option("--model", model_path, "output model JSON")->required();
  auto* predict = svm_cmd->add_subcommand("predict", "predict from a cross kernel");
  predict->add_option("--model", model_path, "model JSON")->required();
  predict->add_option("--cross", cross_path, "test x train kernel CSV")->required();
  predict->add_option("--out", out_path, "output labels CSV")->required();
  auto* score = svm_cmd->add_subcommand("score", "accuracy of predictions");
  score->add_option("--pred", pred_path, "predicted labels CSV")->required();
  score->add_option("--data", data_path, "reference dataset CSV")->required();

  auto* sweep = app.add_subcommand("sweep", "lambda0 x M post-processing study");
  sweep->add_option("--config", config_path, "experiment config file")->required();
  sweep->add_option("--out", out_path, "output CSV")->required();
  sweep->add_option("--threads", threads, "worker cap");

  auto* report = app.add_subcommand("report", "assemble Table-style rows");
  report->add_option("--dir", report_dirs, "run output directories")->required();
  report->add_option("--out", out_path, "output CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(config_path, threads, output_dir);
    if (*gen) return gen_data_command(generator, seed, output_dir);
    if (*kern) {
      return kernel_command(config_path, out_path, force_exact, cross, rbf_sigma,
                            threads);
    }
    if (*train) return train_command(config_path, output_dir, threads);
    if (*post) {
      return postprocess_command(matrix_path, strategy_token, rank, exact_path,
                                 qubits_flag, n_mean, out_prefix);
    }
    if (*fit) return svm_fit_command(matrix_path, data_path, C, svm_seed, model_path);
    if (*predict) return svm_predict_command(model_path, cross_path, out_path);
    if (*score) return svm_score_command(pred_path, data_path);
    if (*sweep) return sweep_command(config_path, out_path, threads);
    if (*report) return report_command(report_dirs, out_path);
  } catch (const StageError& err) {
    std::cerr << "error " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
