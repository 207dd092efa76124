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
#include "qekl/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "qekl/alignment.hpp"
#include "qekl/hash.hpp"
#include "qekl/io.hpp"
#include "qekl/rng.hpp"
#include "qekl/svm.hpp"

namespace qekl {

namespace {

namespace fs = std::filesystem;

template <typename Fn>
auto stage(const std::string& name, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& err) {
    throw StageError(name, err.what());
  }
}

ParameterVector random_parameters(const AnsatzShape& shape, std::uint64_t seed,
                                  std::uint64_t index) {
  Rng rng = keyed_rng(seed, 0x1a17, index);
  ParameterVector theta(shape.parameter_count());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    theta[i] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  return theta;
}

std::pair<LabeledDataset, LabeledDataset> load_or_generate(
    const ExperimentConfig& config) {
  std::pair<LabeledDataset, LabeledDataset> split;
  if (config.data.generator == "checkerboard") {
    split = gen_checkerboard(config.data.seed);
  } else if (config.data.generator == "donuts") {
    split = gen_symmetric_donuts(config.data.seed);
  } else if (config.data.generator == "file") {
    split.first = read_dataset_csv(config.data.train_file, "train");
    split.second = read_dataset_csv(config.data.test_file, "test");
  } else {
    throw std::invalid_argument("unknown data generator: " +
                                config.data.generator);
  }
  if (config.data.subset_train > 0) {
    split.first = split.first.head(config.data.subset_train);
  }
  if (config.data.subset_test > 0) {
    split.second = split.second.head(config.data.subset_test);
  }
  return split;
}

MatrixMeta meta_for(const ExperimentConfig& config, const KernelMatrix& matrix,
                    const LabeledDataset& data, const ParameterVector& theta) {
  MatrixMeta meta;
  meta.provenance = provenance_name(matrix.provenance);
  meta.shots = matrix.shots;
  meta.seed = config.shots.enabled ? config.shots.seed : config.data.seed;
  meta.n = matrix.size();
  meta.qubits = config.ansatz.qubits;
  meta.layers = config.ansatz.layers;
  meta.dataset_id = data.dataset_id;
  meta.theta_hash = hex64(hash_vector(theta));
  meta.diagonal_measured = matrix.diagonal_measured;
  meta.config_hash = config.hash();
  return meta;
}

double untrained_test_accuracy(const LabeledDataset& train,
                               const LabeledDataset& test,
                               const ParameterVector& theta,
                               const AnsatzShape& shape,
                               const ExperimentConfig& config) {
  const KernelMatrix k_train =
      kernel_matrix(train, theta, shape, nullptr, nullptr, config.threads);
  const SvmModel model =
      svm_fit(k_train.entries, train.labels, config.svm.C, {.seed = config.svm.seed});
  const Eigen::MatrixXd k_cross =
      cross_kernel(test, train, theta, shape, config.threads);
  return accuracy(svm_predict(model, k_cross), test.labels);
}

void write_boundary_grid(const std::string& path, const LabeledDataset& train,
                         const SvmModel& model, const ParameterVector& theta,
                         const AnsatzShape& shape, int resolution, int threads) {
  double lo_x = train.points[0].x(), hi_x = lo_x;
  double lo_y = train.points[0].y(), hi_y = lo_y;
  for (const auto& p : train.points) {
    lo_x = std::min(lo_x, p.x());
    hi_x = std::max(hi_x, p.x());
    lo_y = std::min(lo_y, p.y());
    hi_y = std::max(hi_y, p.y());
  }
  const double mx = 0.05 * (hi_x - lo_x + 1e-12);
  const double my = 0.05 * (hi_y - lo_y + 1e-12);

  LabeledDataset mesh;
  mesh.split = "mesh";
  mesh.dataset_id = "boundary-grid";
  for (int iy = 0; iy < resolution; ++iy) {
    for (int ix = 0; ix < resolution; ++ix) {
      const double x = lo_x - mx + (hi_x - lo_x + 2 * mx) * ix / (resolution - 1);
      const double y = lo_y - my + (hi_y - lo_y + 2 * my) * iy / (resolution - 1);
      mesh.points.emplace_back(x, y);
      mesh.labels.push_back(1);  // placeholder, not used
    }
  }
  const Eigen::MatrixXd k_cross = cross_kernel(mesh, train, theta, shape, threads);
  const Eigen::VectorXd decision = svm_decision_function(model, k_cross);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "x,y,decision\n";
  char buf[128];
  for (int k = 0; k < static_cast<int>(mesh.points.size()); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", mesh.points[k].x(),
                  mesh.points[k].y(), decision[k]);
    out << buf;
  }
}

}  // namespace

PreparedExperiment prepare_experiment(const ExperimentConfig& config) {
  PreparedExperiment prep;
  auto split = load_or_generate(config);
  prep.train = std::move(split.first);
  prep.test = std::move(split.second);
  prep.shape = AnsatzShape{config.ansatz.qubits, config.ansatz.layers, 2};
  prep.theta = config.train.theta_file.empty()
                   ? random_parameters(prep.shape, config.train.seed, 0)
                   : read_parameters_json(config.train.theta_file);
  return prep;
}

ExperimentReport run_pipeline(const ExperimentConfig& config) {
  ExperimentReport report;
  report.name = config.name;
  report.config_hash = config.hash();
  report.qubits = config.ansatz.qubits;
  report.layers = config.ansatz.layers;

  const fs::path out_dir(config.output_dir);
  fs::create_directories(out_dir);
  save_config((out_dir / "config.ini").string(), config);

  const AnsatzShape shape{config.ansatz.qubits, config.ansatz.layers, 2};

  // data
  auto [train_set, test_set] = stage("data", [&] { return load_or_generate(config); });
  report.dataset_id = train_set.dataset_id;
  report.n_train = train_set.size();
  report.n_test = test_set.size();
  stage("data", [&] {
    write_dataset_csv((out_dir / "train.csv").string(), train_set);
    write_dataset_csv((out_dir / "test.csv").string(), test_set);
    return 0;
  });

  // untrained initializations: evaluate with exact kernels, keep the worst
  ParameterVector theta0;
  if (!config.train.theta_file.empty()) {
    theta0 = stage("init", [&] {
      return read_parameters_json(config.train.theta_file);
    });
    report.selected_init = -1;
  } else {
    stage("init", [&] {
      const int k = std::max(1, config.train.init_samples);
      std::vector<ParameterVector> candidates;
      for (int i = 0; i < k; ++i) {
        candidates.push_back(random_parameters(shape, config.train.seed,
                                               static_cast<std::uint64_t>(i)));
        report.untrained_accuracies.push_back(untrained_test_accuracy(
            train_set, test_set, candidates.back(), shape, config));
      }
      const auto min_it = std::min_element(report.untrained_accuracies.begin(),
                                           report.untrained_accuracies.end());
      report.selected_init =
          static_cast<int>(min_it - report.untrained_accuracies.begin());
      report.untrained_min = *min_it;
      report.untrained_max = *std::max_element(
          report.untrained_accuracies.begin(), report.untrained_accuracies.end());
      theta0 = candidates[static_cast<std::size_t>(report.selected_init)];
      return 0;
    });
  }

  // alignment training
  const NoiseModel noise{config.noise.lambda0, config.noise.enabled};
  const ShotConfig shot_cfg{config.shots.shots, config.shots.seed,
                            config.shots.measure_diagonal};
  const NoiseModel* noise_ptr = config.noise.enabled ? &noise : nullptr;
  const ShotConfig* shots_ptr = config.shots.enabled ? &shot_cfg : nullptr;

  ParameterVector theta = theta0;
  stage("train", [&] {
    report.alignment_before = target_alignment(
        kernel_matrix(train_set, theta0, shape, nullptr, nullptr, config.threads)
            .entries,
        train_set.labels, true);
    if (config.train.enabled && config.train.iterations > 0) {
      TrainConfig tc;
      tc.learning_rate = config.train.learning_rate;
      tc.batch_size = config.train.batch_size;
      tc.iterations = config.train.iterations;
      tc.fd_step = config.train.fd_step;
      tc.seed = config.train.seed;
      tc.threads = config.threads;
      tc.log_full_every = config.train.log_full_every;
      const TrainResult result =
          train_alignment(train_set, theta0, shape, tc, noise_ptr, shots_ptr);
      theta = result.theta;
      write_history_csv((out_dir / "history.csv").string(), result.history);
    }
    write_parameters_json((out_dir / "theta.json").string(), theta);
    report.alignment_after = target_alignment(
        kernel_matrix(train_set, theta, shape, nullptr, nullptr, config.threads)
            .entries,
        train_set.labels, true);
    return 0;
  });

  // kernel matrix in the configured mode
  const KernelMatrix k_raw = stage("kernel", [&] {
    KernelMatrix k = kernel_matrix(train_set, theta, shape, noise_ptr,
                                   shots_ptr, config.threads);
    write_matrix_csv((out_dir / "kernel_raw.csv").string(), k,
                     meta_for(config, k, train_set, theta));
    return k;
  });

  // post-processing
  KernelMatrix k_post = stage("postprocess", [&] {
    if (config.postprocess.strategy == "rank") {
      KernelMatrix exact = k_raw.provenance == Provenance::Exact
                               ? k_raw
                               : kernel_matrix(train_set, theta, shape, nullptr,
                                               nullptr, config.threads);
      const auto scores = rank_strategies(k_raw, exact.entries,
                                          config.ansatz.qubits,
                                          config.postprocess.n_mean);
      write_ranking_csv((out_dir / "ranking.csv").string(), scores);
      const auto best = std::find_if(scores.begin(), scores.end(),
                                     [](const StrategyScore& s) { return s.feasible; });
      if (best == scores.end()) {
        throw std::runtime_error("no feasible post-processing strategy");
      }
      report.strategy_used = best->strategy.token();
      report.best_q = best->q;
      report.ranked = true;
      return apply_strategy(k_raw, best->strategy, config.ansatz.qubits,
                            config.postprocess.n_mean);
    }
    const PostProcessStrategy strategy =
        PostProcessStrategy::parse(config.postprocess.strategy);
    report.strategy_used = strategy.token();
    return apply_strategy(k_raw, strategy, config.ansatz.qubits,
                          config.postprocess.n_mean);
  });
  stage("postprocess", [&] {
    write_matrix_csv((out_dir / "kernel_post.csv").string(), k_post,
                     meta_for(config, k_post, train_set, theta));
    return 0;
  });

  // classification
  const SvmModel model = stage("svm", [&] {
    return svm_fit(k_post.entries, train_set.labels, config.svm.C,
                   {.seed = config.svm.seed});
  });
  stage("svm", [&] {
    write_text_file((out_dir / "model.json").string(), svm_to_json(model));
    return 0;
  });

  stage("predict", [&] {
    // prediction runs on the exact overlap path
    const Eigen::MatrixXd k_cross =
        cross_kernel(test_set, train_set, theta, shape, config.threads);
    report.trained_accuracy =
        accuracy(svm_predict(model, k_cross), test_set.labels);
    if (config.report.boundary_grid) {
      write_boundary_grid((out_dir / "boundary.csv").string(), train_set, model,
                          theta, shape, config.report.boundary_resolution,
                          config.threads);
    }
    return 0;
  });

  stage("report", [&] {
    write_text_file((out_dir / "report.json").string(), report_to_json(report));
    write_report_csv((out_dir / "report.csv").string(), report);
    return 0;
  });
  return report;
}

std::string report_to_json(const ExperimentReport& report) {
  nlohmann::json j;
  j["name"] = report.name;
  j["dataset-id"] = report.dataset_id;
  j["config-hash"] = report.config_hash;
  j["n-train"] = report.n_train;
  j["n-test"] = report.n_test;
  j["qubits"] = report.qubits;
  j["layers"] = report.layers;
  j["untrained-accuracies"] = report.untrained_accuracies;
  j["untrained-min"] = report.untrained_min;
  j["untrained-max"] = report.untrained_max;
  j["selected-init"] = report.selected_init;
  j["alignment-before"] = report.alignment_before;
  j["alignment-after"] = report.alignment_after;
  j["trained-accuracy"] = report.trained_accuracy;
  j["strategy-used"] = report.strategy_used;
  if (report.ranked) j["best-q"] = report.best_q;
  return j.dump(2) + "\n";
}

void write_report_csv(const std::string& path, const ExperimentReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "dataset,total_samples,width,depth,untrained_min,untrained_max,"
         "trained\n";
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%d,%d,%d,%.17g,%.17g,%.17g\n",
                report.dataset_id.c_str(), report.n_train + report.n_test,
                report.qubits, report.layers, report.untrained_min,
                report.untrained_max, report.trained_accuracy);
  out << buf;
}

std::vector<SweepCell> run_sweep(const ExperimentConfig& config) {
  const PreparedExperiment prep = prepare_experiment(config);

  const KernelMatrix exact = kernel_matrix(prep.train, prep.theta, prep.shape,
                                           nullptr, nullptr, config.threads);
  std::vector<SweepCell> cells;
  for (const double lambda0 : config.sweep.lambda0_grid) {
    const NoiseModel noise{lambda0, true};
    const KernelMatrix device = kernel_matrix(prep.train, prep.theta, prep.shape,
                                              &noise, nullptr, config.threads);
    for (const std::int64_t shots : config.sweep.shots_grid) {
      KernelMatrix raw = device;
      if (shots > 0) {
        ShotConfig sc;
        sc.shots = shots;
        sc.seed = stream_key(config.shots.seed,
                             static_cast<std::uint64_t>(std::llround(lambda0 * 1e6)),
                             static_cast<std::uint64_t>(shots));
        sc.measure_diagonal = true;
        raw.provenance = Provenance::Sampled;
        raw.shots = shots;
        int clamps = 0;
        for (int i = 0; i < raw.size(); ++i) {
          for (int j = i; j < raw.size(); ++j) {
            const double p = sample_entry(device.entries(i, j), sc, i, j, &clamps);
            raw.entries(i, j) = p;
            raw.entries(j, i) = p;
          }
        }
        raw.clamp_warnings = clamps;
      }
      const auto scores = rank_strategies(raw, exact.entries,
                                          config.ansatz.qubits,
                                          config.postprocess.n_mean);
      SweepCell cell;
      cell.lambda0 = lambda0;
      cell.shots = shots;
      cell.alignment_raw = matrix_alignment(raw.entries, exact.entries);
      for (const auto& score : scores) {
        if (!score.feasible) continue;
        cell.best_strategy = score.strategy.token();
        cell.alignment_best = score.alignment;
        cell.best_q = score.q;
        break;
      }
      cells.push_back(cell);
    }
  }
  return cells;
}

void write_sweep_csv(const std::string& path, const std::vector<SweepCell>& cells) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "lambda0,shots,best_strategy,alignment_raw,alignment_best,q\n";
  char buf[256];
  for (const auto& cell : cells) {
    std::snprintf(buf, sizeof buf, "%.17g,%lld,%s,%.17g,%.17g,%.17g\n",
                  cell.lambda0, static_cast<long long>(cell.shots),
                  cell.best_strategy.c_str(), cell.alignment_raw,
                  cell.alignment_best, cell.best_q);
    out << buf;
  }
}

}  // namespace qekl
