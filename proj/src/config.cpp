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
#include "qekl/config.hpp"

#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <type_traits>

#include "qekl/hash.hpp"
#include "qekl/io.hpp"

namespace qekl {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += fmt(values[i]);
  }
  return out;
}

std::string fmt_list(const std::vector<std::int64_t>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

std::string trimmed(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

class KvReader {
 public:
  explicit KvReader(const std::string& text) {
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::string t = trimmed(line);
      if (t.empty() || t[0] == '#' || t[0] == ';') continue;
      if (t.front() == '[' && t.back() == ']') {
        section = trimmed(t.substr(1, t.size() - 2));
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos) {
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    " is not key = value: " + t);
      }
      values_[section + "." + trimmed(t.substr(0, eq))] =
          trimmed(t.substr(eq + 1));
    }
  }

  std::string str(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }
  double num(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : std::stod(it->second);
  }
  std::int64_t integer(const std::string& key, std::int64_t fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : std::stoll(it->second);
  }
  std::uint64_t uinteger(const std::string& key, std::uint64_t fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : std::stoull(it->second);
  }
  bool boolean(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw std::invalid_argument("config boolean must be true/false: " + key);
  }
  template <typename T>
  std::vector<T> list(const std::string& key, const std::vector<T>& fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<T> out;
    std::stringstream ss(it->second);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cell = trimmed(cell);
      if (cell.empty()) continue;
      if constexpr (std::is_same_v<T, double>) {
        out.push_back(std::stod(cell));
      } else {
        out.push_back(static_cast<T>(std::stoll(cell)));
      }
    }
    return out;
  }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace

std::string ExperimentConfig::serialize() const {
  std::ostringstream out;
  out << "[experiment]\n";
  out << "name = " << name << "\n";
  out << "output_dir = " << output_dir << "\n";
  out << "threads = " << threads << "\n";
  out << "\n[data]\n";
  out << "generator = " << data.generator << "\n";
  out << "seed = " << data.seed << "\n";
  out << "train_file = " << data.train_file << "\n";
  out << "test_file = " << data.test_file << "\n";
  out << "subset_train = " << data.subset_train << "\n";
  out << "subset_test = " << data.subset_test << "\n";
  out << "\n[ansatz]\n";
  out << "qubits = " << ansatz.qubits << "\n";
  out << "layers = " << ansatz.layers << "\n";
  out << "\n[train]\n";
  out << "enabled = " << (train.enabled ? "true" : "false") << "\n";
  out << "learning_rate = " << fmt(train.learning_rate) << "\n";
  out << "batch_size = " << train.batch_size << "\n";
  out << "iterations = " << train.iterations << "\n";
  out << "fd_step = " << fmt(train.fd_step) << "\n";
  out << "seed = " << train.seed << "\n";
  out << "init_samples = " << train.init_samples << "\n";
  out << "log_full_every = " << train.log_full_every << "\n";
  out << "theta_file = " << train.theta_file << "\n";
  out << "\n[noise]\n";
  out << "enabled = " << (noise.enabled ? "true" : "false") << "\n";
  out << "lambda0 = " << fmt(noise.lambda0) << "\n";
  out << "\n[shots]\n";
  out << "enabled = " << (shots.enabled ? "true" : "false") << "\n";
  out << "shots = " << shots.shots << "\n";
  out << "seed = " << shots.seed << "\n";
  out << "measure_diagonal = " << (shots.measure_diagonal ? "true" : "false")
      << "\n";
  out << "\n[postprocess]\n";
  out << "strategy = " << postprocess.strategy << "\n";
  out << "n_mean = " << postprocess.n_mean << "\n";
  out << "\n[svm]\n";
  out << "C = " << fmt(svm.C) << "\n";
  out << "seed = " << svm.seed << "\n";
  out << "\n[sweep]\n";
  out << "lambda0_grid = " << fmt_list(sweep.lambda0_grid) << "\n";
  out << "shots_grid = " << fmt_list(sweep.shots_grid) << "\n";
  out << "\n[report]\n";
  out << "boundary_grid = " << (report.boundary_grid ? "true" : "false") << "\n";
  out << "boundary_resolution = " << report.boundary_resolution << "\n";
  return out.str();
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  const KvReader kv(text);
  ExperimentConfig c;
  c.name = kv.str("experiment.name", c.name);
  c.output_dir = kv.str("experiment.output_dir", c.output_dir);
  c.threads = static_cast<int>(kv.integer("experiment.threads", c.threads));

  c.data.generator = kv.str("data.generator", c.data.generator);
  c.data.seed = kv.uinteger("data.seed", c.data.seed);
  c.data.train_file = kv.str("data.train_file", c.data.train_file);
  c.data.test_file = kv.str("data.test_file", c.data.test_file);
  c.data.subset_train =
      static_cast<int>(kv.integer("data.subset_train", c.data.subset_train));
  c.data.subset_test =
      static_cast<int>(kv.integer("data.subset_test", c.data.subset_test));

  c.ansatz.qubits = static_cast<int>(kv.integer("ansatz.qubits", c.ansatz.qubits));
  c.ansatz.layers = static_cast<int>(kv.integer("ansatz.layers", c.ansatz.layers));

  c.train.enabled = kv.boolean("train.enabled", c.train.enabled);
  c.train.learning_rate = kv.num("train.learning_rate", c.train.learning_rate);
  c.train.batch_size =
      static_cast<int>(kv.integer("train.batch_size", c.train.batch_size));
  c.train.iterations =
      static_cast<int>(kv.integer("train.iterations", c.train.iterations));
  c.train.fd_step = kv.num("train.fd_step", c.train.fd_step);
  c.train.seed = kv.uinteger("train.seed", c.train.seed);
  c.train.init_samples =
      static_cast<int>(kv.integer("train.init_samples", c.train.init_samples));
  c.train.log_full_every = static_cast<int>(
      kv.integer("train.log_full_every", c.train.log_full_every));
  c.train.theta_file = kv.str("train.theta_file", c.train.theta_file);

  c.noise.enabled = kv.boolean("noise.enabled", c.noise.enabled);
  c.noise.lambda0 = kv.num("noise.lambda0", c.noise.lambda0);

  c.shots.enabled = kv.boolean("shots.enabled", c.shots.enabled);
  c.shots.shots = kv.integer("shots.shots", c.shots.shots);
  c.shots.seed = kv.uinteger("shots.seed", c.shots.seed);
  c.shots.measure_diagonal =
      kv.boolean("shots.measure_diagonal", c.shots.measure_diagonal);

  c.postprocess.strategy = kv.str("postprocess.strategy", c.postprocess.strategy);
  c.postprocess.n_mean =
      static_cast<int>(kv.integer("postprocess.n_mean", c.postprocess.n_mean));

  c.svm.C = kv.num("svm.C", c.svm.C);
  c.svm.seed = kv.uinteger("svm.seed", c.svm.seed);

  c.sweep.lambda0_grid = kv.list<double>("sweep.lambda0_grid", c.sweep.lambda0_grid);
  c.sweep.shots_grid =
      kv.list<std::int64_t>("sweep.shots_grid", c.sweep.shots_grid);

  c.report.boundary_grid = kv.boolean("report.boundary_grid", c.report.boundary_grid);
  c.report.boundary_resolution = static_cast<int>(
      kv.integer("report.boundary_resolution", c.report.boundary_resolution));
  return c;
}

std::string ExperimentConfig::hash() const { return hex64(fnv1a64(serialize())); }

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.serialize() == b.serialize();
}

ExperimentConfig load_config(const std::string& path) {
  return ExperimentConfig::parse(read_text_file(path));
}

void save_config(const std::string& path, const ExperimentConfig& config) {
  write_text_file(path, config.serialize());
}

}  // namespace qekl
