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
#include "qekl/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qekl/hash.hpp"

namespace qekl {

namespace {

constexpr double kSymmetryTol = 1e-9;

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Eigen::MatrixXd parse_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error("ragged matrix rows in " + path);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("empty matrix file " + path);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

void write_rows(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_value(m(i, j));
    }
    out << '\n';
  }
}

}  // namespace

std::string meta_path_for(const std::string& matrix_path) {
  return matrix_path + ".meta.json";
}

void write_matrix_csv(const std::string& path, const KernelMatrix& matrix,
                      const MatrixMeta& meta) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_rows(out, matrix.entries);

  nlohmann::json j;
  j["provenance"] = meta.provenance;
  j["shots"] = meta.shots;
  j["seed"] = meta.seed;
  j["n"] = meta.n;
  j["qubits"] = meta.qubits;
  j["layers"] = meta.layers;
  j["dataset-id"] = meta.dataset_id;
  j["theta-hash"] = meta.theta_hash;
  j["diagonal-measured"] = meta.diagonal_measured;
  j["config-hash"] = meta.config_hash;
  write_text_file(meta_path_for(path), j.dump(2) + "\n");
}

KernelMatrix read_matrix_csv(const std::string& path, MatrixMeta* meta_out) {
  Eigen::MatrixXd m = parse_matrix(path);
  if (m.rows() != m.cols()) {
    throw std::runtime_error("kernel matrix file is not square: " + path);
  }
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol) {
    throw std::runtime_error("kernel matrix file is asymmetric (max deviation " +
                             format_value(asym) + "): " + path);
  }

  KernelMatrix out;
  out.entries = std::move(m);

  MatrixMeta meta;
  const std::string mpath = meta_path_for(path);
  if (std::filesystem::exists(mpath)) {
    const nlohmann::json j = nlohmann::json::parse(read_text_file(mpath));
    meta.provenance = j.value("provenance", "EXACT");
    meta.shots = j.value("shots", std::int64_t{0});
    meta.seed = j.value("seed", std::uint64_t{0});
    meta.n = j.value("n", static_cast<int>(out.entries.rows()));
    meta.qubits = j.value("qubits", 0);
    meta.layers = j.value("layers", 0);
    meta.dataset_id = j.value("dataset-id", "");
    meta.theta_hash = j.value("theta-hash", "");
    meta.diagonal_measured = j.value("diagonal-measured", false);
    meta.config_hash = j.value("config-hash", "");
    out.provenance = provenance_from_name(meta.provenance);
    out.shots = meta.shots;
    out.diagonal_measured = meta.diagonal_measured;
  }
  if (meta_out) *meta_out = meta;
  return out;
}

void write_cross_csv(const std::string& path, const Eigen::MatrixXd& matrix) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_rows(out, matrix);
}

Eigen::MatrixXd read_cross_csv(const std::string& path) {
  return parse_matrix(path);
}

void write_dataset_csv(const std::string& path, const LabeledDataset& data) {
  data.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "x1,x2,label\n";
  for (int i = 0; i < data.size(); ++i) {
    out << format_value(data.points[i].x()) << ','
        << format_value(data.points[i].y()) << ',' << data.labels[i] << '\n';
  }
}

LabeledDataset read_dataset_csv(const std::string& path,
                                const std::string& split,
                                const std::string& dataset_id) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("x1,x2,label", 0) != 0) {
    throw std::runtime_error("dataset file missing x1,x2,label header: " + path);
  }
  LabeledDataset data;
  data.split = split;
  data.dataset_id = dataset_id.empty() ? path : dataset_id;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string x1, x2, label;
    if (!std::getline(ss, x1, ',') || !std::getline(ss, x2, ',') ||
        !std::getline(ss, label, ',')) {
      throw std::runtime_error("malformed dataset row: " + line);
    }
    data.points.emplace_back(std::stod(x1), std::stod(x2));
    data.labels.push_back(std::stoi(label));
  }
  data.validate();
  return data;
}

void write_parameters_json(const std::string& path,
                           const ParameterVector& theta) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index i = 0; i < theta.size(); ++i) j.push_back(theta[i]);
  write_text_file(path, j.dump() + "\n");
}

ParameterVector read_parameters_json(const std::string& path) {
  const nlohmann::json j = nlohmann::json::parse(read_text_file(path));
  if (!j.is_array()) throw std::runtime_error("parameter file is not an array");
  ParameterVector theta(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    theta[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return theta;
}

void write_history_csv(const std::string& path,
                       const std::vector<TrainHistoryEntry>& history) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "iteration,batch_alignment,full_alignment,theta_hash\n";
  for (const auto& entry : history) {
    out << entry.iteration << ',' << format_value(entry.batch_alignment) << ',';
    if (std::isfinite(entry.full_alignment)) {
      out << format_value(entry.full_alignment);
    }
    out << ',' << hex64(entry.theta_hash) << '\n';
  }
}

void write_ranking_csv(const std::string& path,
                       const std::vector<StrategyScore>& scores) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "strategy,alignment,q,feasible,reason\n";
  for (const auto& score : scores) {
    out << score.strategy.token() << ',';
    if (score.feasible) {
      out << format_value(score.alignment) << ',' << format_value(score.q);
    } else {
      out << ',';
    }
    out << ',' << (score.feasible ? "yes" : "no") << ','
        << score.failure_reason << '\n';
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace qekl
