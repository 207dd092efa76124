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
#include "qekl/embedding.hpp"

#include <cmath>
#include <stdexcept>

namespace qekl {

void AnsatzShape::validate() const {
  if (num_qubits < 2 || num_qubits > kMaxQubitsPure) {
    throw std::invalid_argument("ansatz: num_qubits out of range");
  }
  if (num_layers < 1) throw std::invalid_argument("ansatz: num_layers < 1");
  if (num_features < 1) throw std::invalid_argument("ansatz: num_features < 1");
}

Circuit build_embedding(const Eigen::VectorXd& x, const ParameterVector& theta,
                        const AnsatzShape& shape) {
  shape.validate();
  if (x.size() != shape.num_features) {
    throw std::invalid_argument("build_embedding: feature count mismatch");
  }
  if (theta.size() != shape.parameter_count()) {
    throw std::invalid_argument("build_embedding: parameter count mismatch");
  }
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    if (!std::isfinite(theta[i])) {
      throw std::invalid_argument("build_embedding: non-finite parameter");
    }
  }

  const int n = shape.num_qubits;
  Circuit circuit;
  circuit.num_qubits = n;
  circuit.gates.reserve(static_cast<std::size_t>(4 * n) * shape.num_layers);

  int feature_index = 0;  // advances cyclically over all encoding gates
  int param_index = 0;
  for (int layer = 0; layer < shape.num_layers; ++layer) {
    for (int q = 0; q < n; ++q) circuit.gates.push_back(Gate::h(q));
    for (int q = 0; q < n; ++q) {
      circuit.gates.push_back(Gate::rz(q, x[feature_index]));
      feature_index = (feature_index + 1) % shape.num_features;
    }
    for (int q = 0; q < n; ++q) {
      circuit.gates.push_back(Gate::ry(q, theta[param_index++]));
    }
    for (int q = 0; q < n; ++q) {
      circuit.gates.push_back(Gate::crz(q, (q + 1) % n, theta[param_index++]));
    }
  }
  return circuit;
}

}  // namespace qekl
