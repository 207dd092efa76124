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
#ifndef QEKL_EMBEDDING_HPP_
#define QEKL_EMBEDDING_HPP_

#include <Eigen/Dense>

#include "qekl/quantum.hpp"

namespace qekl {

using ParameterVector = Eigen::VectorXd;

// Data re-uploading ansatz geometry. A circuit of num_layers blocks over
// num_qubits qubits has 2 * N * L trainable parameters.
struct AnsatzShape {
  int num_qubits = 2;
  int num_layers = 1;
  int num_features = 2;

  int parameter_count() const { return 2 * num_qubits * num_layers; }
  void validate() const;
};

// Builds the embedding circuit. Each block applies, qubit-ascending:
// a Hadamard layer, an RZ feature-encoding layer, a trainable RY layer,
// and a ring of CRZ gates with qubit q controlling (q+1) mod N. Feature
// indices advance cyclically over the whole circuit's encoding gates;
// per block the N RY angles are consumed before the N CRZ angles.
Circuit build_embedding(const Eigen::VectorXd& x, const ParameterVector& theta,
                        const AnsatzShape& shape);

}  // namespace qekl

#endif  // QEKL_EMBEDDING_HPP_
