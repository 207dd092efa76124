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
#ifndef QEKL_QUANTUM_HPP_
#define QEKL_QUANTUM_HPP_

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace qekl {

// Qubit 0 is the least significant bit of a basis-state index.
using Statevector = Eigen::VectorXcd;
using DensityMatrix = Eigen::MatrixXcd;

inline constexpr int kMaxQubitsPure = 12;
inline constexpr int kMaxQubitsDensity = 7;

enum class GateKind { H, RZ, RY, CRZ };

struct Gate {
  GateKind kind;
  int target;
  int control = -1;  // only meaningful for CRZ
  double angle = 0.0;

  static Gate h(int q) { return {GateKind::H, q}; }
  static Gate rz(int q, double a) { return {GateKind::RZ, q, -1, a}; }
  static Gate ry(int q, double a) { return {GateKind::RY, q, -1, a}; }
  static Gate crz(int control, int target, double a) {
    return {GateKind::CRZ, target, control, a};
  }

  bool operator==(const Gate&) const = default;
};

struct Circuit {
  int num_qubits = 0;
  std::vector<Gate> gates;

  // Throws std::invalid_argument on out-of-range indices, target == control
  // or non-finite angles.
  void validate() const;
};

// Reverses the gate order and negates every angle. H is self-adjoint.
Circuit adjoint(const Circuit& circuit);

// Local depolarizing device-noise model. After every gate, a single-qubit
// depolarizing channel acts on each qubit the gate touched; the survival
// probability depends on the gate (see gate_survival).
struct NoiseModel {
  double lambda0 = 1.0;  // base survival probability
  bool enabled = false;
};

// Survival probability of the channel following `gate` at base level
// lambda0: rotations get (1 - theta/2pi) + lambda0 * theta/2pi with
// theta = |angle| reduced mod 2pi, Hadamard gets (1 + lambda0)/2.
double gate_survival(const Gate& gate, double lambda0);

// U |0...0>. Throws on invalid circuits or num_qubits > kMaxQubitsPure.
Statevector simulate_pure(const Circuit& circuit);

// Density-matrix evolution under the local depolarizing noise model.
// With noise disabled or lambda0 = 1 this equals the pure-state projector.
DensityMatrix simulate_noisy(const Circuit& circuit, const NoiseModel& noise);

// Global depolarizing channel, lambda*rho + (1-lambda)*I/2^N.
DensityMatrix apply_depolarizing(const DensityMatrix& rho, double lambda);

namespace detail {
void apply_gate(Statevector& psi, const Gate& gate, int num_qubits);
void apply_gate(DensityMatrix& rho, const Gate& gate, int num_qubits);
// Single-qubit depolarizing channel on one qubit of an N-qubit state.
void depolarize_qubit(DensityMatrix& rho, int qubit, double lambda,
                      int num_qubits);
}  // namespace detail

}  // namespace qekl

#endif  // QEKL_QUANTUM_HPP_
