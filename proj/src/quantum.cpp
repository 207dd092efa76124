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
#include "qekl/quantum.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace qekl {

namespace {

using Cx = std::complex<double>;

struct SingleQubitGate {
  Cx u00, u01, u10, u11;
};

SingleQubitGate matrix_of(const Gate& gate) {
  switch (gate.kind) {
    case GateKind::H: {
      const double s = 1.0 / std::numbers::sqrt2;
      return {Cx(s), Cx(s), Cx(s), Cx(-s)};
    }
    case GateKind::RZ: {
      const double half = 0.5 * gate.angle;
      return {std::polar(1.0, -half), Cx(0), Cx(0), std::polar(1.0, half)};
    }
    case GateKind::RY: {
      const double c = std::cos(0.5 * gate.angle);
      const double s = std::sin(0.5 * gate.angle);
      return {Cx(c), Cx(-s), Cx(s), Cx(c)};
    }
    case GateKind::CRZ:
      // handled separately, CRZ acts diagonally
      break;
  }
  throw std::logic_error("matrix_of: not a single-qubit gate");
}

template <typename Vec>
void apply_single_qubit(Vec& psi, const SingleQubitGate& u, int qubit) {
  const Eigen::Index dim = psi.size();
  const Eigen::Index stride = Eigen::Index{1} << qubit;
  for (Eigen::Index base = 0; base < dim; base += 2 * stride) {
    for (Eigen::Index offset = 0; offset < stride; ++offset) {
      const Eigen::Index i0 = base + offset;
      const Eigen::Index i1 = i0 + stride;
      const Cx a0 = psi[i0];
      const Cx a1 = psi[i1];
      psi[i0] = u.u00 * a0 + u.u01 * a1;
      psi[i1] = u.u10 * a0 + u.u11 * a1;
    }
  }
}

// CRZ = diag(1, 1, e^{-i a/2}, e^{+i a/2}) on (control, target).
template <typename Vec>
void apply_crz(Vec& psi, int control, int target, double angle) {
  const Eigen::Index dim = psi.size();
  const Cx phase_t0 = std::polar(1.0, -0.5 * angle);
  const Cx phase_t1 = std::polar(1.0, 0.5 * angle);
  const Eigen::Index cbit = Eigen::Index{1} << control;
  const Eigen::Index tbit = Eigen::Index{1} << target;
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (i & cbit) psi[i] *= (i & tbit) ? phase_t1 : phase_t0;
  }
}

template <typename Vec>
void apply_gate_vec(Vec& psi, const Gate& gate) {
  if (gate.kind == GateKind::CRZ) {
    apply_crz(psi, gate.control, gate.target, gate.angle);
  } else {
    apply_single_qubit(psi, matrix_of(gate), gate.target);
  }
}

Gate conjugated(const Gate& gate) {
  // RZ and CRZ are diagonal with conjugate = negated angle; RY is real;
  // H is real. Used for the right factor of rho -> U rho U^dagger.
  Gate g = gate;
  if (gate.kind == GateKind::RZ || gate.kind == GateKind::CRZ) {
    g.angle = -gate.angle;
  }
  return g;
}

}  // namespace

void Circuit::validate() const {
  if (num_qubits < 1) throw std::invalid_argument("circuit: num_qubits < 1");
  for (const Gate& g : gates) {
    if (g.target < 0 || g.target >= num_qubits) {
      throw std::invalid_argument("gate target out of range");
    }
    if (g.kind == GateKind::CRZ) {
      if (g.control < 0 || g.control >= num_qubits) {
        throw std::invalid_argument("gate control out of range");
      }
      if (g.control == g.target) {
        throw std::invalid_argument("gate control equals target");
      }
    }
    if (g.kind != GateKind::H && !std::isfinite(g.angle)) {
      throw std::invalid_argument("gate angle not finite");
    }
  }
}

Circuit adjoint(const Circuit& circuit) {
  Circuit out;
  out.num_qubits = circuit.num_qubits;
  out.gates.reserve(circuit.gates.size());
  for (auto it = circuit.gates.rbegin(); it != circuit.gates.rend(); ++it) {
    Gate g = *it;
    g.angle = -g.angle;
    out.gates.push_back(g);
  }
  return out;
}

double gate_survival(const Gate& gate, double lambda0) {
  if (gate.kind == GateKind::H) return 0.5 * (1.0 + lambda0);
  const double two_pi = 2.0 * std::numbers::pi;
  const double theta = std::fmod(std::abs(gate.angle), two_pi);
  const double frac = theta / two_pi;
  return (1.0 - frac) + lambda0 * frac;
}

Statevector simulate_pure(const Circuit& circuit) {
  circuit.validate();
  if (circuit.num_qubits > kMaxQubitsPure) {
    throw std::invalid_argument("simulate_pure: num_qubits exceeds limit");
  }
  Statevector psi = Statevector::Zero(Eigen::Index{1} << circuit.num_qubits);
  psi[0] = 1.0;
  for (const Gate& g : circuit.gates) apply_gate_vec(psi, g);
  return psi;
}

DensityMatrix simulate_noisy(const Circuit& circuit, const NoiseModel& noise) {
  circuit.validate();
  if (circuit.num_qubits > kMaxQubitsDensity) {
    throw std::invalid_argument("simulate_noisy: num_qubits exceeds limit");
  }
  if (noise.lambda0 < 0.0 || noise.lambda0 > 1.0) {
    throw std::invalid_argument("simulate_noisy: lambda0 outside [0,1]");
  }
  const Eigen::Index dim = Eigen::Index{1} << circuit.num_qubits;
  DensityMatrix rho = DensityMatrix::Zero(dim, dim);
  rho(0, 0) = 1.0;
  const bool noisy = noise.enabled && noise.lambda0 < 1.0;
  for (const Gate& g : circuit.gates) {
    detail::apply_gate(rho, g, circuit.num_qubits);
    if (!noisy) continue;
    const double lambda = gate_survival(g, noise.lambda0);
    detail::depolarize_qubit(rho, g.target, lambda, circuit.num_qubits);
    if (g.kind == GateKind::CRZ) {
      detail::depolarize_qubit(rho, g.control, lambda, circuit.num_qubits);
    }
  }
  return rho;
}

DensityMatrix apply_depolarizing(const DensityMatrix& rho, double lambda) {
  if (lambda < 0.0 || lambda > 1.0) {
    throw std::invalid_argument("apply_depolarizing: lambda outside [0,1]");
  }
  const Eigen::Index dim = rho.rows();
  const double mixed = (1.0 - lambda) / static_cast<double>(dim);
  DensityMatrix out = lambda * rho;
  out.diagonal().array() += mixed;
  return out;
}

namespace detail {

void apply_gate(Statevector& psi, const Gate& gate, int /*num_qubits*/) {
  apply_gate_vec(psi, gate);
}

void apply_gate(DensityMatrix& rho, const Gate& gate, int /*num_qubits*/) {
  // rho -> U rho U^dagger: U on every column, then conj(U) on every row.
  for (Eigen::Index c = 0; c < rho.cols(); ++c) {
    auto col = rho.col(c);
    apply_gate_vec(col, gate);
  }
  const Gate conj_gate = conjugated(gate);
  for (Eigen::Index r = 0; r < rho.rows(); ++r) {
    auto row = rho.row(r).transpose();
    apply_gate_vec(row, conj_gate);
  }
}

void depolarize_qubit(DensityMatrix& rho, int qubit, double lambda,
                      int /*num_qubits*/) {
  // lambda*rho + (1-lambda) * (I_q/2 tensor Tr_q rho), written on the
  // 2x2 blocks indexed by the chosen qubit's bit in (row, col).
  const Eigen::Index dim = rho.rows();
  const Eigen::Index bit = Eigen::Index{1} << qubit;
  const double keep = lambda;
  const double mix = 1.0 - lambda;
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (i & bit) continue;
    const Eigen::Index i1 = i | bit;
    for (Eigen::Index j = 0; j < dim; ++j) {
      if (j & bit) continue;
      const Eigen::Index j1 = j | bit;
      const Cx b00 = rho(i, j);
      const Cx b11 = rho(i1, j1);
      const Cx avg = 0.5 * (b00 + b11);
      rho(i, j) = keep * b00 + mix * avg;
      rho(i1, j1) = keep * b11 + mix * avg;
      rho(i, j1) *= keep;
      rho(i1, j) *= keep;
    }
  }
}

}  // namespace detail

}  // namespace qekl
