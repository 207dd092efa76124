#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "qekl/embedding.hpp"
#include "qekl/quantum.hpp"
#include "qekl/rng.hpp"

using namespace qekl;

namespace {

std::vector<double> rz_feature_angles(const Circuit& c) {
  std::vector<double> angles;
  for (const Gate& g : c.gates) {
    if (g.kind == GateKind::RZ) angles.push_back(g.angle);
  }
  return angles;
}

ParameterVector iota_theta(const AnsatzShape& shape) {
  ParameterVector theta(shape.parameter_count());
  for (Eigen::Index i = 0; i < theta.size(); ++i) theta[i] = double(i);
  return theta;
}

}  // namespace

TEST_CASE("five-qubit block cycles two features as x1 x2 x1 x2 x1") {
  const AnsatzShape shape{5, 1, 2};
  Eigen::VectorXd x(2);
  x << 0.3, -1.1;
  const Circuit c = build_embedding(x, ParameterVector::Zero(10), shape);
  CHECK(rz_feature_angles(c) ==
        std::vector<double>{0.3, -1.1, 0.3, -1.1, 0.3});
}

TEST_CASE("two blocks on three qubits continue the feature cycle") {
  const AnsatzShape shape{3, 2, 2};
  Eigen::VectorXd x(2);
  x << 1.0, 2.0;
  const Circuit c = build_embedding(x, ParameterVector::Zero(12), shape);
  CHECK(rz_feature_angles(c) ==
        std::vector<double>{1.0, 2.0, 1.0, 2.0, 1.0, 2.0});
}

TEST_CASE("feature cycling invariant: k-th encoding gate uses feature k mod m") {
  Rng rng = keyed_rng(201);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(4));
    const int layers = 1 + static_cast<int>(rng.below(3));
    const int m = 1 + static_cast<int>(rng.below(5));
    const AnsatzShape shape{n, layers, m};
    Eigen::VectorXd x(m);
    for (int i = 0; i < m; ++i) x[i] = rng.uniform(-3.0, 3.0);
    const Circuit c = build_embedding(x, iota_theta(shape), shape);
    const auto angles = rz_feature_angles(c);
    REQUIRE(static_cast<int>(angles.size()) == n * layers);
    for (std::size_t k = 0; k < angles.size(); ++k) {
      CHECK(angles[k] == x[static_cast<Eigen::Index>(k % m)]);
    }
  }
}

TEST_CASE("one block on two qubits has 8 gates in layer order") {
  const AnsatzShape shape{2, 1, 2};
  Eigen::VectorXd x(2);
  x << 0.1, 0.2;
  const Circuit c = build_embedding(x, iota_theta(shape), shape);
  REQUIRE(c.gates.size() == 8);
  CHECK(c.gates[0].kind == GateKind::H);
  CHECK(c.gates[1].kind == GateKind::H);
  CHECK(c.gates[2].kind == GateKind::RZ);
  CHECK(c.gates[3].kind == GateKind::RZ);
  CHECK(c.gates[4].kind == GateKind::RY);
  CHECK(c.gates[5].kind == GateKind::RY);
  CHECK(c.gates[6].kind == GateKind::CRZ);
  CHECK(c.gates[7].kind == GateKind::CRZ);
  // the two-qubit ring keeps both links, preserving the 2NL count
  CHECK(c.gates[6].control == 0);
  CHECK(c.gates[6].target == 1);
  CHECK(c.gates[7].control == 1);
  CHECK(c.gates[7].target == 0);
}

TEST_CASE("parameters are consumed RY-first then CRZ, qubit-ascending") {
  const AnsatzShape shape{3, 2, 2};
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
  const Circuit c = build_embedding(x, iota_theta(shape), shape);
  std::vector<double> ry, crz;
  for (const Gate& g : c.gates) {
    if (g.kind == GateKind::RY) ry.push_back(g.angle);
    if (g.kind == GateKind::CRZ) crz.push_back(g.angle);
  }
  CHECK(ry == std::vector<double>{0, 1, 2, 6, 7, 8});
  CHECK(crz == std::vector<double>{3, 4, 5, 9, 10, 11});
}

TEST_CASE("shape mismatches are rejected") {
  const AnsatzShape shape{3, 2, 2};
  Eigen::VectorXd x(2);
  x << 0.0, 0.0;
  CHECK_THROWS_AS(build_embedding(x, ParameterVector::Zero(11), shape),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_embedding(x, ParameterVector::Zero(13), shape),
                  std::invalid_argument);
  Eigen::VectorXd x3(3);
  x3 << 0.0, 0.0, 0.0;
  CHECK_THROWS_AS(build_embedding(x3, ParameterVector::Zero(12), shape),
                  std::invalid_argument);
  CHECK_THROWS_AS((AnsatzShape{1, 1, 2}.validate()), std::invalid_argument);
}

TEST_CASE("adjoint is an involution on embedding circuits") {
  const AnsatzShape shape{3, 2, 2};
  Eigen::VectorXd x(2);
  x << 0.4, 0.9;
  const Circuit c = build_embedding(x, iota_theta(shape), shape);
  const Circuit twice = adjoint(adjoint(c));
  REQUIRE(twice.gates.size() == c.gates.size());
  CHECK(twice.gates == c.gates);
}

TEST_CASE("embedding followed by its adjoint returns to |0...0>") {
  Rng rng = keyed_rng(202);
  const AnsatzShape shape{3, 2, 2};
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd x(2);
    x << rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0);
    ParameterVector theta(shape.parameter_count());
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      theta[i] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
    Circuit c = build_embedding(x, theta, shape);
    const Circuit back = adjoint(c);
    c.gates.insert(c.gates.end(), back.gates.begin(), back.gates.end());
    const Statevector psi = simulate_pure(c);
    CHECK(std::abs(std::abs(psi[0]) - 1.0) < 1e-10);
  }
}

TEST_CASE("identical inputs build identical gate lists") {
  const AnsatzShape shape{4, 3, 2};
  Eigen::VectorXd x(2);
  x << 0.5, 0.25;
  ParameterVector theta = iota_theta(shape);
  const Circuit a = build_embedding(x, theta, shape);
  const Circuit b = build_embedding(x, theta, shape);
  CHECK(a.gates == b.gates);
}
