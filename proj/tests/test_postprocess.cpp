#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <set>

#include "qekl/alignment.hpp"
#include "qekl/postprocess.hpp"
#include "qekl/rng.hpp"

using namespace qekl;

namespace {

double min_eig(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double op_norm(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      Eigen::MatrixXd(0.5 * (a + a.transpose())), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::MatrixXd random_symmetric(Rng& rng, int n, double lo = -1.0,
                                 double hi = 1.0) {
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) a(i, j) = a(j, i) = rng.uniform(lo, hi);
  }
  return a;
}

Eigen::MatrixXd random_psd(Rng& rng, int n) {
  const Eigen::MatrixXd a = random_symmetric(rng, n);
  return a * a.transpose();
}

// Random kernel-like matrix: symmetric, unit diagonal, entries in [0,1].
KernelMatrix random_kernel_like(Rng& rng, int n) {
  KernelMatrix k;
  k.entries = Eigen::MatrixXd::Ones(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      k.entries(i, j) = k.entries(j, i) = rng.uniform(0.0, 1.0);
    }
  }
  return k;
}

}  // namespace

TEST_CASE("survival estimation from the diagonal") {
  SUBCASE("unit diagonal gives survival 1 in every mode") {
    Rng rng = keyed_rng(501);
    KernelMatrix k = random_kernel_like(rng, 4);
    k.diagonal_measured = true;
    for (auto mode : {MitigationMode::Single, MitigationMode::Mean,
                      MitigationMode::Split}) {
      const SurvivalEstimate est = estimate_survival(k, mode, 3);
      for (Eigen::Index i = 0; i < est.lambdas.size(); ++i) {
        CHECK(est.lambdas[i] == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
  SUBCASE("arithmetic case at N=1") {
    KernelMatrix k;
    k.entries = Eigen::MatrixXd::Ones(2, 2);
    k.entries(0, 0) = 0.95;
    k.diagonal_measured = true;
    const SurvivalEstimate est = estimate_survival(k, MitigationMode::Single, 1);
    CHECK(est.lambdas[0] == doctest::Approx(std::sqrt(0.9)).epsilon(1e-12));
  }
  SUBCASE("infeasible diagonals") {
    KernelMatrix k;
    k.entries = Eigen::MatrixXd::Identity(2, 2);
    k.diagonal_measured = true;
    k.entries(0, 0) = 0.4;  // below 2^-1
    CHECK_THROWS_AS(estimate_survival(k, MitigationMode::Single, 1),
                    MitigationInfeasible);
    k.entries(0, 0) = 1.2;  // survival above one
    CHECK_THROWS_AS(estimate_survival(k, MitigationMode::Single, 1),
                    MitigationInfeasible);
    k.entries(0, 0) = 0.9;
    k.diagonal_measured = false;
    k.provenance = Provenance::Device;
    CHECK_THROWS_AS(estimate_survival(k, MitigationMode::Split, 1),
                    MitigationInfeasible);
  }
  SUBCASE("mean over a diagonal subset") {
    KernelMatrix k;
    k.entries = Eigen::MatrixXd::Identity(3, 3);
    k.entries(0, 0) = 0.90;
    k.entries(1, 1) = 0.95;
    k.entries(2, 2) = 1.00;
    k.diagonal_measured = true;
    const double l0 = std::sqrt((0.90 - 0.5) / 0.5);
    const double l1 = std::sqrt((0.95 - 0.5) / 0.5);
    const SurvivalEstimate two =
        estimate_survival(k, MitigationMode::Mean, 1, 2);
    CHECK(two.lambdas[0] == doctest::Approx(0.5 * (l0 + l1)).epsilon(1e-12));
    const SurvivalEstimate all = estimate_survival(k, MitigationMode::Mean, 1);
    CHECK(all.lambdas[0] ==
          doctest::Approx((l0 + l1 + 1.0) / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("split estimation recovers a known survival vector") {
  Rng rng = keyed_rng(502);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(5));
    const int qubits = 1 + static_cast<int>(rng.below(5));
    const KernelMatrix exact = random_kernel_like(rng, n);
    Eigen::VectorXd lambdas(n);
    for (int i = 0; i < n; ++i) lambdas[i] = rng.uniform(0.7, 1.0);
    const KernelMatrix device =
        global_depolarized_matrix(exact, lambdas, qubits);
    const SurvivalEstimate est =
        estimate_survival(device, MitigationMode::Split, qubits);
    CHECK((est.lambdas - lambdas).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("mitigation inverts the analytic device map") {
  Rng rng = keyed_rng(503);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(6));
    const int qubits = 1 + static_cast<int>(rng.below(5));
    const KernelMatrix exact = random_kernel_like(rng, n);
    Eigen::VectorXd lambdas(n);
    for (int i = 0; i < n; ++i) lambdas[i] = rng.uniform(0.7, 1.0);
    const KernelMatrix device = global_depolarized_matrix(exact, lambdas, qubits);
    const SurvivalEstimate est =
        estimate_survival(device, MitigationMode::Split, qubits);
    const KernelMatrix back = mitigate(device, est, qubits);
    CHECK(back.provenance == Provenance::Post);
    CHECK((back.entries - exact.entries).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("mitigation arithmetic and identity cases") {
  KernelMatrix k;
  k.entries = Eigen::MatrixXd::Constant(2, 2, 0.95);
  k.diagonal_measured = true;

  SurvivalEstimate ones{MitigationMode::Single, Eigen::VectorXd::Ones(1)};
  CHECK((mitigate(k, ones, 1).entries - k.entries).cwiseAbs().maxCoeff() <
        1e-15);

  // lambda_i lambda_j = 0.9 at N=1: (0.95 - 0.5*0.1) / 0.9 = 1.0
  SurvivalEstimate est{MitigationMode::Single,
                       Eigen::VectorXd::Constant(1, std::sqrt(0.9))};
  CHECK(mitigate(k, est, 1).entries(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mitigation may leave [0,1] and records it") {
  KernelMatrix k;
  k.entries = Eigen::MatrixXd::Constant(2, 2, 0.99);
  k.entries(0, 1) = k.entries(1, 0) = 0.02;  // below the mixed floor
  k.diagonal_measured = true;
  const SurvivalEstimate est =
      estimate_survival(k, MitigationMode::Split, 1);
  const KernelMatrix out = mitigate(k, est, 1);
  CHECK(out.out_of_range_entries > 0);
}

TEST_CASE("tikhonov regularization") {
  SUBCASE("psd input unchanged") {
    Rng rng = keyed_rng(504);
    const Eigen::MatrixXd a = random_psd(rng, 5);
    CHECK((regularize_tikhonov(a) - a).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("shifts the spectrum by the most negative eigenvalue") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
    a(0, 0) = 1.0;
    a(1, 1) = -0.2;
    const Eigen::MatrixXd out = regularize_tikhonov(a);
    CHECK(out(0, 0) == doctest::Approx(1.2).epsilon(1e-12));
    CHECK(out(1, 1) == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("random indefinite inputs become PSD with min eigenvalue near 0") {
    Rng rng = keyed_rng(505);
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::MatrixXd a = random_symmetric(rng, 5);
      if (min_eig(a) >= 0.0) continue;
      const double m = min_eig(regularize_tikhonov(a));
      CHECK(m >= -1e-12);
      CHECK(m <= 1e-9);
    }
  }
}

TEST_CASE("threshold regularization") {
  SUBCASE("psd input unchanged within 1e-12") {
    Rng rng = keyed_rng(506);
    const Eigen::MatrixXd a = random_psd(rng, 5);
    CHECK((regularize_threshold(a) - a).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("clamps the negative eigenvalue") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
    a(0, 0) = 1.0;
    a(1, 1) = -0.2;
    const Eigen::MatrixXd out = regularize_threshold(a);
    CHECK(out(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(out(1, 1) == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("thresholding is the nearest PSD matrix in Frobenius norm") {
    Rng rng = keyed_rng(507);
    const Eigen::MatrixXd a = random_symmetric(rng, 5);
    const double best = (a - regularize_threshold(a)).norm();
    for (int trial = 0; trial < 200; ++trial) {
      const Eigen::MatrixXd p = random_psd(rng, 5);
      CHECK(best <= (a - p).norm() + 1e-12);
    }
  }
}

TEST_CASE("thresholding never worsens the operator-norm error") {
  Rng rng = keyed_rng(508);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 10;
    const Eigen::MatrixXd k = random_psd(rng, n);
    const Eigen::MatrixXd noisy = k + 0.3 * random_symmetric(rng, n);
    const double before = op_norm(k - noisy);
    const double after = op_norm(k - regularize_threshold(noisy));
    CHECK(after <= before + 1e-10);
  }
}

TEST_CASE("sdp regularization") {
  SUBCASE("2x2 analytic nearest correlation matrix") {
    Eigen::MatrixXd a(2, 2);
    a << 1.0, 1.5, 1.5, 1.0;
    const SdpResult result = regularize_sdp(a);
    CHECK(result.converged);
    CHECK((result.matrix - Eigen::MatrixXd::Ones(2, 2)).cwiseAbs().maxCoeff() <
          1e-6);
  }
  SUBCASE("psd unit-diagonal input unchanged within 1e-8") {
    Rng rng = keyed_rng(509);
    KernelMatrix k = random_kernel_like(rng, 4);
    const Eigen::MatrixXd feasible = regularize_sdp(k.entries).matrix;
    // feasible is PSD with unit diagonal; projecting again must not move it
    const Eigen::MatrixXd again = regularize_sdp(feasible).matrix;
    CHECK((again - feasible).cwiseAbs().maxCoeff() < 1e-8);
  }
  SUBCASE("feasibility on random symmetric inputs") {
    Rng rng = keyed_rng(510);
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 2 + static_cast<int>(rng.below(7));
      const Eigen::MatrixXd a = random_symmetric(rng, n);
      const SdpResult result = regularize_sdp(a);
      CHECK((result.matrix.diagonal().array() - 1.0).abs().maxCoeff() <= 1e-8);
      CHECK(min_eig(result.matrix) >= -1e-8);
    }
  }
  SUBCASE("sdp distance dominates the unconstrained threshold distance") {
    Rng rng = keyed_rng(511);
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::MatrixXd a = random_symmetric(rng, 5);
      const double thr = (a - regularize_threshold(a)).norm();
      const double sdp = (a - regularize_sdp(a).matrix).norm();
      CHECK(sdp >= thr - 1e-10);
    }
  }
}

TEST_CASE("strategy tokens round-trip") {
  for (const auto& token : {"Id-Id-Id", "THR-Id-Id", "Id-SPLIT-TIK",
                            "TIK-MEAN-SDP", "Id-SINGLE-THR"}) {
    CHECK(PostProcessStrategy::parse(token).token() == token);
  }
  CHECK_THROWS_AS(PostProcessStrategy::parse("THR"), std::invalid_argument);
  CHECK_THROWS_AS(PostProcessStrategy::parse("FOO-Id-Id"), std::invalid_argument);
}

TEST_CASE("canonicalization rules") {
  using R = RegularizationMode;
  using M = MitigationMode;
  // a lone regularizer moves to the front
  CHECK(canonical_strategy({R::Id, M::Id, R::Thr}) ==
        PostProcessStrategy{R::Thr, M::Id, R::Id});
  // mitigation after SDP drops out
  CHECK(canonical_strategy({R::Sdp, M::Mean, R::Tik}) ==
        PostProcessStrategy{R::Sdp, M::Id, R::Id});
  // second regularizer after a PSD-producing first one drops out
  CHECK(canonical_strategy({R::Tik, M::Id, R::Thr}) ==
        PostProcessStrategy{R::Tik, M::Id, R::Id});
  CHECK(canonical_strategy({R::Sdp, M::Id, R::Sdp}) ==
        PostProcessStrategy{R::Sdp, M::Id, R::Id});
  // SDP after TIK is a real step and stays
  CHECK(canonical_strategy({R::Tik, M::Id, R::Sdp}) ==
        PostProcessStrategy{R::Tik, M::Id, R::Sdp});
  // with mitigation in between, both regularizers stay
  CHECK(canonical_strategy({R::Thr, M::Split, R::Thr}) ==
        PostProcessStrategy{R::Thr, M::Split, R::Thr});
}

TEST_CASE("the canonical strategy set has exactly 42 members") {
  const auto strategies = enumerate_strategies();
  CHECK(strategies.size() == 42);
  CHECK(strategies.front() == PostProcessStrategy{});  // (Id, Id, Id)

  std::set<std::string> tokens;
  for (const auto& s : strategies) tokens.insert(s.token());
  CHECK(tokens.size() == 42);
  CHECK(tokens.count("Id-Id-Id") == 1);
  CHECK(tokens.count("Id-SPLIT-TIK") == 1);
  CHECK(tokens.count("THR-Id-Id") == 1);
  // no mitigation ever follows SDP
  CHECK(tokens.count("SDP-MEAN-TIK") == 0);
  for (const auto& s : strategies) {
    if (s.r1 == RegularizationMode::Sdp) CHECK(s.m == MitigationMode::Id);
  }
  // stable across calls
  CHECK(enumerate_strategies() == strategies);
}

TEST_CASE("apply_strategy composes the steps") {
  Rng rng = keyed_rng(512);
  const int qubits = 2;
  const KernelMatrix exact = random_kernel_like(rng, 5);
  Eigen::VectorXd lambdas(5);
  for (int i = 0; i < 5; ++i) lambdas[i] = rng.uniform(0.75, 0.95);
  const KernelMatrix device = global_depolarized_matrix(exact, lambdas, qubits);

  SUBCASE("identity strategy copies the input") {
    const KernelMatrix out =
        apply_strategy(device, PostProcessStrategy{}, qubits);
    CHECK((out.entries - device.entries).cwiseAbs().maxCoeff() == 0.0);
    CHECK(out.provenance == Provenance::Post);
  }
  SUBCASE("Id-SPLIT-Id inverts the analytic map") {
    const KernelMatrix out = apply_strategy(
        device, PostProcessStrategy::parse("Id-SPLIT-Id"), qubits);
    CHECK((out.entries - exact.entries).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("THR-Id-Id makes indefinite inputs PSD") {
    KernelMatrix indefinite = device;
    indefinite.entries(0, 1) = indefinite.entries(1, 0) = 1.8;
    REQUIRE(min_eig(indefinite.entries) < 0.0);
    const KernelMatrix out = apply_strategy(
        indefinite, PostProcessStrategy::parse("THR-Id-Id"), qubits);
    CHECK(min_eig(out.entries) >= -1e-10);
  }
}

TEST_CASE("relative improvement endpoints") {
  Rng rng = keyed_rng(513);
  const Eigen::MatrixXd exact = random_kernel_like(rng, 4).entries;
  Eigen::MatrixXd raw = exact;
  raw(0, 1) = raw(1, 0) = 0.5 * raw(0, 1) + 0.2;
  REQUIRE(matrix_alignment(raw, exact) < 1.0);

  CHECK(relative_improvement(exact, raw, exact) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(relative_improvement(raw, raw, exact) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(relative_improvement(exact, exact, exact),
                  std::invalid_argument);
}

TEST_CASE("ranking on a noiseless input puts Id-Id-Id first with alignment 1") {
  Rng rng = keyed_rng(514);
  const KernelMatrix exact = random_kernel_like(rng, 5);
  KernelMatrix input = exact;
  input.provenance = Provenance::Exact;
  const auto scores = rank_strategies(input, exact.entries, 2);
  REQUIRE(scores.size() == 42);
  CHECK(scores.front().strategy == PostProcessStrategy{});
  CHECK(scores.front().alignment == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(scores.front().q == 0.0);
}

TEST_CASE("analytic device noise: mitigation outranks pure regularization") {
  Rng rng = keyed_rng(515);
  const int qubits = 3;
  const KernelMatrix exact = random_kernel_like(rng, 8);
  Eigen::VectorXd lambdas(8);
  for (int i = 0; i < 8; ++i) lambdas[i] = rng.uniform(0.75, 0.95);
  const KernelMatrix device = global_depolarized_matrix(exact, lambdas, qubits);

  const auto scores = rank_strategies(device, exact.entries, qubits);
  REQUIRE(!scores.empty());
  CHECK(scores.front().feasible);
  // split mitigation recovers the exact matrix analytically
  CHECK(scores.front().strategy.m != MitigationMode::Id);
  CHECK(scores.front().alignment == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(scores.front().q > 0.0);

  double best_regularization_only = -2.0;
  for (const auto& s : scores) {
    if (s.feasible && s.strategy.m == MitigationMode::Id &&
        !(s.strategy == PostProcessStrategy{})) {
      best_regularization_only = std::max(best_regularization_only, s.alignment);
    }
  }
  CHECK(scores.front().alignment > best_regularization_only);
}

TEST_CASE("ranking lists infeasible strategies with a reason") {
  Rng rng = keyed_rng(516);
  KernelMatrix device = random_kernel_like(rng, 4);
  device.provenance = Provenance::Sampled;
  device.diagonal_measured = false;  // mitigation cannot run
  const auto scores = rank_strategies(device, device.entries, 2);
  int infeasible = 0;
  for (const auto& s : scores) {
    if (!s.feasible) {
      ++infeasible;
      CHECK(!s.failure_reason.empty());
      CHECK(s.strategy.m != MitigationMode::Id);
    }
  }
  // all 36 mitigation strategies are structurally infeasible here
  CHECK(infeasible == 36);
}
