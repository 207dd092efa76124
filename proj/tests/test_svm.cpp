#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "qekl/kernel.hpp"
#include "qekl/rng.hpp"
#include "qekl/svm.hpp"

using namespace qekl;

namespace {

// Exhaustive active-set oracle for the dual
//   max sum_i a_i - 1/2 sum_ij a_i a_j y_i y_j K_ij
//   s.t. 0 <= a_i <= C, sum_i a_i y_i = 0.
// Every variable is pinned to 0, to C, or left free; each of the 3^n
// patterns yields a linear KKT system for the free block. The best
// feasible candidate is the optimum.
struct OracleSolution {
  Eigen::VectorXd alpha;
  double objective = -1e300;
};

double dual_objective(const Eigen::MatrixXd& q, const Eigen::VectorXd& a) {
  return a.sum() - 0.5 * a.dot(q * a);
}

OracleSolution brute_force_dual(const Eigen::MatrixXd& kernel,
                                const std::vector<int>& labels, double C) {
  const int n = static_cast<int>(labels.size());
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = labels[i];
  const Eigen::MatrixXd q =
      kernel.cwiseProduct(y * y.transpose());

  OracleSolution best;
  std::vector<int> state(n, 0);  // 0 = at 0, 1 = at C, 2 = free
  long patterns = 1;
  for (int i = 0; i < n; ++i) patterns *= 3;

  for (long code = 0; code < patterns; ++code) {
    long rest = code;
    std::vector<int> free_idx;
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
      state[i] = static_cast<int>(rest % 3);
      rest /= 3;
      if (state[i] == 1) alpha[i] = C;
      if (state[i] == 2) free_idx.push_back(i);
    }
    const int f = static_cast<int>(free_idx.size());
    if (f > 0) {
      // stationarity on the free block with multiplier for the equality
      Eigen::MatrixXd sys(f + 1, f + 1);
      Eigen::VectorXd rhs(f + 1);
      for (int a = 0; a < f; ++a) {
        for (int b = 0; b < f; ++b) sys(a, b) = q(free_idx[a], free_idx[b]);
        sys(a, f) = y[free_idx[a]];
        sys(f, a) = y[free_idx[a]];
        double bound_term = 0.0;
        for (int i = 0; i < n; ++i) {
          if (state[i] == 1) bound_term += q(free_idx[a], i) * C;
        }
        rhs[a] = 1.0 - bound_term;
      }
      sys(f, f) = 0.0;
      double bound_y = 0.0;
      for (int i = 0; i < n; ++i) {
        if (state[i] == 1) bound_y += y[i] * C;
      }
      rhs[f] = -bound_y;
      const Eigen::VectorXd sol = sys.fullPivLu().solve(rhs);
      if ((sys * sol - rhs).norm() > 1e-8) continue;  // inconsistent pattern
      for (int a = 0; a < f; ++a) alpha[free_idx[a]] = sol[a];
    }
    // feasibility
    if ((alpha.array() < -1e-9).any() || (alpha.array() > C + 1e-9).any()) {
      continue;
    }
    if (std::abs(alpha.dot(y)) > 1e-9) continue;
    const double obj = dual_objective(q, alpha);
    if (obj > best.objective) {
      best.objective = obj;
      best.alpha = alpha;
    }
  }
  return best;
}

double oracle_decision(const Eigen::MatrixXd& kernel,
                       const std::vector<int>& labels, double C,
                       const Eigen::VectorXd& alpha, int test_index) {
  // intercept from a free support vector, else midpoint rule
  const int n = static_cast<int>(labels.size());
  double b = 0.0;
  int free_count = 0;
  for (int i = 0; i < n; ++i) {
    if (alpha[i] > 1e-7 && alpha[i] < C - 1e-7) {
      double f = 0.0;
      for (int j = 0; j < n; ++j) f += alpha[j] * labels[j] * kernel(i, j);
      b += labels[i] - f;
      ++free_count;
    }
  }
  if (free_count > 0) {
    b /= free_count;
  } else {
    double lo = -1e300, hi = 1e300;
    for (int i = 0; i < n; ++i) {
      double f = 0.0;
      for (int j = 0; j < n; ++j) f += alpha[j] * labels[j] * kernel(i, j);
      // margins: y_i (f + b) >= 1 for alpha = 0, <= 1 for alpha = C
      if (alpha[i] <= 1e-7) {
        if (labels[i] == 1) lo = std::max(lo, 1.0 - f);
        else hi = std::min(hi, f - 1.0);
      } else {
        if (labels[i] == 1) hi = std::min(hi, 1.0 - f);
        else lo = std::max(lo, f - 1.0);
      }
    }
    b = 0.5 * (lo + hi);
  }
  double f = 0.0;
  for (int j = 0; j < n; ++j) {
    f += alpha[j] * labels[j] * kernel(test_index, j);
  }
  return f + b;
}

LabeledDataset random_points(Rng& rng, int n) {
  LabeledDataset ds;
  ds.dataset_id = "svm-random";
  ds.split = "train";
  for (int i = 0; i < n; ++i) {
    ds.points.emplace_back(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    ds.labels.push_back(i % 2 == 0 ? 1 : -1);
  }
  return ds;
}

}  // namespace

TEST_CASE("two opposite points with K = I solve by hand") {
  const Eigen::MatrixXd k = Eigen::MatrixXd::Identity(2, 2);
  const std::vector<int> labels{1, -1};

  SUBCASE("C above 1 caps alpha at 1") {
    const SvmModel model = svm_fit(k, labels, 10.0);
    CHECK(model.alpha[0] == doctest::Approx(1.0).epsilon(2e-3));
    CHECK(model.alpha[1] == doctest::Approx(1.0).epsilon(2e-3));
    CHECK(model.b == doctest::Approx(0.0).epsilon(2e-3));
  }
  SUBCASE("small C pins alpha to the box") {
    const SvmModel model = svm_fit(k, labels, 0.25);
    CHECK(model.alpha[0] == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(model.alpha[1] == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(model.b == doctest::Approx(0.0).epsilon(1e-3));
  }
}

TEST_CASE("separable RBF toy reaches training accuracy 1") {
  LabeledDataset ds;
  ds.dataset_id = "toy";
  ds.split = "train";
  ds.points = {{0.0, 0.0}, {0.1, 0.1}, {1.0, 1.0}, {0.9, 1.1}};
  ds.labels = {1, 1, -1, -1};
  const KernelMatrix k = rbf_kernel_matrix(ds, 0.5);
  const SvmModel model = svm_fit(k.entries, ds.labels, 10.0);
  const std::vector<int> pred = svm_predict(model, k.entries);
  CHECK(accuracy(pred, ds.labels) == 1.0);
}

TEST_CASE("fit rejects indefinite kernels and bad labels") {
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3 and -1
  CHECK_THROWS_AS(svm_fit(bad, {1, -1}, 1.0), IndefiniteKernel);
  CHECK_THROWS_AS(svm_fit(Eigen::MatrixXd::Identity(2, 2), {1, 0}, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(svm_fit(Eigen::MatrixXd::Identity(2, 2), {1, -1}, -1.0),
                  std::invalid_argument);
}

TEST_CASE("dual constraints hold after fitting") {
  Rng rng = keyed_rng(601);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 4 + static_cast<int>(rng.below(17));
    const LabeledDataset ds = random_points(rng, n);
    const KernelMatrix k = rbf_kernel_matrix(ds, 0.7);
    const double C = 1.0;
    const SvmModel model = svm_fit(k.entries, ds.labels, C);

    CHECK((model.alpha.array() >= -1e-12).all());
    CHECK((model.alpha.array() <= C + 1e-12).all());
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += model.alpha[i] * ds.labels[i];
    CHECK(std::abs(sum) < 1e-6);

    // KKT residuals within the working tolerance
    const Eigen::VectorXd decision = svm_decision_function(model, k.entries);
    for (int i = 0; i < n; ++i) {
      const double margin = ds.labels[i] * decision[i];
      if (model.alpha[i] < 1e-8) CHECK(margin >= 1.0 - 1e-3);
      else if (model.alpha[i] > C - 1e-8) CHECK(margin <= 1.0 + 1e-3);
      else CHECK(margin == doctest::Approx(1.0).epsilon(2e-3));
    }
    for (int idx : model.support_indices) CHECK(model.alpha[idx] > 1e-8);
  }
}

TEST_CASE("smo matches the brute-force dual oracle on small instances") {
  Rng rng = keyed_rng(602);
  int sign_checks = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(4));  // up to 6
    LabeledDataset ds = random_points(rng, n);
    ds.labels[0] = 1;
    ds.labels[1] = -1;
    const KernelMatrix k = rbf_kernel_matrix(ds, 0.8);
    const double C = trial % 2 == 0 ? 1.0 : 5.0;

    const SvmModel model = svm_fit(k.entries, ds.labels, C);
    const OracleSolution oracle = brute_force_dual(k.entries, ds.labels, C);
    REQUIRE(oracle.objective > -1e300);

    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = ds.labels[i];
    const Eigen::MatrixXd q = k.entries.cwiseProduct(y * y.transpose());
    CHECK(dual_objective(q, model.alpha) ==
          doctest::Approx(oracle.objective).epsilon(1e-4));

    const Eigen::VectorXd decision = svm_decision_function(model, k.entries);
    for (int i = 0; i < n; ++i) {
      const double oracle_value =
          oracle_decision(k.entries, ds.labels, C, oracle.alpha, i);
      if (std::abs(oracle_value) > 1e-3 && std::abs(decision[i]) > 1e-3) {
        CHECK((decision[i] >= 0) == (oracle_value >= 0));
        ++sign_checks;
      }
    }
  }
  CHECK(sign_checks > 40);  // the comparison actually exercised many points
}

TEST_CASE("kernel scaling with rescaled C keeps predictions") {
  Rng rng = keyed_rng(603);
  const LabeledDataset ds = random_points(rng, 10);
  const KernelMatrix k = rbf_kernel_matrix(ds, 0.7);
  const double c_scale = 4.0;

  const SvmModel base = svm_fit(k.entries, ds.labels, 1.0);
  const SvmModel scaled =
      svm_fit(Eigen::MatrixXd(c_scale * k.entries), ds.labels, 1.0 / c_scale);

  CHECK((scaled.alpha - base.alpha / c_scale).cwiseAbs().maxCoeff() < 5e-3);
  CHECK(svm_predict(base, k.entries) ==
        svm_predict(scaled, Eigen::MatrixXd(c_scale * k.entries)));
}

TEST_CASE("degenerate all-zero model predicts the intercept sign") {
  SvmModel model;
  model.alpha = Eigen::VectorXd::Zero(3);
  model.labels = {1, -1, 1};
  model.C = 1.0;
  model.b = -0.5;
  Eigen::MatrixXd cross = Eigen::MatrixXd::Random(4, 3);
  const std::vector<int> pred = svm_predict(model, cross);
  CHECK(pred == std::vector<int>{-1, -1, -1, -1});
  model.b = 0.0;  // ties break toward +1
  CHECK(svm_predict(model, cross) == std::vector<int>{1, 1, 1, 1});
}

TEST_CASE("accuracy counting") {
  CHECK(accuracy({1, -1, 1}, {1, -1, 1}) == 1.0);
  CHECK(accuracy({1, -1}, {-1, 1}) == 0.0);
  CHECK(accuracy({1, 1, -1, -1}, {1, -1, -1, -1}) == 0.75);
  CHECK_THROWS_AS(accuracy({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(accuracy({1}, {1, -1}), std::invalid_argument);
}

TEST_CASE("model serialization round-trips") {
  Rng rng = keyed_rng(604);
  const LabeledDataset ds = random_points(rng, 8);
  const KernelMatrix k = rbf_kernel_matrix(ds, 0.9);
  const SvmModel model = svm_fit(k.entries, ds.labels, 2.0);

  const SvmModel copy = svm_from_json(svm_to_json(model));
  CHECK(copy.alpha.isApprox(model.alpha));
  CHECK(copy.b == model.b);
  CHECK(copy.support_indices == model.support_indices);
  CHECK(copy.labels == model.labels);
  CHECK(copy.C == model.C);
}

TEST_CASE("fit is deterministic for a fixed seed") {
  Rng rng = keyed_rng(605);
  const LabeledDataset ds = random_points(rng, 12);
  const KernelMatrix k = rbf_kernel_matrix(ds, 0.6);
  const SvmModel a = svm_fit(k.entries, ds.labels, 1.0, {.seed = 4});
  const SvmModel b = svm_fit(k.entries, ds.labels, 1.0, {.seed = 4});
  CHECK(a.alpha == b.alpha);
  CHECK(a.b == b.b);
}
