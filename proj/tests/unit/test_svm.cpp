#include <doctest.h>

#include <stdexcept>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "melscreen/rng.hpp"
#include "melscreen/svm.hpp"

using namespace melscreen;

namespace {

double primal_objective(const SvmModel& model, const Eigen::MatrixXd& X,
                        const std::vector<int>& y) {
  // ||w||^2 = sum_ij (a_i y_i)(a_j y_j) K(x_i, x_j) over support vectors.
  double wsq = 0.0;
  const long n_sv = model.support_vectors.rows();
  for (long i = 0; i < n_sv; ++i) {
    for (long j = 0; j < n_sv; ++j) {
      wsq += model.dual_coefs(i) * model.dual_coefs(j) *
             kernel_value(model.kernel, model.support_vectors.row(i),
                          model.support_vectors.row(j));
    }
  }
  const Eigen::VectorXd f = decision_values(model, X);
  double hinge = 0.0;
  for (long i = 0; i < X.rows(); ++i) {
    hinge += std::max(0.0, 1.0 - y[static_cast<std::size_t>(i)] * f(i));
  }
  return 0.5 * wsq + model.C * hinge;
}

double dual_objective(const SvmModel& model) {
  double sum_alpha = 0.0, quad = 0.0;
  const long n_sv = model.support_vectors.rows();
  for (long i = 0; i < n_sv; ++i) {
    sum_alpha += std::abs(model.dual_coefs(i));
    for (long j = 0; j < n_sv; ++j) {
      quad += model.dual_coefs(i) * model.dual_coefs(j) *
              kernel_value(model.kernel, model.support_vectors.row(i),
                           model.support_vectors.row(j));
    }
  }
  return sum_alpha - 0.5 * quad;
}

}  // namespace

TEST_CASE("analytic 1-D max-margin solution") {
  Eigen::MatrixXd X(2, 1);
  X << -1.0, 1.0;
  const std::vector<int> y = {-1, 1};
  SvmTrainOptions opts;
  opts.class_weights = false;
  const SvmModel model = train_svc(X, y, 100.0, KernelSpec::linear(), opts);
  // Max margin: f(x) = w x + b with w = 1, b = 0.
  Eigen::MatrixXd probe(3, 1);
  probe << -1.0, 0.0, 1.0;
  const Eigen::VectorXd f = decision_values(model, probe);
  CHECK(f(0) == doctest::Approx(-1.0).epsilon(0.01));
  CHECK(f(1) == doctest::Approx(0.0).epsilon(0.01));
  CHECK(f(2) == doctest::Approx(1.0).epsilon(0.01));
  CHECK(model.bias == doctest::Approx(0.0).epsilon(0.01));
}

TEST_CASE("XOR trains to 4/4 with an RBF kernel") {
  Eigen::MatrixXd X(4, 2);
  X << 0, 0, 1, 1, 0, 1, 1, 0;
  const std::vector<int> y = {1, 1, -1, -1};
  const SvmModel model = train_svc(X, y, 10.0, KernelSpec::rbf(1.0));
  const Eigen::VectorXd f = decision_values(model, X);
  for (long i = 0; i < 4; ++i) {
    CHECK(f(i) * y[static_cast<std::size_t>(i)] > 0.0);
  }
}

TEST_CASE("duality gap <= 1% on fuzzed separable sets") {
  Rng rng(2025);
  for (int trial = 0; trial < 20; ++trial) {
    const long n = 20 + static_cast<long>(rng.next_below(30));
    Eigen::MatrixXd X(n, 2);
    std::vector<int> y;
    for (long i = 0; i < n; ++i) {
      const bool pos = i % 2 == 0;
      // Separated blobs with margin.
      X(i, 0) = rng.next_normal(pos ? 3.0 : -3.0, 0.5);
      X(i, 1) = rng.next_normal(0.0, 0.5);
      y.push_back(pos ? 1 : -1);
    }
    SvmTrainOptions opts;
    opts.class_weights = false;
    const KernelSpec kernel =
        trial % 2 == 0 ? KernelSpec::linear() : KernelSpec::rbf(0.5);
    const SvmModel model = train_svc(X, y, 1.0, kernel, opts);
    const double p = primal_objective(model, X, y);
    const double d = dual_objective(model);
    CHECK(d <= p + 1e-9);
    CHECK(p - d <= 0.01 * std::max(1e-12, std::abs(p)));
    // Separable data classifies cleanly.
    const Eigen::VectorXd f = decision_values(model, X);
    for (long i = 0; i < n; ++i) CHECK(f(i) * y[static_cast<std::size_t>(i)] > 0.0);
  }
}

TEST_CASE("class weights follow N/(2N+-)") {
  Eigen::MatrixXd X(6, 1);
  X << -3, -2, -1, 1, 2, 3;
  const std::vector<int> y = {-1, -1, -1, -1, -1, 1};
  const SvmModel model = train_svc(X, y, 1.0, KernelSpec::linear());
  CHECK(model.weight_pos == doctest::Approx(6.0 / 2.0));
  CHECK(model.weight_neg == doctest::Approx(6.0 / 10.0));
}

TEST_CASE("train_svc input validation") {
  Eigen::MatrixXd X(2, 1);
  X << 0.0, 1.0;
  CHECK_THROWS_AS(train_svc(X, {1, 1}, 1.0, KernelSpec::linear()),
                  std::invalid_argument);
  CHECK_THROWS_AS(train_svc(X, {1, 2}, 1.0, KernelSpec::linear()),
                  std::invalid_argument);
  CHECK_THROWS_AS(train_svc(X, {1, -1}, -1.0, KernelSpec::linear()),
                  std::invalid_argument);
}

TEST_CASE("default grids have 110 RBF and 8 linear points") {
  const GridSpec rbf = GridSpec::paper_rbf();
  CHECK(rbf.C_values.size() == 11);
  CHECK(rbf.gamma_values.size() == 10);
  CHECK(rbf.C_values.size() * rbf.gamma_values.size() == 110);
  CHECK(rbf.C_values.front() == doctest::Approx(std::pow(2.0, -5)));
  CHECK(rbf.C_values.back() == doctest::Approx(std::pow(2.0, 15)));
  CHECK(rbf.gamma_values.front() == doctest::Approx(std::pow(2.0, -15)));
  CHECK(rbf.gamma_values.back() == doctest::Approx(std::pow(2.0, 3)));

  const GridSpec lin = GridSpec::paper_linear();
  CHECK(lin.C_values.size() == 8);
  CHECK(lin.gamma_values.empty());
  CHECK(lin.C_values.front() == doctest::Approx(1e-4));
  CHECK(lin.C_values.back() == doctest::Approx(1e3));
}

TEST_CASE("grid search scores well on separable data and is deterministic") {
  Rng rng(5);
  Eigen::MatrixXd X(40, 2);
  std::vector<int> y;
  for (long i = 0; i < 40; ++i) {
    const bool pos = i < 20;
    X(i, 0) = rng.next_normal(pos ? 2.0 : -2.0, 0.4);
    X(i, 1) = rng.next_normal(0.0, 0.4);
    y.push_back(pos ? 1 : -1);
  }
  GridSpec grid = GridSpec::paper_linear();
  grid.inner_folds = 4;
  const GridSearchResult a =
      grid_search_auc(X, y, grid, KernelSpec::Kind::linear, 9, 1);
  const GridSearchResult b =
      grid_search_auc(X, y, grid, KernelSpec::Kind::linear, 9, 4);
  CHECK(a.cv_auc >= 0.95);
  CHECK(a.C == b.C);
  CHECK(a.cv_auc == b.cv_auc);
  bool in_grid = false;
  for (double c : grid.C_values) in_grid = in_grid || c == a.C;
  CHECK(in_grid);
}

TEST_CASE("decision_values edge cases") {
  Eigen::MatrixXd X(4, 2);
  X << 0, 0, 0, 1, 1, 0, 1, 1;
  const std::vector<int> y = {-1, -1, 1, 1};
  const SvmModel model = train_svc(X, y, 1.0, KernelSpec::rbf(0.7));
  CHECK(decision_values(model, Eigen::MatrixXd(0, 2)).size() == 0);
  CHECK_THROWS_AS(decision_values(model, Eigen::MatrixXd(1, 3)),
                  std::invalid_argument);
}
