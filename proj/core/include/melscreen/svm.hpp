#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace melscreen {

struct KernelSpec {
  enum class Kind { linear, rbf };
  Kind kind = Kind::rbf;
  double gamma = 1.0;  // rbf only, > 0

  static KernelSpec linear() { return {Kind::linear, 0.0}; }
  static KernelSpec rbf(double gamma) { return {Kind::rbf, gamma}; }
};

double kernel_value(const KernelSpec& k, const Eigen::VectorXd& a,
                    const Eigen::VectorXd& b);

struct SvmTrainOptions {
  bool class_weights = true;  // w+ = N/(2N+), w- = N/(2N-)
  double kkt_tolerance = 1e-3;
  long max_pair_updates = 0;  // 0 -> automatic cap from N
};

struct SvmModel {
  KernelSpec kernel;
  Eigen::MatrixXd support_vectors;
  Eigen::VectorXd dual_coefs;  // alpha_i * y_i
  double bias = 0.0;
  double C = 1.0;
  double weight_pos = 1.0;
  double weight_neg = 1.0;
};

// Soft-margin dual solved by SMO-style maximal-violating-pair updates.
// y must be in {-1, +1} with at least one example of each class.
SvmModel train_svc(const Eigen::MatrixXd& X, const std::vector<int>& y, double C,
                   const KernelSpec& kernel, const SvmTrainOptions& opts = {});

// Raw margin values (not thresholded, not probabilities).
Eigen::VectorXd decision_values(const SvmModel& model, const Eigen::MatrixXd& X);

struct GridSpec {
  std::vector<double> C_values;
  std::vector<double> gamma_values;  // empty for linear kernels
  int inner_folds = 5;

  // C in {2^c : c = -5, -3, ..., 15}, Gamma in {2^g : g = -15, -13, ..., 3}.
  static GridSpec paper_rbf();
  // C in {10^c : c = -4 .. 3}.
  static GridSpec paper_linear();
};

struct GridSearchResult {
  double C = 0.0;
  double gamma = 0.0;  // 0 for linear
  double cv_auc = 0.0;
};

// Stratified inner-fold CV on the training rows only; each grid point scored
// by mean AUC of held-out decision values. Ties prefer smaller C, then
// smaller gamma.
GridSearchResult grid_search_auc(const Eigen::MatrixXd& X, const std::vector<int>& y,
                                 const GridSpec& grid, KernelSpec::Kind kind,
                                 std::uint64_t seed, int threads = 1,
                                 const SvmTrainOptions& opts = {});

}  // namespace melscreen
