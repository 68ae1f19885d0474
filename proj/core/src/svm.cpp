#include "melscreen/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "melscreen/eval.hpp"
#include "melscreen/parallel.hpp"
#include "melscreen/rng.hpp"

namespace melscreen {

double kernel_value(const KernelSpec& k, const Eigen::VectorXd& a,
                    const Eigen::VectorXd& b) {
  if (k.kind == KernelSpec::Kind::linear) return a.dot(b);
  return std::exp(-k.gamma * (a - b).squaredNorm());
}

namespace {

Eigen::MatrixXd kernel_matrix(const KernelSpec& k, const Eigen::MatrixXd& X) {
  const long n = X.rows();
  if (k.kind == KernelSpec::Kind::linear) return X * X.transpose();
  const Eigen::VectorXd sq = X.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = (-2.0 * (X * X.transpose())).colwise() + sq;
  d2.rowwise() += sq.transpose();
  return (-k.gamma * d2.cwiseMax(0.0)).array().exp().matrix();
}

}  // namespace

SvmModel train_svc(const Eigen::MatrixXd& X, const std::vector<int>& y, double C,
                   const KernelSpec& kernel, const SvmTrainOptions& opts) {
  const long n = X.rows();
  if (n < 2 || static_cast<long>(y.size()) != n) {
    throw std::invalid_argument("train_svc: need >= 2 rows with matching labels");
  }
  long n_pos = 0, n_neg = 0;
  for (int v : y) {
    if (v == 1) {
      ++n_pos;
    } else if (v == -1) {
      ++n_neg;
    } else {
      throw std::invalid_argument("train_svc: labels must be -1 or +1");
    }
  }
  if (n_pos == 0 || n_neg == 0) {
    throw std::invalid_argument("train_svc: both classes must be present");
  }
  if (C <= 0.0) throw std::invalid_argument("train_svc: C must be > 0");
  if (kernel.kind == KernelSpec::Kind::rbf && kernel.gamma <= 0.0) {
    throw std::invalid_argument("train_svc: rbf gamma must be > 0");
  }

  const double w_pos =
      opts.class_weights ? static_cast<double>(n) / (2.0 * static_cast<double>(n_pos)) : 1.0;
  const double w_neg =
      opts.class_weights ? static_cast<double>(n) / (2.0 * static_cast<double>(n_neg)) : 1.0;

  const Eigen::MatrixXd K = kernel_matrix(kernel, X);
  std::vector<double> cap(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    cap[static_cast<std::size_t>(i)] = C * (y[static_cast<std::size_t>(i)] == 1 ? w_pos : w_neg);
  }

  std::vector<double> alpha(static_cast<std::size_t>(n), 0.0);
  std::vector<double> grad(static_cast<std::size_t>(n), -1.0);  // G_i = sum Q alpha - 1
  const double tol = opts.kkt_tolerance;
  const long max_updates =
      opts.max_pair_updates > 0 ? opts.max_pair_updates : std::max<long>(200000, 400 * n);

  double m_val = 0.0, big_m_val = 0.0;
  for (long iter = 0; iter < max_updates; ++iter) {
    // Maximal violating pair.
    long i = -1, j = -1;
    m_val = -std::numeric_limits<double>::infinity();
    big_m_val = std::numeric_limits<double>::infinity();
    for (long t = 0; t < n; ++t) {
      const std::size_t ts = static_cast<std::size_t>(t);
      const double yg = -y[ts] * grad[ts];
      const bool in_up = (y[ts] == 1 && alpha[ts] < cap[ts]) || (y[ts] == -1 && alpha[ts] > 0.0);
      const bool in_low = (y[ts] == 1 && alpha[ts] > 0.0) || (y[ts] == -1 && alpha[ts] < cap[ts]);
      if (in_up && yg > m_val) {
        m_val = yg;
        i = t;
      }
      if (in_low && yg < big_m_val) {
        big_m_val = yg;
        j = t;
      }
    }
    if (i < 0 || j < 0 || m_val - big_m_val < tol) break;

    const std::size_t si = static_cast<std::size_t>(i);
    const std::size_t sj = static_cast<std::size_t>(j);
    const double eta = std::max(K(i, i) + K(j, j) - 2.0 * K(i, j), 1e-12);
    const double old_ai = alpha[si];
    const double old_aj = alpha[sj];

    if (y[si] != y[sj]) {
      const double delta = (-grad[si] - grad[sj]) / eta;
      const double diff = alpha[si] - alpha[sj];
      alpha[si] += delta;
      alpha[sj] += delta;
      if (diff > 0.0) {
        if (alpha[sj] < 0.0) {
          alpha[sj] = 0.0;
          alpha[si] = diff;
        }
      } else {
        if (alpha[si] < 0.0) {
          alpha[si] = 0.0;
          alpha[sj] = -diff;
        }
      }
      if (diff > cap[si] - cap[sj]) {
        if (alpha[si] > cap[si]) {
          alpha[si] = cap[si];
          alpha[sj] = cap[si] - diff;
        }
      } else {
        if (alpha[sj] > cap[sj]) {
          alpha[sj] = cap[sj];
          alpha[si] = cap[sj] + diff;
        }
      }
    } else {
      const double delta = (grad[si] - grad[sj]) / eta;
      const double sum = alpha[si] + alpha[sj];
      alpha[si] -= delta;
      alpha[sj] += delta;
      if (sum > cap[si]) {
        if (alpha[si] > cap[si]) {
          alpha[si] = cap[si];
          alpha[sj] = sum - cap[si];
        }
      } else {
        if (alpha[sj] < 0.0) {
          alpha[sj] = 0.0;
          alpha[si] = sum;
        }
      }
      if (sum > cap[sj]) {
        if (alpha[sj] > cap[sj]) {
          alpha[sj] = cap[sj];
          alpha[si] = sum - cap[sj];
        }
      } else {
        if (alpha[si] < 0.0) {
          alpha[si] = 0.0;
          alpha[sj] = sum;
        }
      }
    }

    const double dai = (alpha[si] - old_ai) * y[si];
    const double daj = (alpha[sj] - old_aj) * y[sj];
    for (long t = 0; t < n; ++t) {
      const std::size_t ts = static_cast<std::size_t>(t);
      grad[ts] += y[ts] * (K(t, i) * dai + K(t, j) * daj);
    }
  }

  // Bias from free support vectors, midpoint of the KKT bounds otherwise.
  double rho;
  double free_sum = 0.0;
  long free_count = 0;
  for (long t = 0; t < n; ++t) {
    const std::size_t ts = static_cast<std::size_t>(t);
    if (alpha[ts] > 1e-12 && alpha[ts] < cap[ts] - 1e-12) {
      free_sum += y[ts] * grad[ts];
      ++free_count;
    }
  }
  if (free_count > 0) {
    rho = free_sum / static_cast<double>(free_count);
  } else {
    rho = -(m_val + big_m_val) / 2.0;
  }

  SvmModel model;
  model.kernel = kernel;
  model.C = C;
  model.weight_pos = w_pos;
  model.weight_neg = w_neg;
  model.bias = -rho;
  std::vector<long> sv;
  for (long t = 0; t < n; ++t) {
    if (alpha[static_cast<std::size_t>(t)] > 1e-12) sv.push_back(t);
  }
  model.support_vectors.resize(static_cast<long>(sv.size()), X.cols());
  model.dual_coefs.resize(static_cast<long>(sv.size()));
  for (std::size_t s = 0; s < sv.size(); ++s) {
    model.support_vectors.row(static_cast<long>(s)) = X.row(sv[s]);
    model.dual_coefs(static_cast<long>(s)) =
        alpha[static_cast<std::size_t>(sv[s])] * y[static_cast<std::size_t>(sv[s])];
  }
  return model;
}

Eigen::VectorXd decision_values(const SvmModel& model, const Eigen::MatrixXd& X) {
  if (X.rows() == 0) return Eigen::VectorXd();
  if (model.support_vectors.rows() > 0 && X.cols() != model.support_vectors.cols()) {
    throw std::invalid_argument("decision_values: feature dimension mismatch");
  }
  Eigen::VectorXd out(X.rows());
  if (model.support_vectors.rows() == 0) {
    out.setConstant(model.bias);
    return out;
  }
  if (model.kernel.kind == KernelSpec::Kind::linear) {
    const Eigen::VectorXd w = model.support_vectors.transpose() * model.dual_coefs;
    out = X * w;
  } else {
    const Eigen::VectorXd sv_sq = model.support_vectors.rowwise().squaredNorm();
    const Eigen::VectorXd x_sq = X.rowwise().squaredNorm();
    Eigen::MatrixXd d2 = (-2.0 * (X * model.support_vectors.transpose())).colwise() + x_sq;
    d2.rowwise() += sv_sq.transpose();
    out = (-model.kernel.gamma * d2.cwiseMax(0.0)).array().exp().matrix() * model.dual_coefs;
  }
  out.array() += model.bias;
  return out;
}

GridSpec GridSpec::paper_rbf() {
  GridSpec g;
  for (int c = -5; c <= 15; c += 2) g.C_values.push_back(std::pow(2.0, c));
  for (int e = -15; e <= 3; e += 2) g.gamma_values.push_back(std::pow(2.0, e));
  return g;
}

GridSpec GridSpec::paper_linear() {
  GridSpec g;
  for (int c = -4; c <= 3; ++c) g.C_values.push_back(std::pow(10.0, c));
  return g;
}

GridSearchResult grid_search_auc(const Eigen::MatrixXd& X, const std::vector<int>& y,
                                 const GridSpec& grid, KernelSpec::Kind kind,
                                 std::uint64_t seed, int threads,
                                 const SvmTrainOptions& opts) {
  if (grid.C_values.empty()) throw std::invalid_argument("grid_search_auc: empty C grid");
  if (grid.inner_folds < 2) throw std::invalid_argument("grid_search_auc: inner_folds must be >= 2");
  const long n = X.rows();
  if (static_cast<long>(y.size()) != n) {
    throw std::invalid_argument("grid_search_auc: label count mismatch");
  }

  // Stratified fold assignment: shuffle within class, deal round-robin.
  std::vector<long> pos_idx, neg_idx;
  for (long i = 0; i < n; ++i) (y[static_cast<std::size_t>(i)] == 1 ? pos_idx : neg_idx).push_back(i);
  if (pos_idx.empty() || neg_idx.empty()) {
    throw std::invalid_argument("grid_search_auc: both classes must be present");
  }
  Rng rng(seed);
  rng.shuffle(pos_idx);
  rng.shuffle(neg_idx);
  std::vector<int> fold_of(static_cast<std::size_t>(n), 0);
  for (std::size_t i = 0; i < pos_idx.size(); ++i) {
    fold_of[static_cast<std::size_t>(pos_idx[i])] = static_cast<int>(i % grid.inner_folds);
  }
  for (std::size_t i = 0; i < neg_idx.size(); ++i) {
    fold_of[static_cast<std::size_t>(neg_idx[i])] = static_cast<int>(i % grid.inner_folds);
  }

  std::vector<double> Cs = grid.C_values;
  std::sort(Cs.begin(), Cs.end());
  std::vector<double> gammas = grid.gamma_values;
  std::sort(gammas.begin(), gammas.end());
  if (kind == KernelSpec::Kind::linear) gammas = {0.0};
  if (kind == KernelSpec::Kind::rbf && gammas.empty()) {
    throw std::invalid_argument("grid_search_auc: rbf grid needs gamma values");
  }
  struct Point {
    double C, gamma;
  };
  std::vector<Point> points;
  for (double c : Cs) {
    for (double g : gammas) points.push_back({c, g});
  }

  std::vector<double> scores(points.size(), 0.0);
  parallel_for(points.size(), threads, [&](std::size_t p) {
    const KernelSpec kernel = kind == KernelSpec::Kind::linear
                                  ? KernelSpec::linear()
                                  : KernelSpec::rbf(points[p].gamma);
    double total = 0.0;
    int scored = 0;
    for (int f = 0; f < grid.inner_folds; ++f) {
      std::vector<long> train, test;
      for (long i = 0; i < n; ++i) {
        (fold_of[static_cast<std::size_t>(i)] == f ? test : train).push_back(i);
      }
      if (test.empty() || train.empty()) continue;
      long tp = 0, tn = 0, hp = 0, hn = 0;
      for (long i : train) (y[static_cast<std::size_t>(i)] == 1 ? tp : tn)++;
      for (long i : test) (y[static_cast<std::size_t>(i)] == 1 ? hp : hn)++;
      // A degenerate inner fold is skipped, not scored.
      if (tp == 0 || tn == 0 || hp == 0 || hn == 0) continue;

      Eigen::MatrixXd Xtr(static_cast<long>(train.size()), X.cols());
      Eigen::MatrixXd Xte(static_cast<long>(test.size()), X.cols());
      std::vector<int> ytr(train.size());
      std::vector<int> yte(test.size());
      for (std::size_t i = 0; i < train.size(); ++i) {
        Xtr.row(static_cast<long>(i)) = X.row(train[i]);
        ytr[i] = y[static_cast<std::size_t>(train[i])];
      }
      for (std::size_t i = 0; i < test.size(); ++i) {
        Xte.row(static_cast<long>(i)) = X.row(test[i]);
        yte[i] = y[static_cast<std::size_t>(test[i])];
      }
      const SvmModel model = train_svc(Xtr, ytr, points[p].C, kernel, opts);
      const Eigen::VectorXd dv = decision_values(model, Xte);
      std::vector<double> s(dv.data(), dv.data() + dv.size());
      total += auc(s, yte);
      ++scored;
    }
    scores[p] = scored > 0 ? total / scored : 0.0;
  });

  // Points were generated C ascending then gamma ascending, so the first
  // strictly-better score wins ties toward smaller C then smaller gamma.
  std::size_t best = 0;
  for (std::size_t p = 1; p < points.size(); ++p) {
    if (scores[p] > scores[best]) best = p;
  }
  return {points[best].C, points[best].gamma, scores[best]};
}

}  // namespace melscreen
