#include "melscreen/midlevel.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "melscreen/parallel.hpp"
#include "melscreen/rng.hpp"

namespace melscreen {

namespace {

// Index of the nearest centroid, squared distance out. Ties -> lowest index.
int nearest_centroid(const Eigen::MatrixXd& centroids, const Eigen::VectorXd& x,
                     double* dist2_out = nullptr) {
  int best = 0;
  double best_d = (centroids.row(0).transpose() - x).squaredNorm();
  for (int m = 1; m < centroids.rows(); ++m) {
    const double d = (centroids.row(m).transpose() - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = m;
    }
  }
  if (dist2_out) *dist2_out = best_d;
  return best;
}

}  // namespace

ZNorm fit_znorm(const Eigen::MatrixXd& train_descs) {
  if (train_descs.rows() < 2) {
    throw std::invalid_argument("fit_znorm needs at least 2 training rows");
  }
  ZNorm z;
  z.mean = train_descs.colwise().mean();
  const Eigen::MatrixXd centered = train_descs.rowwise() - z.mean.transpose();
  z.std = (centered.array().square().colwise().sum() /
           static_cast<double>(train_descs.rows()))
              .sqrt()
              .matrix();
  z.std = z.std.cwiseMax(1e-12);
  return z;
}

Eigen::MatrixXd apply_znorm(const ZNorm& z, const Eigen::MatrixXd& descs) {
  Eigen::MatrixXd out = descs.rowwise() - z.mean.transpose();
  out.array().rowwise() /= z.std.transpose().array();
  return out;
}

Codebook kmeans(const Eigen::MatrixXd& sample, int k, int max_iter,
                std::uint64_t seed, int threads) {
  const long n = sample.rows();
  if (k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
  if (n < k) {
    throw std::invalid_argument("kmeans: need at least k rows, got " +
                                std::to_string(n));
  }

  Rng rng(seed);
  Codebook cb;
  cb.centroids.resize(k, sample.cols());

  // k-means++ seeding.
  std::vector<double> min_d2(static_cast<std::size_t>(n),
                             std::numeric_limits<double>::infinity());
  long first = static_cast<long>(rng.next_below(static_cast<std::uint64_t>(n)));
  cb.centroids.row(0) = sample.row(first);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (long i = 0; i < n; ++i) {
      const double d =
          (sample.row(i) - cb.centroids.row(c - 1)).squaredNorm();
      min_d2[static_cast<std::size_t>(i)] =
          std::min(min_d2[static_cast<std::size_t>(i)], d);
      total += min_d2[static_cast<std::size_t>(i)];
    }
    long pick = 0;
    if (total > 0.0) {
      const double target = rng.next_unit() * total;
      double acc = 0.0;
      pick = n - 1;
      for (long i = 0; i < n; ++i) {
        acc += min_d2[static_cast<std::size_t>(i)];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<long>(rng.next_below(static_cast<std::uint64_t>(n)));
    }
    cb.centroids.row(c) = sample.row(pick);
  }

  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  std::vector<double> dist2(static_cast<std::size_t>(n), 0.0);
  for (int iter = 0; iter < max_iter; ++iter) {
    // Assignment step (parallel over points, each writing its own slot).
    std::atomic<bool> changed{false};
    parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
      double d2 = 0.0;
      const int a = nearest_centroid(cb.centroids, sample.row(static_cast<long>(i)).transpose(), &d2);
      dist2[i] = d2;
      if (a != assign[i]) {
        assign[i] = a;
        changed.store(true, std::memory_order_relaxed);
      }
    });
    if (!changed.load()) break;

    // Update step, serial for a fixed accumulation order.
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, sample.cols());
    std::vector<long> counts(static_cast<std::size_t>(k), 0);
    for (long i = 0; i < n; ++i) {
      sums.row(assign[static_cast<std::size_t>(i)]) += sample.row(i);
      ++counts[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        cb.centroids.row(c) =
            sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      } else {
        // Re-seed an empty cluster at the worst-fit point.
        long worst = 0;
        for (long i = 1; i < n; ++i) {
          if (dist2[static_cast<std::size_t>(i)] > dist2[static_cast<std::size_t>(worst)]) {
            worst = i;
          }
        }
        cb.centroids.row(c) = sample.row(worst);
        dist2[static_cast<std::size_t>(worst)] = 0.0;
      }
    }
  }
  return cb;
}

double kmeans_inertia(const Eigen::MatrixXd& sample, const Codebook& cb) {
  double total = 0.0;
  for (long i = 0; i < sample.rows(); ++i) {
    double d2 = 0.0;
    nearest_centroid(cb.centroids, sample.row(i).transpose(), &d2);
    total += d2;
  }
  return total;
}

Eigen::MatrixXd subsample_distinct(const Eigen::MatrixXd& pooled, long cap,
                                   std::uint64_t seed) {
  if (cap < 1) throw std::invalid_argument("subsample cap must be >= 1");
  // Distinct = byte-equal rows collapse to their first occurrence.
  std::unordered_set<std::string> seen;
  std::vector<long> distinct;
  const long dim = pooled.cols();
  std::vector<double> rowbuf(static_cast<std::size_t>(dim));
  for (long i = 0; i < pooled.rows(); ++i) {
    Eigen::VectorXd::Map(rowbuf.data(), dim) = pooled.row(i).transpose();
    std::string key(reinterpret_cast<const char*>(rowbuf.data()),
                    static_cast<std::size_t>(dim) * sizeof(double));
    if (seen.insert(std::move(key)).second) distinct.push_back(i);
  }
  Rng rng(seed);
  rng.shuffle(distinct);
  const long take = std::min<long>(cap, static_cast<long>(distinct.size()));
  distinct.resize(static_cast<std::size_t>(take));
  Eigen::MatrixXd out(take, dim);
  for (long i = 0; i < take; ++i) out.row(i) = pooled.row(distinct[static_cast<std::size_t>(i)]);
  return out;
}

PcaModel fit_pca(const Eigen::MatrixXd& sample, int out_dim) {
  if (out_dim < 1) throw std::invalid_argument("fit_pca: out_dim must be >= 1");
  if (sample.rows() < out_dim + 1) {
    throw std::invalid_argument("fit_pca: need at least out_dim+1 rows");
  }
  PcaModel model;
  model.mean = sample.colwise().mean();
  const Eigen::MatrixXd centered = sample.rowwise() - model.mean.transpose();
  const Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(sample.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("fit_pca: eigendecomposition failed");
  }
  const Eigen::VectorXd evals = solver.eigenvalues();  // ascending
  const long d = evals.size();
  const double tol = std::max(evals(d - 1), 0.0) * 1e-10 + 1e-15;
  long rank = 0;
  for (long i = 0; i < d; ++i) {
    if (evals(i) > tol) ++rank;
  }
  if (rank < out_dim) {
    throw std::runtime_error("fit_pca: sample rank " + std::to_string(rank) +
                             " is below requested dimension " +
                             std::to_string(out_dim));
  }
  model.basis.resize(out_dim, d);
  for (int i = 0; i < out_dim; ++i) {
    model.basis.row(i) = solver.eigenvectors().col(d - 1 - i).transpose();
  }
  return model;
}

Eigen::MatrixXd apply_pca(const PcaModel& model, const Eigen::MatrixXd& descs) {
  if (descs.cols() != model.mean.size()) {
    throw std::invalid_argument("apply_pca: dimension mismatch");
  }
  return (descs.rowwise() - model.mean.transpose()) * model.basis.transpose();
}

Codebook random_codebook(const Eigen::MatrixXd& sample, int k, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("random_codebook: k must be >= 1");
  // Collapse duplicates so the draw is over distinct rows.
  const Eigen::MatrixXd distinct =
      subsample_distinct(sample, sample.rows() > 0 ? sample.rows() : 1, derive_seed(seed, 0));
  if (distinct.rows() < k) {
    throw std::runtime_error("random_codebook: only " + std::to_string(distinct.rows()) +
                             " distinct rows for k=" + std::to_string(k));
  }
  std::vector<long> idx(static_cast<std::size_t>(distinct.rows()));
  for (long i = 0; i < distinct.rows(); ++i) idx[static_cast<std::size_t>(i)] = i;
  Rng rng(seed);
  rng.shuffle(idx);
  Codebook cb;
  cb.centroids.resize(k, distinct.cols());
  for (int i = 0; i < k; ++i) cb.centroids.row(i) = distinct.row(idx[static_cast<std::size_t>(i)]);
  return cb;
}

Eigen::VectorXd estimate_sigma(const Codebook& cb, const Eigen::MatrixXd& sample) {
  if (sample.rows() < 1) throw std::invalid_argument("estimate_sigma: empty sample");
  const int k = cb.k();
  std::vector<std::vector<double>> dists(static_cast<std::size_t>(k));
  double global_sum = 0.0;
  for (long i = 0; i < sample.rows(); ++i) {
    double d2 = 0.0;
    const int m = nearest_centroid(cb.centroids, sample.row(i).transpose(), &d2);
    const double d = std::sqrt(d2);
    dists[static_cast<std::size_t>(m)].push_back(d);
    global_sum += d;
  }
  const double global_mean = global_sum / static_cast<double>(sample.rows());
  Eigen::VectorXd sigma(k);
  for (int m = 0; m < k; ++m) {
    const auto& v = dists[static_cast<std::size_t>(m)];
    if (v.size() >= 2) {
      double mean = 0.0;
      for (double d : v) mean += d;
      mean /= static_cast<double>(v.size());
      double ss = 0.0;
      for (double d : v) ss += (d - mean) * (d - mean);
      sigma(m) = std::sqrt(ss / static_cast<double>(v.size()));
    } else {
      sigma(m) = global_mean;
    }
    sigma(m) = std::max(sigma(m), 1e-6);
  }
  return sigma;
}

Eigen::VectorXd classical_encode(const Eigen::MatrixXd& descs, const Codebook& cb) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(cb.k());
  for (long i = 0; i < descs.rows(); ++i) {
    out(nearest_centroid(cb.centroids, descs.row(i).transpose())) += 1.0;
  }
  return out;
}

Eigen::VectorXd bossanova_encode(const Eigen::MatrixXd& descs,
                                 const std::vector<std::pair<int, int>>& centers,
                                 const Codebook& cb, const BossaParams& params,
                                 const Rect& region) {
  if (cb.sigma.size() != cb.k()) {
    throw std::runtime_error("bossanova_encode: codebook sigma not estimated");
  }
  if (static_cast<long>(centers.size()) != descs.rows()) {
    throw std::invalid_argument("bossanova_encode: centers/descriptors mismatch");
  }
  const int k = cb.k();
  const int B = params.bins;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<long>(k) * (B + 1));

  std::vector<long> in_region;
  for (long i = 0; i < descs.rows(); ++i) {
    if (region.contains(centers[static_cast<std::size_t>(i)].first,
                        centers[static_cast<std::size_t>(i)].second)) {
      in_region.push_back(i);
    }
  }
  const double inv_n = 1.0 / static_cast<double>(std::max<std::size_t>(in_region.size(), 1));

  for (long i : in_region) {
    const Eigen::VectorXd x = descs.row(i).transpose();
    int nearest = 0;
    double nearest_d2 = std::numeric_limits<double>::infinity();
    for (int m = 0; m < k; ++m) {
      const double d2 = (cb.centroids.row(m).transpose() - x).squaredNorm();
      if (d2 < nearest_d2) {
        nearest_d2 = d2;
        nearest = m;
      }
      const double d = std::sqrt(d2);
      const double lo = params.lambda_min * cb.sigma(m);
      const double hi = params.lambda_max * cb.sigma(m);
      if (d < lo || d > hi) continue;
      const double width = (hi - lo) / B;
      int b = width > 0.0 ? static_cast<int>((d - lo) / width) : 0;
      if (b >= B) b = B - 1;  // right-closed last bin
      out(static_cast<long>(m) * (B + 1) + b) += inv_n;
    }
    out(static_cast<long>(nearest) * (B + 1) + B) += params.count_scale;
  }
  return out;
}

Eigen::VectorXd spatial_pyramid_encode(const Eigen::MatrixXd& descs,
                                       const std::vector<std::pair<int, int>>& centers,
                                       const Codebook& cb, const BossaParams& params,
                                       int width, int height) {
  const int mx = width / 2;
  const int my = height / 2;
  const std::vector<Rect> regions = {
      {0, 0, width, height},    // whole
      {0, 0, mx, my},           // TL
      {mx, 0, width, my},       // TR
      {0, my, mx, height},      // BL
      {mx, my, width, height},  // BR
  };
  const long region_len = static_cast<long>(cb.k()) * (params.bins + 1);
  Eigen::VectorXd out(region_len * static_cast<long>(regions.size()));
  for (std::size_t r = 0; r < regions.size(); ++r) {
    out.segment(static_cast<long>(r) * region_len, region_len) =
        bossanova_encode(descs, centers, cb, params, regions[r]);
  }
  const double norm = out.norm();
  if (norm > 0.0) out /= norm;
  return out;
}

Eigen::MatrixXd to_matrix(const LocalFeatureSet& set) {
  Eigen::MatrixXd out(static_cast<long>(set.size()), set.dim);
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (int j = 0; j < set.dim; ++j) {
      out(static_cast<long>(i), j) = set.row(i)[j];
    }
  }
  return out;
}

}  // namespace melscreen
