#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "melscreen/features.hpp"

namespace melscreen {

// Per-dimension z-normalization learned on training descriptors only.
struct ZNorm {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;  // floored at 1e-12
};

ZNorm fit_znorm(const Eigen::MatrixXd& train_descs);
Eigen::MatrixXd apply_znorm(const ZNorm& z, const Eigen::MatrixXd& descs);

struct Codebook {
  Eigen::MatrixXd centroids;  // k x D
  Eigen::VectorXd sigma;      // per-codeword distance scale (empty until estimated)

  int k() const { return static_cast<int>(centroids.rows()); }
};

// Lloyd's algorithm with k-means++ seeding. Stops when no assignment changes
// or after max_iter rounds. Empty clusters are re-seeded to the point farthest
// from its assigned centroid.
Codebook kmeans(const Eigen::MatrixXd& sample, int k, int max_iter,
                std::uint64_t seed, int threads = 1);

// Current within-cluster sum of squared distances for a codebook over a sample.
double kmeans_inertia(const Eigen::MatrixXd& sample, const Codebook& cb);

// Deduplicates byte-equal rows, then draws up to cap rows uniformly without
// replacement. Deterministic per seed.
Eigen::MatrixXd subsample_distinct(const Eigen::MatrixXd& pooled, long cap,
                                   std::uint64_t seed);

struct PcaModel {
  Eigen::VectorXd mean;
  Eigen::MatrixXd basis;  // out_dim x in_dim, rows orthonormal, eigenvalue-descending
};

// Covariance eigendecomposition, top out_dim components, no whitening.
// Throws (naming the achieved rank) when the sample rank is below out_dim.
PcaModel fit_pca(const Eigen::MatrixXd& sample, int out_dim = 64);
Eigen::MatrixXd apply_pca(const PcaModel& model, const Eigen::MatrixXd& descs);

// k distinct rows drawn uniformly without replacement.
Codebook random_codebook(const Eigen::MatrixXd& sample, int k, std::uint64_t seed);

// Per-codeword scale: population std of nearest-assigned distances, falling
// back to the global mean nearest distance for clusters with < 2 members.
// Floored at 1e-6.
Eigen::VectorXd estimate_sigma(const Codebook& cb, const Eigen::MatrixXd& sample);

struct BossaParams {
  int bins = 4;             // B
  double lambda_min = 0.6;
  double lambda_max = 1.6;
  double count_scale = 1e-3;  // s, weight of the raw-count term
};

// Hard assignment to the nearest centroid (ties -> lowest index), sum pooled
// as raw counts.
Eigen::VectorXd classical_encode(const Eigen::MatrixXd& descs, const Codebook& cb);

// Half-open pixel rectangle [x0, x1) x [y0, y1).
struct Rect {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  bool contains(int x, int y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
};

// Distance mini-histograms plus a scaled count term; length k * (B + 1).
Eigen::VectorXd bossanova_encode(const Eigen::MatrixXd& descs,
                                 const std::vector<std::pair<int, int>>& centers,
                                 const Codebook& cb, const BossaParams& params,
                                 const Rect& region);

// 1x1 + 2x2 pyramid (whole, TL, TR, BL, BR), concatenated then l2-normalized.
Eigen::VectorXd spatial_pyramid_encode(const Eigen::MatrixXd& descs,
                                       const std::vector<std::pair<int, int>>& centers,
                                       const Codebook& cb, const BossaParams& params,
                                       int width, int height);

// Converts a LocalFeatureSet descriptor block to a double matrix.
Eigen::MatrixXd to_matrix(const LocalFeatureSet& set);

}  // namespace melscreen
