#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "melscreen/dataset.hpp"

namespace melscreen {

// Externally computed per-image feature matrix (deep features or otherwise).
struct FeatureMatrixFile {
  std::vector<std::string> ids;  // image_path strings, unique
  Eigen::MatrixXd matrix;        // N x D
};

// MFV1 matrix with a JSON sidecar <file>.json holding {"ids": [...], "dim": D}.
FeatureMatrixFile read_feature_matrix(const std::filesystem::path& path);
void write_feature_matrix(const std::filesystem::path& path,
                          const FeatureMatrixFile& fmf);

// Row-wise l2 normalization; zero rows pass through.
void l2_normalize_rows(Eigen::MatrixXd& matrix);

struct JoinedFeatures {
  Eigen::MatrixXd X;              // rows in manifest record order
  std::vector<int> y;             // +1 / -1
  std::vector<std::string> case_ids;
  std::vector<std::string> image_paths;
};

// Reorders rows to the manifest order; every manifest image must be present.
JoinedFeatures join_with_manifest(const FeatureMatrixFile& fmf,
                                  const Manifest& manifest);

}  // namespace melscreen
