#include "melscreen/external_features.hpp"

#include <fstream>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "melscreen/matrixio.hpp"

namespace melscreen {

FeatureMatrixFile read_feature_matrix(const std::filesystem::path& path) {
  const MatrixF m = read_matrix_file(path);
  const std::filesystem::path sidecar = path.string() + ".json";
  std::ifstream is(sidecar);
  if (!is) throw std::runtime_error("missing feature sidecar: " + sidecar.string());
  nlohmann::json j;
  try {
    is >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("bad feature sidecar " + sidecar.string() + ": " + e.what());
  }
  FeatureMatrixFile fmf;
  fmf.ids = j.at("ids").get<std::vector<std::string>>();
  if (fmf.ids.size() != m.rows) {
    throw std::runtime_error("feature id count (" + std::to_string(fmf.ids.size()) +
                             ") does not match matrix rows (" + std::to_string(m.rows) +
                             ") in " + path.string());
  }
  std::set<std::string> unique(fmf.ids.begin(), fmf.ids.end());
  if (unique.size() != fmf.ids.size()) {
    throw std::runtime_error("duplicate ids in feature sidecar " + sidecar.string());
  }
  fmf.matrix.resize(m.rows, m.cols);
  for (std::uint32_t r = 0; r < m.rows; ++r) {
    for (std::uint32_t c = 0; c < m.cols; ++c) {
      fmf.matrix(r, c) = m.row(r)[c];
    }
  }
  return fmf;
}

void write_feature_matrix(const std::filesystem::path& path,
                          const FeatureMatrixFile& fmf) {
  MatrixF m(static_cast<std::uint32_t>(fmf.matrix.rows()),
            static_cast<std::uint32_t>(fmf.matrix.cols()));
  for (long r = 0; r < fmf.matrix.rows(); ++r) {
    for (long c = 0; c < fmf.matrix.cols(); ++c) {
      m.row(static_cast<std::uint32_t>(r))[c] = static_cast<float>(fmf.matrix(r, c));
    }
  }
  write_matrix(path, m);
  nlohmann::json j;
  j["ids"] = fmf.ids;
  j["dim"] = fmf.matrix.cols();
  std::ofstream os(path.string() + ".json");
  if (!os) throw std::runtime_error("cannot write sidecar for " + path.string());
  os << j.dump(2) << '\n';
}

void l2_normalize_rows(Eigen::MatrixXd& matrix) {
  for (long r = 0; r < matrix.rows(); ++r) {
    const double norm = matrix.row(r).norm();
    if (norm > 0.0) matrix.row(r) /= norm;
  }
}

JoinedFeatures join_with_manifest(const FeatureMatrixFile& fmf,
                                  const Manifest& manifest) {
  std::unordered_map<std::string, long> row_of;
  for (std::size_t i = 0; i < fmf.ids.size(); ++i) {
    row_of[fmf.ids[i]] = static_cast<long>(i);
  }
  std::vector<std::string> missing;
  for (const auto& r : manifest.records) {
    if (!row_of.contains(r.image_path)) missing.push_back(r.image_path);
  }
  if (!missing.empty()) {
    std::string msg = "feature matrix is missing images:";
    for (const auto& m : missing) msg += " " + m;
    throw std::runtime_error(msg);
  }
  JoinedFeatures out;
  out.X.resize(static_cast<long>(manifest.records.size()), fmf.matrix.cols());
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    const auto& rec = manifest.records[i];
    out.X.row(static_cast<long>(i)) = fmf.matrix.row(row_of[rec.image_path]);
    out.y.push_back(derive_label(rec) == Label::positive ? 1 : -1);
    out.case_ids.push_back(rec.case_id);
    out.image_paths.push_back(rec.image_path);
  }
  return out;
}

}  // namespace melscreen
