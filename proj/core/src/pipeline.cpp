#include "melscreen/pipeline.hpp"

#include <algorithm>
#include <utility>

#include "melscreen/parallel.hpp"
#include "melscreen/rng.hpp"

namespace melscreen {

void FitGuard::check(const std::vector<std::string>& image_ids,
                     const std::string& stage) const {
  for (const auto& id : image_ids) {
    if (!allowed_.contains(id)) {
      throw ContaminationError("train-test contamination: image '" + id +
                               "' reached fit stage '" + stage +
                               "' but is not in the training fold");
    }
  }
}

namespace {

std::vector<std::string> image_ids(const std::vector<const PerImageFeatures*>& set) {
  std::vector<std::string> ids;
  ids.reserve(set.size());
  for (const auto* im : set) ids.push_back(im->image_path);
  return ids;
}

std::vector<int> labels_of(const std::vector<const PerImageFeatures*>& set) {
  std::vector<int> y;
  y.reserve(set.size());
  for (const auto* im : set) y.push_back(im->label);
  return y;
}

// Stacks every descriptor of every image; images without features contribute
// no rows. dim is taken from the first non-empty image.
Eigen::MatrixXd pool_descriptors(const std::vector<const PerImageFeatures*>& set,
                                 int* dim_out) {
  int dim = 0;
  long total = 0;
  for (const auto* im : set) {
    if (im->features.size() == 0) continue;
    if (dim == 0) dim = im->features.dim;
    if (im->features.dim != dim) {
      throw std::runtime_error("inconsistent descriptor dimension across images");
    }
    total += static_cast<long>(im->features.size());
  }
  Eigen::MatrixXd pool(total, dim);
  long r = 0;
  for (const auto* im : set) {
    for (std::size_t i = 0; i < im->features.size(); ++i) {
      const float* row = im->features.row(i);
      for (int d = 0; d < dim; ++d) pool(r, d) = row[d];
      ++r;
    }
  }
  *dim_out = dim;
  return pool;
}

Eigen::MatrixXd rows_to_matrix(const std::vector<Eigen::VectorXd>& rows) {
  if (rows.empty()) return {};
  Eigen::MatrixXd m(static_cast<long>(rows.size()), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<long>(i)) = rows[i];
  return m;
}

std::vector<double> grid_train_score(const Eigen::MatrixXd& X_train,
                                     const std::vector<int>& y_train,
                                     const Eigen::MatrixXd& X_test,
                                     KernelSpec::Kind kind,
                                     const PipelineConfig::Svm& svm,
                                     std::uint64_t seed, int threads) {
  GridSpec grid = kind == KernelSpec::Kind::rbf ? GridSpec::paper_rbf()
                                                : GridSpec::paper_linear();
  grid.inner_folds = svm.inner_folds;
  const GridSearchResult best =
      grid_search_auc(X_train, y_train, grid, kind, seed, threads, svm.options);
  const KernelSpec kernel = kind == KernelSpec::Kind::rbf
                                ? KernelSpec::rbf(best.gamma)
                                : KernelSpec::linear();
  const SvmModel model = train_svc(X_train, y_train, best.C, kernel, svm.options);
  const Eigen::VectorXd values = decision_values(model, X_test);
  return {values.data(), values.data() + values.size()};
}

}  // namespace

std::vector<double> BaselinePipeline::fit_and_score(
    const std::vector<const PerImageFeatures*>& train,
    const std::vector<const PerImageFeatures*>& test, const FitGuard& guard,
    std::uint64_t fold_seed, int threads) const {
  const std::vector<std::string> train_ids = image_ids(train);

  guard.check(train_ids, "znorm");
  int dim = 0;
  const Eigen::MatrixXd pool = pool_descriptors(train, &dim);
  if (pool.rows() < 2) {
    throw std::runtime_error("baseline: fewer than 2 training descriptors");
  }
  const ZNorm znorm = fit_znorm(pool);

  guard.check(train_ids, "kmeans codebook");
  const Eigen::MatrixXd sample = subsample_distinct(
      apply_znorm(znorm, pool), config_.baseline.sample_cap, derive_seed(fold_seed, 1));
  Codebook cb = kmeans(sample, config_.baseline.codebook_k,
                       config_.baseline.kmeans_max_iter, derive_seed(fold_seed, 2),
                       threads);

  std::vector<const PerImageFeatures*> all(train);
  all.insert(all.end(), test.begin(), test.end());
  std::vector<Eigen::VectorXd> encoded(all.size());
  parallel_for(all.size(), threads, [&](std::size_t i) {
    const PerImageFeatures& im = *all[i];
    if (im.features.size() == 0) {
      encoded[i] = Eigen::VectorXd::Zero(cb.k());
      return;
    }
    int d = 0;
    const Eigen::MatrixXd descs = pool_descriptors({&im}, &d);
    encoded[i] = classical_encode(apply_znorm(znorm, descs), cb);
  });

  const Eigen::MatrixXd X = rows_to_matrix(encoded);
  guard.check(train_ids, "svm");
  return grid_train_score(X.topRows(static_cast<long>(train.size())), labels_of(train),
                          X.bottomRows(static_cast<long>(test.size())),
                          KernelSpec::Kind::rbf, config_.svm,
                          derive_seed(fold_seed, 3), threads);
}

std::vector<double> BossaNovaPipeline::fit_and_score(
    const std::vector<const PerImageFeatures*>& train,
    const std::vector<const PerImageFeatures*>& test, const FitGuard& guard,
    std::uint64_t fold_seed, int threads) const {
  const std::vector<std::string> train_ids = image_ids(train);

  guard.check(train_ids, "pca");
  int dim = 0;
  const Eigen::MatrixXd pool = pool_descriptors(train, &dim);
  const Eigen::MatrixXd sample = subsample_distinct(
      pool, config_.bossanova.sample_cap, derive_seed(fold_seed, 1));
  const PcaModel pca = fit_pca(sample, config_.bossanova.pca_dim);
  const Eigen::MatrixXd sample_p = apply_pca(pca, sample);

  guard.check(train_ids, "codebook");
  Codebook cb =
      random_codebook(sample_p, config_.bossanova.codebook_k, derive_seed(fold_seed, 2));
  cb.sigma = estimate_sigma(cb, sample_p);

  std::vector<const PerImageFeatures*> all(train);
  all.insert(all.end(), test.begin(), test.end());
  const long pyramid_len = 5L * cb.k() * (config_.bossanova.params.bins + 1);
  std::vector<Eigen::VectorXd> encoded(all.size());
  parallel_for(all.size(), threads, [&](std::size_t i) {
    const PerImageFeatures& im = *all[i];
    if (im.features.size() == 0) {
      encoded[i] = Eigen::VectorXd::Zero(pyramid_len);
      return;
    }
    int d = 0;
    const Eigen::MatrixXd descs = apply_pca(pca, pool_descriptors({&im}, &d));
    encoded[i] = spatial_pyramid_encode(descs, im.features.centers, cb,
                                        config_.bossanova.params, im.width, im.height);
  });

  const Eigen::MatrixXd X = rows_to_matrix(encoded);
  guard.check(train_ids, "svm");
  return grid_train_score(X.topRows(static_cast<long>(train.size())), labels_of(train),
                          X.bottomRows(static_cast<long>(test.size())),
                          KernelSpec::Kind::rbf, config_.svm,
                          derive_seed(fold_seed, 3), threads);
}

std::vector<double> ExternalPipeline::fit_and_score(
    const std::vector<const PerImageFeatures*>& train,
    const std::vector<const PerImageFeatures*>& test, const FitGuard& guard,
    std::uint64_t fold_seed, int threads) const {
  for (const auto& set : {train, test}) {
    for (const auto* im : set) {
      if (im->features.size() != 1) {
        throw std::runtime_error(
            "external: expected exactly one vector per image, got " +
            std::to_string(im->features.size()) + " for " + im->image_path);
      }
    }
  }
  int dim = 0;
  const Eigen::MatrixXd X_train = pool_descriptors(train, &dim);
  int test_dim = 0;
  const Eigen::MatrixXd X_test = pool_descriptors(test, &test_dim);
  guard.check(image_ids(train), "svm");
  return grid_train_score(X_train, labels_of(train), X_test, KernelSpec::Kind::linear,
                          config_.svm, derive_seed(fold_seed, 3), threads);
}

std::unique_ptr<ScoringPipeline> make_pipeline(const std::string& name,
                                               const PipelineConfig& config) {
  if (name == "baseline") return std::make_unique<BaselinePipeline>(config);
  if (name == "bossanova") return std::make_unique<BossaNovaPipeline>(config);
  if (name == "external") return std::make_unique<ExternalPipeline>(config);
  throw std::invalid_argument("unknown pipeline '" + name + "'");
}

CvResult cross_validate(const ScoringPipeline& pipeline,
                        const std::vector<PerImageFeatures>& images,
                        const FoldPlan& plan, std::uint64_t seed, int threads) {
  if (plan.n_folds < 2) throw std::invalid_argument("cross_validate: need >= 2 folds");
  for (const auto& im : images) {
    if (!plan.assignment.contains(im.case_id)) {
      throw std::runtime_error("cross_validate: case '" + im.case_id +
                               "' missing from the fold plan");
    }
  }

  CvResult out;
  std::vector<RocCurve> curves;
  for (int f = 0; f < plan.n_folds; ++f) {
    std::vector<const PerImageFeatures*> train, test;
    for (const auto& im : images) {
      (plan.assignment.at(im.case_id) == f ? test : train).push_back(&im);
    }
    if (test.empty()) continue;

    // Case-level separation, re-asserted end to end.
    std::set<std::string> train_cases;
    for (const auto* im : train) train_cases.insert(im->case_id);
    for (const auto* im : test) {
      if (train_cases.contains(im->case_id)) {
        throw std::logic_error("cross_validate: case '" + im->case_id +
                               "' present in both train and test of fold " +
                               std::to_string(f));
      }
    }

    std::set<std::string> train_ids;
    for (const auto* im : train) train_ids.insert(im->image_path);
    const FitGuard guard(std::move(train_ids));

    FoldResult fr;
    fr.fold = f;
    try {
      const std::vector<double> scores =
          pipeline.fit_and_score(train, test, guard, derive_seed(seed, 1000 + f),
                                 threads);
      std::vector<double> s;
      std::vector<int> y;
      for (std::size_t i = 0; i < test.size(); ++i) {
        fr.scores.push_back({test[i]->image_path, test[i]->label, scores[i],
                             test[i]->difficulty});
        s.push_back(scores[i]);
        y.push_back(test[i]->label);
      }
      fr.auc = auc(s, y);
      fr.roc = roc_curve(s, y);
    } catch (const ContaminationError&) {
      throw;
    } catch (const std::exception& e) {
      throw std::runtime_error("fold " + std::to_string(f) + ": " + e.what());
    }
    curves.push_back(fr.roc);
    out.summary.fold_aucs.push_back(fr.auc);
    out.folds.push_back(std::move(fr));
  }
  if (out.folds.empty()) {
    throw std::runtime_error("cross_validate: no fold contained test images");
  }
  double total = 0.0;
  for (double a : out.summary.fold_aucs) total += a;
  out.summary.mean_auc = total / static_cast<double>(out.summary.fold_aucs.size());
  out.summary.mean_roc = average_roc(curves);
  return out;
}

}  // namespace melscreen
