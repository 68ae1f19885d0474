#include <doctest.h>

#include <stdexcept>

#include <vector>

#include "melscreen/pipeline.hpp"
#include "melscreen/rng.hpp"

using namespace melscreen;

namespace {

// Scores every test image by its own label: a perfect-oracle pipeline used to
// exercise the harness.
class RiggedPipeline : public ScoringPipeline {
 public:
  std::string name() const override { return "rigged"; }
  std::vector<double> fit_and_score(const std::vector<const PerImageFeatures*>& train,
                                    const std::vector<const PerImageFeatures*>& test,
                                    const FitGuard& guard, std::uint64_t, int)
      const override {
    std::vector<std::string> train_ids;
    for (const auto* im : train) train_ids.push_back(im->image_path);
    guard.check(train_ids, "rigged fit");
    std::vector<double> scores;
    for (const auto* im : test) scores.push_back(im->label);
    return scores;
  }
};

// Deliberately passes a held-out image id into a fit call.
class LeakyPipeline : public ScoringPipeline {
 public:
  std::string name() const override { return "leaky"; }
  std::vector<double> fit_and_score(const std::vector<const PerImageFeatures*>&,
                                    const std::vector<const PerImageFeatures*>& test,
                                    const FitGuard& guard, std::uint64_t, int)
      const override {
    guard.check({test.front()->image_path}, "leaky fit");
    return std::vector<double>(test.size(), 0.0);
  }
};

std::vector<PerImageFeatures> toy_images(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<PerImageFeatures> images;
  for (int i = 0; i < n; ++i) {
    PerImageFeatures im;
    im.case_id = "case" + std::to_string(i);
    im.image_path = im.case_id + ".png";
    im.label = i % 2 == 0 ? 1 : -1;
    im.difficulty = static_cast<Difficulty>(i % 3);
    im.width = 32;
    im.height = 32;
    im.features.dim = 2;
    // Separable 2-D features: positives near (1, 1), negatives near (-1, -1).
    const float base = im.label == 1 ? 1.f : -1.f;
    for (int j = 0; j < 5; ++j) {
      const float desc[2] = {base + static_cast<float>(rng.next_normal(0, 0.2)),
                             base + static_cast<float>(rng.next_normal(0, 0.2))};
      im.features.append(desc, static_cast<int>(rng.next_below(32)),
                         static_cast<int>(rng.next_below(32)));
    }
    images.push_back(std::move(im));
  }
  return images;
}

FoldPlan plan_for(const std::vector<PerImageFeatures>& images, int n_folds) {
  FoldPlan plan;
  plan.n_folds = n_folds;
  for (std::size_t i = 0; i < images.size(); ++i) {
    plan.assignment[images[i].case_id] = static_cast<int>(i) % n_folds;
  }
  return plan;
}

}  // namespace

TEST_CASE("FitGuard permits training ids and rejects others") {
  const FitGuard guard({"a.png", "b.png"});
  CHECK_NOTHROW(guard.check({"a.png", "b.png"}, "stage"));
  CHECK_THROWS_WITH_AS(guard.check({"a.png", "c.png"}, "znorm"),
                       doctest::Contains("c.png"), ContaminationError);
}

TEST_CASE("cross_validate with a rigged pipeline gives AUC 1 in every fold") {
  const auto images = toy_images(12, 3);
  const FoldPlan plan = plan_for(images, 3);
  const RiggedPipeline rigged;
  const CvResult cv = cross_validate(rigged, images, plan, 5, 1);
  REQUIRE(cv.folds.size() == 3);
  double total = 0.0;
  for (const auto& fr : cv.folds) {
    CHECK(fr.auc == doctest::Approx(1.0));
    total += fr.auc;
  }
  CHECK(cv.summary.mean_auc == doctest::Approx(total / 3.0));
  CHECK(cv.summary.fold_aucs.size() == 3);
  CHECK(cv.summary.mean_roc.points.size() == 101);
}

TEST_CASE("contamination guard aborts a violating run") {
  const auto images = toy_images(8, 4);
  const FoldPlan plan = plan_for(images, 2);
  const LeakyPipeline leaky;
  CHECK_THROWS_AS(cross_validate(leaky, images, plan, 1, 1), ContaminationError);
}

TEST_CASE("cross_validate validates the plan") {
  const auto images = toy_images(6, 5);
  FoldPlan plan = plan_for(images, 2);
  plan.assignment.erase("case3");
  const RiggedPipeline rigged;
  CHECK_THROWS_WITH_AS(cross_validate(rigged, images, plan, 1, 1),
                       doctest::Contains("case3"), std::runtime_error);
}

TEST_CASE("baseline pipeline separates a separable toy problem") {
  const auto images = toy_images(24, 6);
  const FoldPlan plan = plan_for(images, 3);
  PipelineConfig config;
  config.baseline.codebook_k = 4;
  config.baseline.kmeans_max_iter = 30;
  config.svm.inner_folds = 3;
  const BaselinePipeline pipeline(config);
  const CvResult cv = cross_validate(pipeline, images, plan, 7, 2);
  CHECK(cv.summary.mean_auc >= 0.9);
}

TEST_CASE("bossanova pipeline separates a separable toy problem") {
  const auto images = toy_images(24, 8);
  const FoldPlan plan = plan_for(images, 3);
  PipelineConfig config;
  config.bossanova.pca_dim = 2;
  config.bossanova.codebook_k = 4;
  config.svm.inner_folds = 3;
  const BossaNovaPipeline pipeline(config);
  const CvResult cv = cross_validate(pipeline, images, plan, 7, 2);
  CHECK(cv.summary.mean_auc >= 0.9);
}

TEST_CASE("external pipeline uses one vector per image") {
  auto images = toy_images(16, 9);
  for (auto& im : images) {
    // Replace the descriptor set with a single separable vector.
    LocalFeatureSet single;
    single.dim = 3;
    const float v[3] = {im.label * 0.5f, static_cast<float>(im.label), 0.25f};
    single.append(v, 0, 0);
    im.features = single;
  }
  // Assign consecutive +/- pairs to the same fold so every test fold holds
  // both classes.
  FoldPlan plan;
  plan.n_folds = 4;
  for (std::size_t i = 0; i < images.size(); ++i) {
    plan.assignment[images[i].case_id] = static_cast<int>(i / 2) % 4;
  }
  PipelineConfig config;
  config.svm.inner_folds = 3;
  const ExternalPipeline pipeline(config);
  const CvResult cv = cross_validate(pipeline, images, plan, 3, 1);
  CHECK(cv.summary.mean_auc >= 0.99);

  // Multiple vectors per image are rejected.
  auto bad = images;
  const float extra[3] = {0.f, 0.f, 0.f};
  bad[0].features.append(extra, 1, 1);
  CHECK_THROWS_AS(cross_validate(pipeline, bad, plan, 3, 1), std::runtime_error);
}

TEST_CASE("cross_validate is deterministic across thread counts") {
  const auto images = toy_images(18, 10);
  const FoldPlan plan = plan_for(images, 3);
  PipelineConfig config;
  config.baseline.codebook_k = 3;
  config.svm.inner_folds = 3;
  const BaselinePipeline pipeline(config);
  const CvResult a = cross_validate(pipeline, images, plan, 11, 1);
  const CvResult b = cross_validate(pipeline, images, plan, 11, 4);
  REQUIRE(a.folds.size() == b.folds.size());
  for (std::size_t f = 0; f < a.folds.size(); ++f) {
    REQUIRE(a.folds[f].scores.size() == b.folds[f].scores.size());
    for (std::size_t i = 0; i < a.folds[f].scores.size(); ++i) {
      CHECK(a.folds[f].scores[i].score == b.folds[f].scores[i].score);
    }
  }
  CHECK(a.summary.mean_auc == b.summary.mean_auc);
}

TEST_CASE("make_pipeline knows the three pipelines") {
  PipelineConfig config;
  CHECK(make_pipeline("baseline", config)->name() == "baseline");
  CHECK(make_pipeline("bossanova", config)->name() == "bossanova");
  CHECK(make_pipeline("external", config)->name() == "external");
  CHECK_THROWS_AS(make_pipeline("vgg", config), std::invalid_argument);
}
