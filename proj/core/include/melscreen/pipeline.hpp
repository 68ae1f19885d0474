#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "melscreen/dataset.hpp"
#include "melscreen/dsift.hpp"
#include "melscreen/eval.hpp"
#include "melscreen/features.hpp"
#include "melscreen/haar.hpp"
#include "melscreen/midlevel.hpp"
#include "melscreen/segmentation.hpp"
#include "melscreen/svm.hpp"

namespace melscreen {

// Thrown when a fitting stage receives data from a held-out image.
class ContaminationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Carried into every fit call of a fold; fitting on an image outside the
// training set aborts the run.
class FitGuard {
 public:
  explicit FitGuard(std::set<std::string> train_image_ids)
      : allowed_(std::move(train_image_ids)) {}

  // stage names the learned transform being fit, for the error message.
  void check(const std::vector<std::string>& image_ids, const std::string& stage) const;

 private:
  std::set<std::string> allowed_;
};

// One image's extracted local features plus its labels and bookkeeping. The
// external pipeline stores its whole per-image vector as a single descriptor.
struct PerImageFeatures {
  std::string image_path;
  std::string case_id;
  int label = 0;  // +1 / -1
  Difficulty difficulty = Difficulty::low;
  LocalFeatureSet features;
  int width = 0;   // coordinate frame of the feature centers
  int height = 0;
};

// Every default a run depends on, serializable to JSON (config.hpp) and
// hashed into run outputs.
struct PipelineConfig {
  std::uint64_t seed = 42;
  ChanVeseParams segmentation;

  struct Baseline {
    PatchGridSpec grid;        // step 10, side 24, 3 levels
    int codebook_k = 200;
    int kmeans_max_iter = 1000;
    long sample_cap = 1000000;
  } baseline;

  struct Bossa {
    DenseSiftSpec dsift;
    int pca_dim = 64;
    long sample_cap = 500000;
    int codebook_k = 2048;
    BossaParams params;
  } bossanova;

  struct Svm {
    SvmTrainOptions options;
    int inner_folds = 5;
  } svm;
};

// Fits all learned stages on the training images (under the guard) and
// returns decision values aligned with `test`.
class ScoringPipeline {
 public:
  virtual ~ScoringPipeline() = default;
  virtual std::string name() const = 0;
  virtual std::vector<double> fit_and_score(
      const std::vector<const PerImageFeatures*>& train,
      const std::vector<const PerImageFeatures*>& test, const FitGuard& guard,
      std::uint64_t fold_seed, int threads) const = 0;
};

// Haar descriptors -> z-norm -> k-means codebook -> hard-assign sum pooling
// -> RBF grid search -> SVM.
class BaselinePipeline : public ScoringPipeline {
 public:
  explicit BaselinePipeline(const PipelineConfig& config) : config_(config) {}
  std::string name() const override { return "baseline"; }
  std::vector<double> fit_and_score(const std::vector<const PerImageFeatures*>& train,
                                    const std::vector<const PerImageFeatures*>& test,
                                    const FitGuard& guard, std::uint64_t fold_seed,
                                    int threads) const override;

 private:
  PipelineConfig config_;
};

// Dense RootSIFT -> PCA -> random codebook + sigma -> distance histograms on
// a 1x1+2x2 pyramid -> RBF grid search -> SVM.
class BossaNovaPipeline : public ScoringPipeline {
 public:
  explicit BossaNovaPipeline(const PipelineConfig& config) : config_(config) {}
  std::string name() const override { return "bossanova"; }
  std::vector<double> fit_and_score(const std::vector<const PerImageFeatures*>& train,
                                    const std::vector<const PerImageFeatures*>& test,
                                    const FitGuard& guard, std::uint64_t fold_seed,
                                    int threads) const override;

 private:
  PipelineConfig config_;
};

// One pre-computed vector per image -> linear grid search -> SVM.
class ExternalPipeline : public ScoringPipeline {
 public:
  explicit ExternalPipeline(const PipelineConfig& config) : config_(config) {}
  std::string name() const override { return "external"; }
  std::vector<double> fit_and_score(const std::vector<const PerImageFeatures*>& train,
                                    const std::vector<const PerImageFeatures*>& test,
                                    const FitGuard& guard, std::uint64_t fold_seed,
                                    int threads) const override;

 private:
  PipelineConfig config_;
};

std::unique_ptr<ScoringPipeline> make_pipeline(const std::string& name,
                                               const PipelineConfig& config);

struct CvResult {
  std::vector<FoldResult> folds;
  CvSummary summary;
};

// Per fold: fit every learned stage on training cases only, score the test
// fold, assert case-level separation end to end. Fold errors carry the fold
// index. Deterministic for fixed seeds regardless of `threads`.
CvResult cross_validate(const ScoringPipeline& pipeline,
                        const std::vector<PerImageFeatures>& images,
                        const FoldPlan& plan, std::uint64_t seed, int threads);

}  // namespace melscreen
