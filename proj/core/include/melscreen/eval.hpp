#pragma once

#include <string>
#include <utility>
#include <vector>

#include "melscreen/dataset.hpp"

namespace melscreen {

// ROC polyline from (0,0) to (1,1); fpr and tpr non-decreasing.
struct RocCurve {
  std::vector<std::pair<double, double>> points;  // (fpr, tpr)

  double area() const;  // trapezoidal
};

// Mann-Whitney statistic over positive-negative pairs (ties count half).
// labels are +1 / -1; both classes must be present.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

// Threshold sweep at each distinct score descending; ties yield diagonal
// segments; endpoints are exact.
RocCurve roc_curve(const std::vector<double>& scores, const std::vector<int>& labels);

// Vertical averaging: tpr linearly interpolated at a uniform fpr grid.
RocCurve average_roc(const std::vector<RocCurve>& curves, int grid_size = 101);

struct ImageScore {
  std::string image_path;
  int label = 0;  // +1 / -1
  double score = 0.0;
  Difficulty difficulty = Difficulty::low;
};

struct FoldResult {
  int fold = 0;
  double auc = 0.0;
  RocCurve roc;
  std::vector<ImageScore> scores;
};

struct CvSummary {
  double mean_auc = 0.0;
  std::vector<double> fold_aucs;
  RocCurve mean_roc;
};

// Per-difficulty mean AUC across folds, computed on within-stratum pairs
// only; folds where a stratum lacks a class are skipped. has_value false
// marks strata never scored.
struct StratifiedAuc {
  struct Entry {
    bool has_value = false;
    double mean_auc = 0.0;
    int folds_scored = 0;
  };
  Entry low, medium, high;
};

StratifiedAuc stratify(const std::vector<FoldResult>& results);

}  // namespace melscreen
