#include "melscreen/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace melscreen {

double RocCurve::area() const {
  double a = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double dx = points[i].first - points[i - 1].first;
    a += dx * (points[i].second + points[i - 1].second) * 0.5;
  }
  return a;
}

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("auc: scores/labels size mismatch");
  }
  std::size_t n_pos = 0, n_neg = 0;
  for (int l : labels) {
    if (l == 1) {
      ++n_pos;
    } else if (l == -1) {
      ++n_neg;
    } else {
      throw std::invalid_argument("auc: labels must be -1 or +1");
    }
  }
  if (n_pos == 0 || n_neg == 0) {
    throw std::invalid_argument("auc: both classes must be present");
  }
  // Rank-sum form of the pair-counting statistic; ties get midranks.
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double midrank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) {
      if (labels[order[t]] == 1) pos_rank_sum += midrank;
    }
    i = j + 1;
  }
  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n_neg);
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

RocCurve roc_curve(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("roc_curve: scores/labels size mismatch");
  }
  std::size_t n_pos = 0, n_neg = 0;
  for (int l : labels) (l == 1 ? n_pos : n_neg)++;
  if (n_pos == 0 || n_neg == 0) {
    throw std::invalid_argument("roc_curve: both classes must be present");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.emplace_back(0.0, 0.0);
  std::size_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    for (std::size_t t = i; t <= j; ++t) {
      if (labels[order[t]] == 1) {
        ++tp;
      } else {
        ++fp;
      }
    }
    curve.points.emplace_back(static_cast<double>(fp) / static_cast<double>(n_neg),
                              static_cast<double>(tp) / static_cast<double>(n_pos));
    i = j + 1;
  }
  if (curve.points.back() != std::make_pair(1.0, 1.0)) {
    curve.points.emplace_back(1.0, 1.0);
  }
  for (std::size_t t = 1; t < curve.points.size(); ++t) {
    if (curve.points[t].first < curve.points[t - 1].first ||
        curve.points[t].second < curve.points[t - 1].second) {
      throw std::logic_error("roc_curve: non-monotone curve");
    }
  }
  return curve;
}

namespace {

// tpr as a function of fpr. At a vertex fpr the vertical run collapses to its
// top point; strictly between two distinct fpr values the original polyline
// segment applies, i.e. interpolation runs from the top of the left run to the
// bottom of the right run (so staircase plateaus stay flat).
double tpr_at(const RocCurve& curve, double fpr) {
  struct Run {
    double x, top, bottom;
  };
  std::vector<Run> runs;
  for (const auto& p : curve.points) {
    if (!runs.empty() && runs.back().x == p.first) {
      runs.back().top = std::max(runs.back().top, p.second);
      runs.back().bottom = std::min(runs.back().bottom, p.second);
    } else {
      runs.push_back({p.first, p.second, p.second});
    }
  }
  if (runs.empty()) return 0.0;
  if (fpr <= runs.front().x) return runs.front().top;
  for (std::size_t i = 1; i < runs.size(); ++i) {
    if (fpr < runs[i].x) {
      const double span = runs[i].x - runs[i - 1].x;
      const double t = (fpr - runs[i - 1].x) / span;
      return runs[i - 1].top + t * (runs[i].bottom - runs[i - 1].top);
    }
    if (fpr == runs[i].x) return runs[i].top;
  }
  return runs.back().top;
}

}  // namespace

RocCurve average_roc(const std::vector<RocCurve>& curves, int grid_size) {
  if (curves.empty()) throw std::invalid_argument("average_roc: no curves");
  if (grid_size < 2) throw std::invalid_argument("average_roc: grid_size must be >= 2");
  RocCurve out;
  out.points.reserve(static_cast<std::size_t>(grid_size));
  for (int g = 0; g < grid_size; ++g) {
    const double fpr = static_cast<double>(g) / (grid_size - 1);
    double sum = 0.0;
    for (const auto& c : curves) sum += tpr_at(c, fpr);
    out.points.emplace_back(fpr, sum / static_cast<double>(curves.size()));
  }
  out.points.front() = {0.0, out.points.front().second};
  out.points.back() = {1.0, out.points.back().second};
  return out;
}

StratifiedAuc stratify(const std::vector<FoldResult>& results) {
  StratifiedAuc table;
  for (Difficulty d : {Difficulty::low, Difficulty::medium, Difficulty::high}) {
    StratifiedAuc::Entry* entry = d == Difficulty::low      ? &table.low
                                  : d == Difficulty::medium ? &table.medium
                                                            : &table.high;
    double total = 0.0;
    int scored = 0;
    for (const auto& fold : results) {
      std::vector<double> s;
      std::vector<int> l;
      for (const auto& sc : fold.scores) {
        if (sc.difficulty == d) {
          s.push_back(sc.score);
          l.push_back(sc.label);
        }
      }
      const bool has_pos = std::find(l.begin(), l.end(), 1) != l.end();
      const bool has_neg = std::find(l.begin(), l.end(), -1) != l.end();
      if (!has_pos || !has_neg) continue;  // AUC undefined in this stratum
      total += auc(s, l);
      ++scored;
    }
    if (scored > 0) {
      entry->has_value = true;
      entry->mean_auc = total / scored;
      entry->folds_scored = scored;
    }
  }
  return table;
}

}  // namespace melscreen
