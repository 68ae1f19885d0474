#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "melscreen/pipeline.hpp"

namespace melscreen {

// Subcommand implementations shared by the CLI binary and the test suites.
// All of them throw std::exception subclasses on invalid input; the CLI turns
// those into single-line errors with a nonzero exit.

struct GenArgs {
  std::filesystem::path out;
  int cases = 200;
  double pos_fraction = 0.27;
  std::uint64_t seed = 42;
  int image_size = 128;
};
Manifest cmd_gen(const GenArgs& args);

struct PrepareArgs {
  std::filesystem::path manifest;
  std::string subset = "lmh";  // lm | lm+ | lmh
  int folds = 10;
  std::uint64_t seed = 42;
  std::filesystem::path out;  // plan CSV
};
FoldPlan cmd_prepare(const PrepareArgs& args);

struct SegmentArgs {
  std::filesystem::path manifest;
  std::filesystem::path out;  // one <stem>_mask.png per image
  ChanVeseParams params;
  int threads = 1;
};
void cmd_segment(const SegmentArgs& args);

struct ExtractArgs {
  std::string pipeline;  // baseline | bossanova
  std::filesystem::path manifest;
  std::filesystem::path masks;  // optional; baseline segments on the fly if empty
  std::filesystem::path cache;
  PipelineConfig config;
  int threads = 1;
};
void cmd_extract(const ExtractArgs& args);

struct RunArgs {
  std::string pipeline;  // baseline | bossanova | external
  std::filesystem::path manifest;
  std::filesystem::path plan;
  std::filesystem::path cache;     // optional for external
  std::filesystem::path masks;     // optional (baseline)
  std::filesystem::path features;  // external only: MFV1 + sidecar
  std::filesystem::path out;       // results directory
  std::string subset_label = "all";
  PipelineConfig config;
  int threads = 1;
};
// Writes folds.csv, scores.csv, roc_mean.csv, roc_mean.svg, summary.json and
// config.json under args.out.
CvResult cmd_run(const RunArgs& args);

struct ReportArgs {
  std::vector<std::filesystem::path> results;  // run output directories
  std::filesystem::path out;                   // CSV table
};
// Mean-AUC table: rows = subset labels, columns = pipelines.
void cmd_report(const ReportArgs& args);

// Loads cached features for one manifest record, extracting and caching them
// when absent. Exposed for the run/extract commands and the test suites.
PerImageFeatures load_or_extract_features(
    const std::string& pipeline, const std::filesystem::path& manifest_path,
    const CaseRecord& record, const std::filesystem::path& masks_dir,
    const std::filesystem::path& cache_dir, const PipelineConfig& config);

// Single-polyline ROC plot with axis lines, no external assets.
void write_roc_svg(const std::filesystem::path& path, const RocCurve& curve);

}  // namespace melscreen
