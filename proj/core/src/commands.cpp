#include "melscreen/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "melscreen/config.hpp"
#include "melscreen/external_features.hpp"
#include "melscreen/image_io.hpp"
#include "melscreen/matrixio.hpp"
#include "melscreen/parallel.hpp"
#include "melscreen/synthcorpus.hpp"

namespace melscreen {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string mask_name_for(const std::string& image_path) {
  return std::filesystem::path(image_path).stem().string() + "_mask.png";
}

// The per-pipeline settings that change what an extractor produces; part of
// the cache key so stale entries can never be read back.
json extractor_config_json(const std::string& pipeline, const PipelineConfig& c) {
  json j;
  j["pipeline"] = pipeline;
  if (pipeline == "baseline") {
    j["patch_step"] = c.baseline.grid.step;
    j["patch_side"] = c.baseline.grid.side;
    j["levels"] = c.baseline.grid.levels;
  } else if (pipeline == "bossanova") {
    j["step"] = c.bossanova.dsift.step;
    j["patch_sizes"] = c.bossanova.dsift.patch_sizes;
    j["sparsify_threshold"] = c.bossanova.dsift.sparsify_threshold;
    j["max_pixels"] = c.bossanova.dsift.max_pixels;
  } else {
    throw std::invalid_argument("no extractor for pipeline '" + pipeline + "'");
  }
  return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

Manifest cmd_gen(const GenArgs& args) {
  if (args.out.empty()) throw std::invalid_argument("gen: --out is required");
  return gen_corpus(args.cases, args.pos_fraction, args.seed, args.out,
                    args.image_size);
}

FoldPlan cmd_prepare(const PrepareArgs& args) {
  if (args.out.empty()) throw std::invalid_argument("prepare: --out is required");
  const Manifest manifest = load_manifest(args.manifest);
  const Manifest subset = select_subset(manifest, SubsetSpec::from_name(args.subset));
  if (subset.records.empty()) {
    throw std::runtime_error("prepare: subset '" + args.subset + "' selects no cases");
  }
  const FoldPlan plan = split_folds(subset, args.folds, args.seed);
  save_fold_plan(args.out, plan);
  return plan;
}

void cmd_segment(const SegmentArgs& args) {
  const Manifest manifest = load_manifest(args.manifest);
  std::filesystem::create_directories(args.out);
  parallel_for(manifest.records.size(), args.threads, [&](std::size_t i) {
    const CaseRecord& rec = manifest.records[i];
    const GrayImage img =
        load_gray(resolve_image_path(args.manifest, rec.image_path));
    const BinaryMask mask = segment_lesion(img, args.params);
    save_mask_png(args.out / mask_name_for(rec.image_path), mask);
  });
}

PerImageFeatures load_or_extract_features(const std::string& pipeline,
                                          const std::filesystem::path& manifest_path,
                                          const CaseRecord& record,
                                          const std::filesystem::path& masks_dir,
                                          const std::filesystem::path& cache_dir,
                                          const PipelineConfig& config) {
  const std::filesystem::path image_file =
      resolve_image_path(manifest_path, record.image_path);
  const std::vector<char> image_bytes = read_file_bytes(image_file);
  std::uint64_t key = fnv1a64(image_bytes.data(), image_bytes.size());

  BinaryMask mask;
  if (pipeline == "baseline") {
    const std::filesystem::path mask_file =
        masks_dir.empty() ? std::filesystem::path()
                          : masks_dir / mask_name_for(record.image_path);
    if (!mask_file.empty() && std::filesystem::exists(mask_file)) {
      mask = load_mask_png(mask_file);
    } else {
      mask = segment_lesion(load_gray(image_file), config.segmentation);
    }
    key = fnv1a64(mask.data.data(), mask.data.size(), key);
  }
  const std::string extractor_cfg =
      extractor_config_json(pipeline, config).dump();
  key = fnv1a64(extractor_cfg.data(), extractor_cfg.size(), key);

  PerImageFeatures out;
  out.image_path = record.image_path;
  out.case_id = record.case_id;
  out.label = derive_label(record) == Label::positive ? 1 : -1;
  out.difficulty = record.difficulty;

  const std::filesystem::path cache_file =
      cache_dir.empty() ? std::filesystem::path()
                        : cache_dir / (pipeline + "_" + hex64(key) + ".bin");
  if (!cache_file.empty() && std::filesystem::exists(cache_file)) {
    const MatrixF m = read_matrix_file(cache_file);
    std::ifstream is(cache_file.string() + ".json");
    if (!is) {
      throw std::runtime_error("missing cache sidecar for " + cache_file.string());
    }
    json j;
    is >> j;
    out.width = j.at("width").get<int>();
    out.height = j.at("height").get<int>();
    out.features.dim = static_cast<int>(m.cols);
    out.features.descriptors = m.data;
    for (const auto& c : j.at("centers")) {
      out.features.centers.emplace_back(c.at(0).get<int>(), c.at(1).get<int>());
    }
    if (out.features.centers.size() != m.rows) {
      throw std::runtime_error("cache sidecar center count mismatch for " +
                               cache_file.string());
    }
    return out;
  }

  if (pipeline == "baseline") {
    const GrayImage img = load_gray(image_file);
    out.features = extract_haar_features(img, mask, config.baseline.grid);
    out.width = img.width;
    out.height = img.height;
  } else {
    const GrayImage img = load_gray(image_file);
    DenseRootSiftResult res = extract_dense_rootsift(img, config.bossanova.dsift);
    out.features = std::move(res.features);
    out.width = res.width;
    out.height = res.height;
  }

  if (!cache_file.empty()) {
    std::filesystem::create_directories(cache_dir);
    MatrixF m(static_cast<std::uint32_t>(out.features.size()),
              static_cast<std::uint32_t>(out.features.dim));
    m.data = out.features.descriptors;
    write_matrix(cache_file, m);
    json j;
    j["image_path"] = record.image_path;
    j["pipeline"] = pipeline;
    j["dim"] = out.features.dim;
    j["width"] = out.width;
    j["height"] = out.height;
    j["config_hash"] = config_hash(config);
    json centers = json::array();
    for (const auto& [x, y] : out.features.centers) centers.push_back({x, y});
    j["centers"] = std::move(centers);
    write_text_file(cache_file.string() + ".json", j.dump() + "\n");
  }
  return out;
}

void cmd_extract(const ExtractArgs& args) {
  if (args.pipeline != "baseline" && args.pipeline != "bossanova") {
    throw std::invalid_argument("extract: pipeline must be baseline or bossanova");
  }
  if (args.cache.empty()) throw std::invalid_argument("extract: --cache is required");
  const Manifest manifest = load_manifest(args.manifest);
  std::filesystem::create_directories(args.cache);
  parallel_for(manifest.records.size(), args.threads, [&](std::size_t i) {
    load_or_extract_features(args.pipeline, args.manifest, manifest.records[i],
                             args.masks, args.cache, args.config);
  });
}

void write_roc_svg(const std::filesystem::path& path, const RocCurve& curve) {
  const double x0 = 50, y0 = 450, span = 400;
  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"500\" height=\"500\" "
      "viewBox=\"0 0 500 500\">\n"
      "  <line x1=\"50\" y1=\"450\" x2=\"450\" y2=\"450\" stroke=\"black\"/>\n"
      "  <line x1=\"50\" y1=\"50\" x2=\"50\" y2=\"450\" stroke=\"black\"/>\n"
      "  <text x=\"250\" y=\"480\" text-anchor=\"middle\">false positive rate</text>\n"
      "  <text x=\"20\" y=\"250\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 20 250)\">true positive rate</text>\n"
      "  <polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s%.2f,%.2f", i ? " " : "",
                  x0 + curve.points[i].first * span,
                  y0 - curve.points[i].second * span);
    svg += buf;
  }
  svg += "\"/>\n</svg>\n";
  write_text_file(path, svg);
}

CvResult cmd_run(const RunArgs& args) {
  if (args.out.empty()) throw std::invalid_argument("run: --out is required");
  const Manifest manifest = load_manifest(args.manifest);
  const FoldPlan plan = load_fold_plan(args.plan);

  Manifest selected;
  std::set<std::string> seen_cases;
  for (const auto& rec : manifest.records) {
    if (plan.assignment.contains(rec.case_id)) {
      selected.records.push_back(rec);
      seen_cases.insert(rec.case_id);
    }
  }
  for (const auto& [case_id, fold] : plan.assignment) {
    (void)fold;
    if (!seen_cases.contains(case_id)) {
      throw std::runtime_error("run: plan case '" + case_id +
                               "' is not in the manifest");
    }
  }
  if (selected.records.empty()) {
    throw std::runtime_error("run: fold plan selects no manifest cases");
  }

  std::vector<PerImageFeatures> images(selected.records.size());
  if (args.pipeline == "external") {
    if (args.features.empty()) {
      throw std::invalid_argument("run: --features is required for external");
    }
    FeatureMatrixFile fmf = read_feature_matrix(args.features);
    l2_normalize_rows(fmf.matrix);
    const JoinedFeatures joined = join_with_manifest(fmf, selected);
    for (std::size_t i = 0; i < selected.records.size(); ++i) {
      PerImageFeatures& im = images[i];
      im.image_path = joined.image_paths[i];
      im.case_id = joined.case_ids[i];
      im.label = joined.y[i];
      im.difficulty = selected.records[i].difficulty;
      im.features.dim = static_cast<int>(joined.X.cols());
      std::vector<float> row(joined.X.cols());
      for (long d = 0; d < joined.X.cols(); ++d) {
        row[static_cast<std::size_t>(d)] = static_cast<float>(joined.X(i, d));
      }
      im.features.append(row.data(), 0, 0);
    }
  } else {
    parallel_for(selected.records.size(), args.threads, [&](std::size_t i) {
      images[i] = load_or_extract_features(args.pipeline, args.manifest,
                                           selected.records[i], args.masks,
                                           args.cache, args.config);
    });
  }

  const auto pipeline = make_pipeline(args.pipeline, args.config);
  const CvResult cv =
      cross_validate(*pipeline, images, plan, args.config.seed, args.threads);

  std::filesystem::create_directories(args.out);
  const std::string hash = config_hash(args.config);

  std::string folds_csv = "fold,auc\n";
  for (const auto& fr : cv.folds) {
    folds_csv += std::to_string(fr.fold) + "," + fmt_double(fr.auc) + "\n";
  }
  write_text_file(args.out / "folds.csv", folds_csv);

  std::string scores_csv = "image,label,score,difficulty,fold\n";
  for (const auto& fr : cv.folds) {
    for (const auto& s : fr.scores) {
      scores_csv += s.image_path + "," + std::to_string(s.label) + "," +
                    fmt_double(s.score) + "," + to_string(s.difficulty) + "," +
                    std::to_string(fr.fold) + "\n";
    }
  }
  write_text_file(args.out / "scores.csv", scores_csv);

  std::string roc_csv = "fpr,tpr\n";
  for (const auto& [fpr, tpr] : cv.summary.mean_roc.points) {
    roc_csv += fmt_double(fpr) + "," + fmt_double(tpr) + "\n";
  }
  write_text_file(args.out / "roc_mean.csv", roc_csv);
  write_roc_svg(args.out / "roc_mean.svg", cv.summary.mean_roc);

  const StratifiedAuc strata = stratify(cv.folds);
  const auto entry_json = [](const StratifiedAuc::Entry& e) -> json {
    if (!e.has_value) return nullptr;
    return json{{"mean_auc", e.mean_auc}, {"folds_scored", e.folds_scored}};
  };
  json summary;
  summary["pipeline"] = args.pipeline;
  summary["subset"] = args.subset_label;
  summary["seed"] = args.config.seed;
  summary["config_hash"] = hash;
  summary["n_folds"] = plan.n_folds;
  summary["n_images"] = images.size();
  summary["mean_auc"] = cv.summary.mean_auc;
  summary["fold_aucs"] = cv.summary.fold_aucs;
  summary["stratified"] = {{"low", entry_json(strata.low)},
                           {"medium", entry_json(strata.medium)},
                           {"high", entry_json(strata.high)}};
  write_text_file(args.out / "summary.json", summary.dump(2) + "\n");
  write_text_file(args.out / "config.json", config_to_json(args.config) + "\n");
  return cv;
}

void cmd_report(const ReportArgs& args) {
  if (args.results.empty()) {
    throw std::invalid_argument("report: at least one results directory required");
  }
  if (args.out.empty()) throw std::invalid_argument("report: --out is required");
  std::vector<std::string> subsets, pipelines;
  std::map<std::pair<std::string, std::string>, double> cell;
  for (const auto& dir : args.results) {
    std::ifstream is(dir / "summary.json");
    if (!is) throw std::runtime_error("report: missing " + (dir / "summary.json").string());
    json j;
    try {
      is >> j;
    } catch (const std::exception& e) {
      throw std::runtime_error("report: bad summary.json in " + dir.string() + ": " +
                               e.what());
    }
    const std::string subset = j.at("subset").get<std::string>();
    const std::string pipeline = j.at("pipeline").get<std::string>();
    if (std::find(subsets.begin(), subsets.end(), subset) == subsets.end()) {
      subsets.push_back(subset);
    }
    if (std::find(pipelines.begin(), pipelines.end(), pipeline) == pipelines.end()) {
      pipelines.push_back(pipeline);
    }
    cell[{subset, pipeline}] = j.at("mean_auc").get<double>();
  }
  std::string csv = "subset";
  for (const auto& p : pipelines) csv += "," + p;
  csv += "\n";
  for (const auto& s : subsets) {
    csv += s;
    for (const auto& p : pipelines) {
      csv += ",";
      const auto it = cell.find({s, p});
      if (it != cell.end()) csv += fmt_double(it->second);
    }
    csv += "\n";
  }
  write_text_file(args.out, csv);
}

}  // namespace melscreen
