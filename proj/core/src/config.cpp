#include "melscreen/config.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "melscreen/matrixio.hpp"

namespace melscreen {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& scope) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) {
      if (key == k) {
        ok = true;
        break;
      }
    }
    if (!ok) throw std::runtime_error("config: unknown key '" + scope + key + "'");
  }
}

template <typename T>
void fetch(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

PipelineConfig parse_config_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("config: top level must be an object");
  reject_unknown(j, {"seed", "segmentation", "baseline", "bossanova", "svm"}, "");

  PipelineConfig c;
  fetch(j, "seed", c.seed);
  if (j.contains("segmentation")) {
    const json& s = j.at("segmentation");
    reject_unknown(s,
                   {"mu", "iterations", "init_radius_fraction", "dt", "epsilon",
                    "reinit_every"},
                   "segmentation.");
    fetch(s, "mu", c.segmentation.mu);
    fetch(s, "iterations", c.segmentation.iterations);
    fetch(s, "init_radius_fraction", c.segmentation.init_radius_fraction);
    fetch(s, "dt", c.segmentation.dt);
    fetch(s, "epsilon", c.segmentation.epsilon);
    fetch(s, "reinit_every", c.segmentation.reinit_every);
  }
  if (j.contains("baseline")) {
    const json& b = j.at("baseline");
    reject_unknown(b,
                   {"patch_step", "patch_side", "levels", "codebook_k",
                    "kmeans_max_iter", "sample_cap"},
                   "baseline.");
    fetch(b, "patch_step", c.baseline.grid.step);
    fetch(b, "patch_side", c.baseline.grid.side);
    fetch(b, "levels", c.baseline.grid.levels);
    fetch(b, "codebook_k", c.baseline.codebook_k);
    fetch(b, "kmeans_max_iter", c.baseline.kmeans_max_iter);
    fetch(b, "sample_cap", c.baseline.sample_cap);
  }
  if (j.contains("bossanova")) {
    const json& b = j.at("bossanova");
    reject_unknown(b,
                   {"step", "patch_sizes", "sparsify_threshold", "max_pixels",
                    "pca_dim", "sample_cap", "codebook_k", "bins", "lambda_min",
                    "lambda_max", "count_scale"},
                   "bossanova.");
    fetch(b, "step", c.bossanova.dsift.step);
    fetch(b, "patch_sizes", c.bossanova.dsift.patch_sizes);
    fetch(b, "sparsify_threshold", c.bossanova.dsift.sparsify_threshold);
    fetch(b, "max_pixels", c.bossanova.dsift.max_pixels);
    fetch(b, "pca_dim", c.bossanova.pca_dim);
    fetch(b, "sample_cap", c.bossanova.sample_cap);
    fetch(b, "codebook_k", c.bossanova.codebook_k);
    fetch(b, "bins", c.bossanova.params.bins);
    fetch(b, "lambda_min", c.bossanova.params.lambda_min);
    fetch(b, "lambda_max", c.bossanova.params.lambda_max);
    fetch(b, "count_scale", c.bossanova.params.count_scale);
  }
  if (j.contains("svm")) {
    const json& s = j.at("svm");
    reject_unknown(
        s, {"class_weights", "kkt_tolerance", "max_pair_updates", "inner_folds"},
        "svm.");
    fetch(s, "class_weights", c.svm.options.class_weights);
    fetch(s, "kkt_tolerance", c.svm.options.kkt_tolerance);
    fetch(s, "max_pair_updates", c.svm.options.max_pair_updates);
    fetch(s, "inner_folds", c.svm.inner_folds);
  }
  return c;
}

PipelineConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("config: cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(is)),
                   std::istreambuf_iterator<char>());
  return parse_config_json(text);
}

std::string config_to_json(const PipelineConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["segmentation"] = {{"mu", c.segmentation.mu},
                       {"iterations", c.segmentation.iterations},
                       {"init_radius_fraction", c.segmentation.init_radius_fraction},
                       {"dt", c.segmentation.dt},
                       {"epsilon", c.segmentation.epsilon},
                       {"reinit_every", c.segmentation.reinit_every}};
  j["baseline"] = {{"patch_step", c.baseline.grid.step},
                   {"patch_side", c.baseline.grid.side},
                   {"levels", c.baseline.grid.levels},
                   {"codebook_k", c.baseline.codebook_k},
                   {"kmeans_max_iter", c.baseline.kmeans_max_iter},
                   {"sample_cap", c.baseline.sample_cap}};
  j["bossanova"] = {{"step", c.bossanova.dsift.step},
                    {"patch_sizes", c.bossanova.dsift.patch_sizes},
                    {"sparsify_threshold", c.bossanova.dsift.sparsify_threshold},
                    {"max_pixels", c.bossanova.dsift.max_pixels},
                    {"pca_dim", c.bossanova.pca_dim},
                    {"sample_cap", c.bossanova.sample_cap},
                    {"codebook_k", c.bossanova.codebook_k},
                    {"bins", c.bossanova.params.bins},
                    {"lambda_min", c.bossanova.params.lambda_min},
                    {"lambda_max", c.bossanova.params.lambda_max},
                    {"count_scale", c.bossanova.params.count_scale}};
  j["svm"] = {{"class_weights", c.svm.options.class_weights},
              {"kkt_tolerance", c.svm.options.kkt_tolerance},
              {"max_pair_updates", c.svm.options.max_pair_updates},
              {"inner_folds", c.svm.inner_folds}};
  return j.dump(2);
}

std::string config_hash(const PipelineConfig& config) {
  const std::string text = config_to_json(config);
  return hex64(fnv1a64(text.data(), text.size()));
}

}  // namespace melscreen
