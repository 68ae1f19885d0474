// melscreen: melanoma screening experiment toolkit.
//
// Subcommands: gen, prepare, segment, extract, run, report. Every error is
// reported as a single line on stderr with a nonzero exit status.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "melscreen/commands.hpp"
#include "melscreen/config.hpp"

namespace {

using melscreen::PipelineConfig;

// --config file first, then explicit flag overrides.
struct ConfigFlags {
  std::string config_file;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_config_flags(CLI::App* cmd, ConfigFlags* flags) {
  cmd->add_option("--config", flags->config_file, "JSON config file");
  cmd->add_option("--seed", flags->seed, "Run seed (overrides config)")
      ->each([flags](const std::string&) { flags->seed_set = true; });
}

PipelineConfig resolve_config(const ConfigFlags& flags) {
  PipelineConfig config;
  if (!flags.config_file.empty()) {
    config = melscreen::load_config_file(flags.config_file);
  }
  if (flags.seed_set) config.seed = flags.seed;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"melanoma screening experiment toolkit"};
  app.require_subcommand(1);

  melscreen::GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic corpus");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_option("--cases", gen.cases, "Number of cases");
  gen_cmd->add_option("--pos-frac", gen.pos_fraction, "Positive fraction");
  gen_cmd->add_option("--seed", gen.seed, "Corpus seed");
  gen_cmd->add_option("--size", gen.image_size, "Image side in pixels");

  melscreen::PrepareArgs prepare;
  auto* prep_cmd = app.add_subcommand("prepare", "Build a case-level fold plan");
  prep_cmd->add_option("--manifest", prepare.manifest, "Manifest CSV")->required();
  prep_cmd->add_option("--subset", prepare.subset, "Subset: lm, lm+ or lmh");
  prep_cmd->add_option("--folds", prepare.folds, "Number of folds");
  prep_cmd->add_option("--seed", prepare.seed, "Split seed");
  prep_cmd->add_option("--out", prepare.out, "Plan CSV path")->required();

  melscreen::SegmentArgs segment;
  ConfigFlags segment_flags;
  auto* seg_cmd = app.add_subcommand("segment", "Segment lesions to mask files");
  seg_cmd->add_option("--manifest", segment.manifest, "Manifest CSV")->required();
  seg_cmd->add_option("--out", segment.out, "Mask output directory")->required();
  seg_cmd->add_option("--mu", segment.params.mu, "Perimeter weight");
  seg_cmd->add_option("--iters", segment.params.iterations, "Evolution iterations");
  seg_cmd->add_option("--threads", segment.threads, "Worker threads");
  seg_cmd->add_option("--config", segment_flags.config_file, "JSON config file");

  melscreen::ExtractArgs extract;
  ConfigFlags extract_flags;
  auto* ext_cmd = app.add_subcommand("extract", "Extract per-image features");
  ext_cmd->add_option("--pipeline", extract.pipeline, "baseline or bossanova")
      ->required();
  ext_cmd->add_option("--manifest", extract.manifest, "Manifest CSV")->required();
  ext_cmd->add_option("--masks", extract.masks, "Mask directory (baseline)");
  ext_cmd->add_option("--cache", extract.cache, "Feature cache directory")->required();
  ext_cmd->add_option("--threads", extract.threads, "Worker threads");
  add_config_flags(ext_cmd, &extract_flags);

  melscreen::RunArgs run;
  ConfigFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "Cross-validate one pipeline");
  run_cmd->add_option("--pipeline", run.pipeline, "baseline, bossanova or external")
      ->required();
  run_cmd->add_option("--manifest", run.manifest, "Manifest CSV")->required();
  run_cmd->add_option("--plan", run.plan, "Fold plan CSV")->required();
  run_cmd->add_option("--cache", run.cache, "Feature cache directory");
  run_cmd->add_option("--masks", run.masks, "Mask directory (baseline)");
  run_cmd->add_option("--features", run.features, "External feature matrix");
  run_cmd->add_option("--out", run.out, "Results directory")->required();
  run_cmd->add_option("--subset", run.subset_label, "Subset label for reports");
  run_cmd->add_option("--threads", run.threads, "Worker threads");
  add_config_flags(run_cmd, &run_flags);

  melscreen::ReportArgs report;
  std::string results_list;
  auto* rep_cmd = app.add_subcommand("report", "Tabulate mean AUC across runs");
  rep_cmd->add_option("--results", results_list, "Comma-separated results dirs")
      ->required();
  rep_cmd->add_option("--out", report.out, "Output CSV table")->required();

  try {
    app.parse(argc, argv);
    if (gen_cmd->parsed()) {
      melscreen::cmd_gen(gen);
    } else if (prep_cmd->parsed()) {
      melscreen::cmd_prepare(prepare);
    } else if (seg_cmd->parsed()) {
      if (!segment_flags.config_file.empty()) {
        const PipelineConfig c = melscreen::load_config_file(segment_flags.config_file);
        if (seg_cmd->count("--mu") == 0) segment.params = c.segmentation;
      }
      melscreen::cmd_segment(segment);
    } else if (ext_cmd->parsed()) {
      extract.config = resolve_config(extract_flags);
      melscreen::cmd_extract(extract);
    } else if (run_cmd->parsed()) {
      run.config = resolve_config(run_flags);
      melscreen::cmd_run(run);
    } else if (rep_cmd->parsed()) {
      std::size_t start = 0;
      while (start <= results_list.size()) {
        const std::size_t comma = results_list.find(',', start);
        const std::string part = results_list.substr(
            start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!part.empty()) report.results.emplace_back(part);
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      melscreen::cmd_report(report);
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::string msg = e.what();
    for (char& c : msg) {
      if (c == '\n' || c == '\r') c = ' ';
    }
    std::fprintf(stderr, "error: %s\n", msg.c_str());
    return 1;
  }
  return 0;
}
