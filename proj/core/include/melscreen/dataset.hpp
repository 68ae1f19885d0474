#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace melscreen {

enum class Modality { clinical, dermoscopic };
enum class Difficulty { low, medium, high };
enum class Label { negative, positive };

const char* to_string(Modality m);
const char* to_string(Difficulty d);
Modality modality_from_string(const std::string& s);
Difficulty difficulty_from_string(const std::string& s);

struct CaseRecord {
  std::string case_id;
  std::string image_path;
  Modality modality = Modality::dermoscopic;
  std::string diagnosis;
  Difficulty difficulty = Difficulty::low;
  bool hair = false;
  bool ruler_occlusion = false;
  bool far_body_shot = false;
};

struct Manifest {
  std::vector<CaseRecord> records;
};

// Named subsets over difficulty and hair flags. Ruler-occluded and far-body
// rows are always excluded.
struct SubsetSpec {
  std::string name;
  std::set<Difficulty> allowed_difficulties;
  bool allow_hair = false;

  static SubsetSpec lm();       // {low, medium}, hair excluded
  static SubsetSpec lm_plus();  // {low, medium}, hair allowed
  static SubsetSpec lmh();      // {low, medium, high}, hair excluded
  static SubsetSpec from_name(const std::string& name);  // "lm" | "lm+" | "lmh"
};

struct FoldPlan {
  int n_folds = 0;
  std::map<std::string, int> assignment;  // case_id -> fold in [0, n_folds)
};

// CSV with header
// case_id,image_path,modality,diagnosis,difficulty,hair,ruler_occlusion,far_body_shot
// Booleans accept {true,false,0,1}. Parse errors name the offending row.
Manifest load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path, const Manifest& manifest);

// Positive iff the lower-cased diagnosis contains the whole word "melanoma".
Label derive_label(const CaseRecord& record);

Manifest select_subset(const Manifest& manifest, const SubsetSpec& spec);

// Greedy balanced case-level split: cases shuffled by seed, grouped by
// (label, difficulty, diagnosis), groups sorted by size descending, each case
// placed on the fold minimizing positive-count, then difficulty-count, then
// total-count imbalance. Deterministic for a fixed seed.
FoldPlan split_folds(const Manifest& manifest, int n_folds, std::uint64_t seed);

// FoldPlan CSV: header "case_id,fold".
void save_fold_plan(const std::filesystem::path& path, const FoldPlan& plan);
FoldPlan load_fold_plan(const std::filesystem::path& path);

// Image paths in a manifest are taken relative to the manifest's directory
// unless absolute.
std::filesystem::path resolve_image_path(const std::filesystem::path& manifest_path,
                                         const std::string& image_path);

}  // namespace melscreen
