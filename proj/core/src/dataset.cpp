#include "melscreen/dataset.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <utility>

#include "melscreen/rng.hpp"

namespace melscreen {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

bool parse_bool(const std::string& s, int row, const std::string& column) {
  const std::string v = lower(s);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::runtime_error("manifest row " + std::to_string(row) + ": bad boolean '" +
                           s + "' in column " + column);
}

}  // namespace

const char* to_string(Modality m) {
  return m == Modality::clinical ? "clinical" : "dermoscopic";
}

const char* to_string(Difficulty d) {
  switch (d) {
    case Difficulty::low: return "low";
    case Difficulty::medium: return "medium";
    default: return "high";
  }
}

Modality modality_from_string(const std::string& s) {
  const std::string v = lower(s);
  if (v == "clinical") return Modality::clinical;
  if (v == "dermoscopic") return Modality::dermoscopic;
  throw std::runtime_error("unknown modality '" + s + "'");
}

Difficulty difficulty_from_string(const std::string& s) {
  const std::string v = lower(s);
  if (v == "low") return Difficulty::low;
  if (v == "medium") return Difficulty::medium;
  if (v == "high") return Difficulty::high;
  throw std::runtime_error("unknown difficulty '" + s + "'");
}

SubsetSpec SubsetSpec::lm() {
  return {"lm", {Difficulty::low, Difficulty::medium}, false};
}
SubsetSpec SubsetSpec::lm_plus() {
  return {"lm+", {Difficulty::low, Difficulty::medium}, true};
}
SubsetSpec SubsetSpec::lmh() {
  return {"lmh", {Difficulty::low, Difficulty::medium, Difficulty::high}, false};
}

SubsetSpec SubsetSpec::from_name(const std::string& name) {
  const std::string v = lower(name);
  if (v == "lm") return lm();
  if (v == "lm+" || v == "lmplus") return lm_plus();
  if (v == "lmh") return lmh();
  throw std::invalid_argument("unknown subset '" + name +
                              "' (expected lm, lm+ or lmh)");
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open manifest: " + path.string());

  static const std::array<const char*, 8> kColumns = {
      "case_id", "image_path", "modality", "diagnosis",
      "difficulty", "hair", "ruler_occlusion", "far_body_shot"};

  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("manifest has no header row");
  const auto header = split_csv_line(line);
  if (header.size() != kColumns.size()) {
    throw std::runtime_error("manifest header has " + std::to_string(header.size()) +
                             " columns, expected " + std::to_string(kColumns.size()));
  }
  for (std::size_t i = 0; i < kColumns.size(); ++i) {
    if (header[i] != kColumns[i]) {
      throw std::runtime_error("manifest missing column '" + std::string(kColumns[i]) +
                               "' at position " + std::to_string(i + 1));
    }
  }

  Manifest manifest;
  std::set<std::pair<std::string, std::string>> seen;
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != kColumns.size()) {
      throw std::runtime_error("manifest row " + std::to_string(row) + ": expected " +
                               std::to_string(kColumns.size()) + " fields, got " +
                               std::to_string(fields.size()));
    }
    CaseRecord rec;
    rec.case_id = fields[0];
    rec.image_path = fields[1];
    if (rec.case_id.empty()) {
      throw std::runtime_error("manifest row " + std::to_string(row) + ": empty case_id");
    }
    try {
      rec.modality = modality_from_string(fields[2]);
      rec.diagnosis = fields[3];
      rec.difficulty = difficulty_from_string(fields[4]);
    } catch (const std::exception& e) {
      throw std::runtime_error("manifest row " + std::to_string(row) + ": " + e.what());
    }
    rec.hair = parse_bool(fields[5], row, "hair");
    rec.ruler_occlusion = parse_bool(fields[6], row, "ruler_occlusion");
    rec.far_body_shot = parse_bool(fields[7], row, "far_body_shot");
    if (!seen.insert({rec.case_id, rec.image_path}).second) {
      throw std::runtime_error("manifest row " + std::to_string(row) +
                               ": duplicate (case_id, image_path) pair (" + rec.case_id +
                               ", " + rec.image_path + ")");
    }
    manifest.records.push_back(std::move(rec));
  }
  return manifest;
}

void save_manifest(const std::filesystem::path& path, const Manifest& manifest) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write manifest: " + path.string());
  os << "case_id,image_path,modality,diagnosis,difficulty,hair,ruler_occlusion,"
        "far_body_shot\n";
  for (const auto& r : manifest.records) {
    os << r.case_id << ',' << r.image_path << ',' << to_string(r.modality) << ','
       << r.diagnosis << ',' << to_string(r.difficulty) << ',' << (r.hair ? 1 : 0)
       << ',' << (r.ruler_occlusion ? 1 : 0) << ',' << (r.far_body_shot ? 1 : 0)
       << '\n';
  }
}

Label derive_label(const CaseRecord& record) {
  const std::string text = lower(record.diagnosis);
  std::string token;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    const bool alpha = i < text.size() && std::isalpha(static_cast<unsigned char>(text[i]));
    if (alpha) {
      token.push_back(text[i]);
    } else {
      if (token == "melanoma") return Label::positive;
      token.clear();
    }
  }
  return Label::negative;
}

Manifest select_subset(const Manifest& manifest, const SubsetSpec& spec) {
  Manifest out;
  for (const auto& r : manifest.records) {
    if (r.ruler_occlusion || r.far_body_shot) continue;
    if (!spec.allowed_difficulties.contains(r.difficulty)) continue;
    if (r.hair && !spec.allow_hair) continue;
    out.records.push_back(r);
  }
  return out;
}

FoldPlan split_folds(const Manifest& manifest, int n_folds, std::uint64_t seed) {
  if (n_folds < 2) throw std::invalid_argument("n_folds must be >= 2");

  struct CaseInfo {
    std::string case_id;
    bool positive = false;
    Difficulty difficulty = Difficulty::low;
    std::string diagnosis;
  };

  std::map<std::string, CaseInfo> by_case;
  std::vector<std::string> order;  // first-seen order
  for (const auto& r : manifest.records) {
    auto [it, inserted] = by_case.try_emplace(r.case_id);
    if (inserted) {
      it->second.case_id = r.case_id;
      it->second.difficulty = r.difficulty;
      it->second.diagnosis = lower(r.diagnosis);
      order.push_back(r.case_id);
    }
    if (derive_label(r) == Label::positive) it->second.positive = true;
  }
  if (static_cast<int>(order.size()) < n_folds) {
    throw std::invalid_argument("need at least " + std::to_string(n_folds) +
                             " distinct cases, got " + std::to_string(order.size()));
  }

  Rng rng(seed);
  rng.shuffle(order);

  // Group size key: (label, difficulty, diagnosis class).
  std::map<std::tuple<bool, Difficulty, std::string>, std::size_t> group_size;
  for (const auto& id : order) {
    const auto& c = by_case[id];
    ++group_size[{c.positive, c.difficulty, c.diagnosis}];
  }
  std::stable_sort(order.begin(), order.end(), [&](const std::string& a, const std::string& b) {
    const auto& ca = by_case[a];
    const auto& cb = by_case[b];
    return group_size[{ca.positive, ca.difficulty, ca.diagnosis}] >
           group_size[{cb.positive, cb.difficulty, cb.diagnosis}];
  });

  std::vector<int> pos_count(static_cast<std::size_t>(n_folds), 0);
  std::vector<std::array<int, 3>> diff_count(static_cast<std::size_t>(n_folds), {0, 0, 0});
  std::vector<int> total_count(static_cast<std::size_t>(n_folds), 0);

  FoldPlan plan;
  plan.n_folds = n_folds;
  for (const auto& id : order) {
    const auto& c = by_case[id];
    const int d = static_cast<int>(c.difficulty);
    int best = 0;
    auto key = [&](int f) {
      return std::make_tuple(c.positive ? pos_count[static_cast<std::size_t>(f)] : 0,
                             diff_count[static_cast<std::size_t>(f)][d],
                             total_count[static_cast<std::size_t>(f)], f);
    };
    for (int f = 1; f < n_folds; ++f) {
      if (key(f) < key(best)) best = f;
    }
    plan.assignment[id] = best;
    if (c.positive) ++pos_count[static_cast<std::size_t>(best)];
    ++diff_count[static_cast<std::size_t>(best)][d];
    ++total_count[static_cast<std::size_t>(best)];
  }
  return plan;
}

void save_fold_plan(const std::filesystem::path& path, const FoldPlan& plan) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write fold plan: " + path.string());
  os << "case_id,fold\n";
  for (const auto& [case_id, fold] : plan.assignment) {
    os << case_id << ',' << fold << '\n';
  }
}

FoldPlan load_fold_plan(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open fold plan: " + path.string());
  std::string line;
  if (!std::getline(is, line) || split_csv_line(line) != std::vector<std::string>{"case_id", "fold"}) {
    throw std::runtime_error("fold plan header must be 'case_id,fold': " + path.string());
  }
  FoldPlan plan;
  int max_fold = -1;
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2) {
      throw std::runtime_error("fold plan row " + std::to_string(row) + ": expected 2 fields");
    }
    int fold = 0;
    try {
      fold = std::stoi(fields[1]);
    } catch (const std::exception&) {
      throw std::runtime_error("fold plan row " + std::to_string(row) + ": bad fold index '" +
                               fields[1] + "'");
    }
    if (fold < 0) {
      throw std::runtime_error("fold plan row " + std::to_string(row) + ": negative fold");
    }
    if (!plan.assignment.emplace(fields[0], fold).second) {
      throw std::runtime_error("fold plan row " + std::to_string(row) + ": duplicate case_id '" +
                               fields[0] + "'");
    }
    max_fold = std::max(max_fold, fold);
  }
  plan.n_folds = max_fold + 1;
  return plan;
}

std::filesystem::path resolve_image_path(const std::filesystem::path& manifest_path,
                                         const std::string& image_path) {
  std::filesystem::path p(image_path);
  if (p.is_absolute()) return p;
  return manifest_path.parent_path() / p;
}

}  // namespace melscreen
