#include "melscreen/synthcorpus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "melscreen/image_io.hpp"
#include "melscreen/rng.hpp"

namespace melscreen {

namespace {

constexpr double kBackground = 0.75;
constexpr double kNoiseSigma = 0.05;
constexpr double kStripePeriod = 4.0;

double tier_contrast(Difficulty d) {
  switch (d) {
    case Difficulty::low: return 0.4;
    case Difficulty::medium: return 0.25;
    default: return 0.1;
  }
}

void draw_hair(GrayImage& img, Rng& rng) {
  const int strokes = 4 + static_cast<int>(rng.next_below(5));
  for (int s = 0; s < strokes; ++s) {
    // Quadratic Bezier across the frame.
    const double x0 = rng.next_range(0.0, img.width);
    const double y0 = rng.next_range(0.0, img.height);
    const double x1 = rng.next_range(0.0, img.width);
    const double y1 = rng.next_range(0.0, img.height);
    const double x2 = rng.next_range(0.0, img.width);
    const double y2 = rng.next_range(0.0, img.height);
    const double shade = rng.next_range(0.1, 0.3);
    const int thick = 1 + static_cast<int>(rng.next_below(2));
    const int steps = 4 * (img.width + img.height);
    for (int i = 0; i <= steps; ++i) {
      const double t = static_cast<double>(i) / steps;
      const double u = 1.0 - t;
      const double bx = u * u * x0 + 2.0 * u * t * x1 + t * t * x2;
      const double by = u * u * y0 + 2.0 * u * t * y1 + t * t * y2;
      for (int dy = -thick + 1; dy < thick; ++dy) {
        for (int dx = -thick + 1; dx < thick; ++dx) {
          const int px = static_cast<int>(std::lround(bx)) + dx;
          const int py = static_cast<int>(std::lround(by)) + dy;
          if (px >= 0 && py >= 0 && px < img.width && py < img.height) {
            img.at(px, py) = static_cast<float>(shade);
          }
        }
      }
    }
  }
}

}  // namespace

SynthCase gen_lesion_image(std::uint64_t seed, bool positive, int size,
                           Difficulty difficulty, bool hair) {
  if (size < 64) throw std::invalid_argument("gen_lesion_image: size must be >= 64");
  Rng rng(seed);

  const double cx = rng.next_range(0.4, 0.6) * size;
  const double cy = rng.next_range(0.4, 0.6) * size;
  const double ax = rng.next_range(0.15, 0.35) * size;
  const double ay = rng.next_range(0.15, 0.35) * size;
  const double tilt = rng.next_range(0.0, 3.14159265358979323846);
  const double stripe_dir = rng.next_range(0.0, 3.14159265358979323846);
  const double stripe_phase = rng.next_range(0.0, kStripePeriod);

  const double contrast = tier_contrast(difficulty);
  // The tier contrast sets both blob darkness and the texture amplitude, so
  // high-difficulty cases are genuinely hard to segment and to classify.
  const double pos_base = kBackground - contrast;
  const double neg_base = kBackground - contrast + 0.1;
  const double stripe_amp = 0.5 * 0.3 * (contrast / 0.4);  // half of peak-to-peak

  const double ct = std::cos(tilt), st = std::sin(tilt);
  const double cs = std::cos(stripe_dir), ss = std::sin(stripe_dir);

  SynthCase out;
  out.image = GrayImage(size, size);
  out.truth = BinaryMask(size, size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double rx = (x - cx) * ct + (y - cy) * st;
      const double ry = -(x - cx) * st + (y - cy) * ct;
      const bool inside = (rx * rx) / (ax * ax) + (ry * ry) / (ay * ay) <= 1.0;
      double v = kBackground;
      if (inside) {
        out.truth.at(x, y) = 1;
        if (positive) {
          const double proj = x * cs + y * ss;
          const double stripe =
              std::sin(2.0 * 3.14159265358979323846 * (proj + stripe_phase) / kStripePeriod);
          v = pos_base + stripe_amp * (stripe >= 0.0 ? 1.0 : -1.0);
        } else {
          v = neg_base;
        }
      }
      v += rng.next_normal(0.0, kNoiseSigma);
      out.image.at(x, y) = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }
  if (hair) draw_hair(out.image, rng);
  // Land on the 256-level grid so PNG round-trips are lossless.
  for (float& v : out.image.data) {
    v = static_cast<float>(std::lround(v * 255.0) / 255.0);
  }

  static const char* kNegDiagnoses[] = {"blue nevus", "dermatofibroma",
                                        "seborrheic keratosis", "clark nevus"};
  static const char* kPosDiagnoses[] = {"melanoma (superficial spreading)",
                                        "melanoma (nodular)"};
  out.record.modality = Modality::dermoscopic;
  out.record.diagnosis = positive ? kPosDiagnoses[rng.next_below(2)]
                                  : kNegDiagnoses[rng.next_below(4)];
  out.record.difficulty = difficulty;
  out.record.hair = hair;
  out.record.ruler_occlusion = false;
  out.record.far_body_shot = false;
  return out;
}

Manifest gen_corpus(int n_cases, double pos_fraction, std::uint64_t seed,
                    const std::filesystem::path& out_dir, int image_size) {
  if (n_cases < 10) throw std::invalid_argument("gen_corpus: n_cases must be >= 10");
  if (pos_fraction < 0.0 || pos_fraction > 1.0) {
    throw std::invalid_argument("gen_corpus: pos_fraction must be in [0, 1]");
  }
  std::filesystem::create_directories(out_dir);
  std::filesystem::create_directories(out_dir / "truth");

  const int n = n_cases;
  const int n_pos = static_cast<int>(std::lround(n * pos_fraction));
  const int n_low = static_cast<int>(std::lround(n * 0.50));
  const int n_med = static_cast<int>(std::lround(n * 0.35));
  const int n_hair = n / 10;

  std::vector<bool> positive(static_cast<std::size_t>(n), false);
  std::fill(positive.begin(), positive.begin() + n_pos, true);
  std::vector<Difficulty> difficulty(static_cast<std::size_t>(n), Difficulty::high);
  std::fill(difficulty.begin(), difficulty.begin() + n_low, Difficulty::low);
  std::fill(difficulty.begin() + n_low,
            difficulty.begin() + std::min(n, n_low + n_med), Difficulty::medium);
  std::vector<bool> hair(static_cast<std::size_t>(n), false);
  std::fill(hair.begin(), hair.begin() + n_hair, true);

  // Independent shuffles de-correlate class, difficulty and hair.
  Rng rng(seed);
  rng.shuffle(positive);
  rng.shuffle(difficulty);
  rng.shuffle(hair);

  Manifest manifest;
  for (int i = 0; i < n; ++i) {
    const std::size_t si = static_cast<std::size_t>(i);
    SynthCase sc = gen_lesion_image(derive_seed(seed, static_cast<std::uint64_t>(i)),
                                    positive[si], image_size, difficulty[si], hair[si]);
    char name[32];
    std::snprintf(name, sizeof(name), "case_%04d", i);
    const std::string image_name = std::string(name) + ".png";
    const std::string mask_name = std::string(name) + "_mask.png";
    save_gray_png(out_dir / image_name, sc.image);
    save_mask_png(out_dir / "truth" / mask_name, sc.truth);
    sc.record.case_id = name;
    sc.record.image_path = image_name;
    manifest.records.push_back(std::move(sc.record));
  }
  save_manifest(out_dir / "manifest.csv", manifest);
  return manifest;
}

}  // namespace melscreen
