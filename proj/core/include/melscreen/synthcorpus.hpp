#pragma once

#include <cstdint>
#include <filesystem>

#include "melscreen/dataset.hpp"
#include "melscreen/image.hpp"

namespace melscreen {

// Deterministic lesion image: speckled background at 0.75, one elliptical
// blob whose contrast is set by the difficulty tier. Positive cases carry a
// high-frequency striped texture inside the blob; negatives are smooth.
struct SynthCase {
  GrayImage image;
  BinaryMask truth;
  CaseRecord record;  // image_path left empty; caller fills it
};

SynthCase gen_lesion_image(std::uint64_t seed, bool positive, int size,
                           Difficulty difficulty, bool hair);

// Writes <out_dir>/case_*.png, truth masks under <out_dir>/truth/ and
// manifest.csv. round(n_cases * pos_fraction) positives; difficulty split
// 50/35/15; 10% hair-flagged. Byte-identical for a fixed seed.
Manifest gen_corpus(int n_cases, double pos_fraction, std::uint64_t seed,
                    const std::filesystem::path& out_dir, int image_size = 128);

}  // namespace melscreen
