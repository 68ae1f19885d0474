#pragma once

#include "melscreen/image.hpp"

namespace melscreen {

struct ChanVeseParams {
  double mu = 0.25;                  // perimeter cost
  int iterations = 2000;
  double init_radius_fraction = 0.25;  // of min(height, width)
  double dt = 0.5;
  double epsilon = 1.0;              // Heaviside smoothing width
  int reinit_every = 50;             // signed-distance reinitialization period
};

// Two-phase Chan-Vese level-set evolution. The level set starts as the signed
// distance to a centered disk; the returned mask is the phi < 0 region.
// Constant images return the initialization disk.
BinaryMask chan_vese(const GrayImage& img, const ChanVeseParams& params);

// Baseline lesion extraction: median filter -> chan_vese -> open -> close ->
// largest component, falling back to the initialization disk when the chain
// degenerates to an empty mask.
BinaryMask segment_lesion(const GrayImage& img, const ChanVeseParams& params = {});

// mu * perimeter + sum-of-squares about the inside/outside means. Perimeter
// counts 4-neighbor true/false transitions.
double energy(const GrayImage& img, const BinaryMask& mask, double mu);

}  // namespace melscreen
