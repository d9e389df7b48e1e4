#pragma once

#include <array>

#include "ilg/image.hpp"
#include "ilg/rng.hpp"

namespace ilg {

// Strengths of the four-parameter color jitter. A strength s maps to a
// factor drawn uniformly from [max(0, 1-s), 1+s]; the hue strength h maps
// to a shift drawn uniformly from [-h, +h] in hue-circle fraction.
struct JitterParams {
  double brightness = 0;  // [0, 1]
  double contrast = 0;    // [0, 1]
  double saturation = 0;  // [0, 1]
  double hue = 0;         // [0, 0.5]
};

void validate_jitter_params(const JitterParams& params);

enum class ColorAdjust { Brightness, Contrast, Saturation, Hue };

// One realized sample of the stochastic transform: concrete factors plus
// the order in which the four adjustments are applied.
struct JitterDraw {
  double brightness_factor = 1;
  double contrast_factor = 1;
  double saturation_factor = 1;
  double hue_shift = 0;
  std::array<ColorAdjust, 4> order{ColorAdjust::Brightness, ColorAdjust::Contrast,
                                   ColorAdjust::Saturation, ColorAdjust::Hue};
};

// Factors uniform on their intervals; order a uniform random permutation.
JitterDraw sample_jitter_draw(const JitterParams& params, Rng& rng);

// amount is a factor >= 0 for brightness/contrast/saturation and a shift in
// [-0.5, 0.5] for hue. Factor 1 / shift 0 return the input unchanged.
//   brightness: v' = clamp(v * f)
//   contrast:   v' = clamp(mean_luma + f * (v - mean_luma)), image-wide mean luma
//   saturation: v' = clamp(luma + f * (v - luma)), per-pixel luma
//   hue:        rotate h by shift modulo 1 in HSV space
Image adjust_color(const Image& image, ColorAdjust kind, double amount);

// Draws a JitterDraw and applies the four adjustments in the drawn order.
Image apply_color_jitter(const Image& image, const JitterParams& params, Rng& rng);

// Fixed-order variant (brightness, contrast, saturation, hue) for debugging.
Image apply_color_jitter_fixed_order(const Image& image, const JitterParams& params, Rng& rng);

}  // namespace ilg
