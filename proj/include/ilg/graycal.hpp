#pragma once

#include <vector>

#include "ilg/illum.hpp"
#include "ilg/image.hpp"
#include "ilg/render.hpp"
#include "ilg/rng.hpp"

namespace ilg {

// Mean stored-space [R,G,B] of a gray-card capture under one setting.
struct IlluminationVector {
  double r_mean = 0, g_mean = 0, b_mean = 0;
  IlluminationSetting setting;
  int n_frames = 0;

  double channel(int c) const { return c == 0 ? r_mean : (c == 1 ? g_mean : b_mean); }
};

// Per-channel multipliers target/source between two illumination vectors.
struct MappingRatio {
  double r = 1, g = 1, b = 1;
  IlluminationSetting source;
  IlluminationSetting target;
};

inline constexpr int kDefaultGrayCardFrames = 100;

// Full-field 18% reflectance card pushed through the render pipeline with
// flat shading. Frames differ only by sensor noise.
std::vector<Image> render_gray_card(const IlluminationSetting& setting, int n_frames,
                                    const RenderOptions& opts, Rng& rng, int size = 32);

// Per-channel mean over all pixels of all frames.
IlluminationVector estimate_illumination_vector(const std::vector<Image>& frames);
IlluminationVector estimate_illumination_vector(const std::vector<Image>& frames,
                                                const IlluminationSetting& setting);

// Component-wise target / source. Source channels below 1e-4 are
// degenerate and error out instead of producing huge ratios.
MappingRatio mapping_ratio(const IlluminationVector& source, const IlluminationVector& target);

// out = clamp(in * ratio, 0, 1), applied in stored (gamma) space, exactly
// as the original pixel-multiplication recipe operates on saved images.
Image apply_vector_mapping(const Image& image, const MappingRatio& ratio);

// Back-estimates correlated color temperature from a gray-card vector:
// lifts the vector to linear space, normalizes intensity away on the green
// channel, and grid-refines the kelvin whose gain curve matches the
// chromaticity, to well under 10 K resolution.
double estimate_kelvin(const IlluminationVector& vector);

}  // namespace ilg
