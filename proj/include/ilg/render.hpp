#pragma once

#include <cstdint>
#include <vector>

#include "ilg/illum.hpp"
#include "ilg/image.hpp"
#include "ilg/rng.hpp"

namespace ilg {

inline constexpr int kNumClasses = 10;

// Names the 10 procedural generators (parametric 2-D shapes/textures with
// class-specific palettes).
const char* class_name(int class_id);

struct SceneSpec {
  int class_id = 0;
  std::uint64_t pose_seed = 0;
  int size = 32;
};

// Realism toggles for the sensor model. Defaults are the effects a global
// per-channel multiplication cannot replicate; turning them all off yields
// the exactly multiplicative world the mapping oracle needs.
struct RenderOptions {
  double noise_sigma = 0.08;  // stddev of additive sensor noise, applied pre-gamma
  bool shading = true;
  bool gamma = true;
  bool clip = true;
};

inline RenderOptions ideal_render_options() { return RenderOptions{0.0, false, false, false}; }

struct AlbedoRender {
  Image albedo;                // linear-space reflectance, channels in [0,1]
  std::vector<float> shading;  // per-pixel multiplier in [0.4, 1.0]
};

// Deterministic function of (class_id, pose_seed, size).
AlbedoRender render_albedo(const SceneSpec& spec);

// Full pipeline:
//   linear = albedo * shading(if on) * gain(kelvin) * lux_to_scale(lux)
//   sensor = linear + noise_sigma * N(0,1)      (per channel)
//   sensor = clamp(sensor, 0, 1)                if clip on
//   output = gamma_encode(sensor)               if gamma on
// Shading comprises the pose-specific intensity field from render_albedo
// and a dual-source color field: the per-pixel gain blends between two
// kelvins spread around the nominal one, along a direction that rotates
// with the setting's intensity. With clip off the output may leave [0,1];
// that mode exists for the multiplicativity oracle, not for dataset builds.
Image render_sample(const SceneSpec& spec, const IlluminationSetting& setting,
                    const RenderOptions& opts, Rng& rng);

}  // namespace ilg
