#include "ilg/render.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ilg {

namespace {

constexpr double kPi = 3.14159265358979323846;

const char* kClassNames[kNumClasses] = {"disc",  "square",  "triangle", "ring",    "cross",
                                        "star",  "stripes", "checker",  "twoblob", "radial"};

// Class-specific foreground palettes, spanning hue space so that color is a
// first-class cue alongside shape.
constexpr double kPalette[kNumClasses][3] = {
    {0.85, 0.20, 0.20},  // disc
    {0.20, 0.80, 0.25},  // square
    {0.22, 0.32, 0.88},  // triangle
    {0.86, 0.78, 0.20},  // ring
    {0.80, 0.22, 0.80},  // cross
    {0.20, 0.80, 0.80},  // star
    {0.90, 0.55, 0.15},  // stripes
    {0.50, 0.25, 0.78},  // checker
    {0.16, 0.62, 0.48},  // twoblob
    {0.90, 0.48, 0.60},  // radial
};

double smoothstep(double a, double b, double x) {
  const double t = std::clamp((x - a) / (b - a), 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

struct Pose {
  double cx, cy;        // center offset
  double scale;         // object scale
  double cosr, sinr;    // rotation
  double fg[3], bg[3];  // jittered palette
  double pattern_freq;  // stripes / checker frequency
  double shade_ax, shade_ay, shade_rad, shade_base;
};

Pose draw_pose(int class_id, Rng& rng) {
  Pose p;
  p.cx = rng.uniform(-0.22, 0.22);
  p.cy = rng.uniform(-0.22, 0.22);
  p.scale = rng.uniform(0.52, 0.80);
  const double rot = rng.uniform(0.0, 2.0 * kPi);
  p.cosr = std::cos(rot);
  p.sinr = std::sin(rot);
  for (int c = 0; c < 3; ++c) {
    p.fg[c] = std::clamp(kPalette[class_id][c] + rng.uniform(-0.05, 0.05), 0.0, 1.0);
    p.bg[c] = std::clamp(0.22 + rng.uniform(-0.04, 0.04), 0.0, 1.0);
  }
  p.pattern_freq = rng.uniform(2.6, 4.2);
  const double shade_dir = rng.uniform(0.0, 2.0 * kPi);
  const double shade_amp = rng.uniform(0.10, 0.26);
  p.shade_ax = shade_amp * std::cos(shade_dir);
  p.shade_ay = shade_amp * std::sin(shade_dir);
  p.shade_rad = rng.uniform(-0.12, 0.06);
  p.shade_base = 0.74;
  return p;
}

// Foreground coverage in [0,1] for normalized, pose-corrected coords.
double shape_mask(int class_id, double px, double py, double edge, const Pose& pose) {
  switch (class_id) {
    case 0: {  // disc
      const double d = std::hypot(px, py) - 0.75;
      return smoothstep(edge, -edge, d);
    }
    case 1: {  // square
      const double d = std::max(std::abs(px), std::abs(py)) - 0.66;
      return smoothstep(edge, -edge, d);
    }
    case 2: {  // triangle
      const double d = std::max({py, -0.8660254 * px - 0.5 * py, 0.8660254 * px - 0.5 * py}) - 0.52;
      return smoothstep(edge, -edge, d);
    }
    case 3: {  // ring
      const double d = std::abs(std::hypot(px, py) - 0.60) - 0.20;
      return smoothstep(edge, -edge, d);
    }
    case 4: {  // cross
      const double bar1 = std::max(std::abs(px) - 0.78, std::abs(py) - 0.24);
      const double bar2 = std::max(std::abs(px) - 0.24, std::abs(py) - 0.78);
      const double d = std::min(bar1, bar2);
      return smoothstep(edge, -edge, d);
    }
    case 5: {  // star (five-lobed)
      const double theta = std::atan2(py, px);
      const double radius = 0.80 * (0.60 + 0.40 * std::cos(5.0 * theta));
      const double d = std::hypot(px, py) - radius;
      return smoothstep(edge, -edge, d);
    }
    case 6: {  // stripes over the whole canvas
      const double v = std::sin(pose.pattern_freq * kPi * px);
      return smoothstep(-0.25, 0.25, v);
    }
    case 7: {  // checker over the whole canvas
      const double v = std::sin(pose.pattern_freq * kPi * px) * std::sin(pose.pattern_freq * kPi * py);
      return smoothstep(-0.18, 0.18, v);
    }
    case 8: {  // two blobs
      const double d1 = ((px - 0.48) * (px - 0.48) + py * py) / (0.36 * 0.36);
      const double d2 = ((px + 0.48) * (px + 0.48) + py * py) / (0.36 * 0.36);
      const double e = std::exp(-d1) + std::exp(-d2);
      return smoothstep(0.42, 0.58, e);
    }
    case 9: {  // radial gradient
      return std::clamp(1.0 - std::hypot(px, py) / 1.15, 0.0, 1.0);
    }
    default:
      throw std::invalid_argument("unknown class_id: " + std::to_string(class_id));
  }
}

}  // namespace

const char* class_name(int class_id) {
  if (class_id < 0 || class_id >= kNumClasses) {
    throw std::invalid_argument("unknown class_id: " + std::to_string(class_id));
  }
  return kClassNames[class_id];
}

AlbedoRender render_albedo(const SceneSpec& spec) {
  if (spec.class_id < 0 || spec.class_id >= kNumClasses) {
    throw std::invalid_argument("unknown class_id: " + std::to_string(spec.class_id));
  }
  if (spec.size < 4) throw std::invalid_argument("image size must be >= 4");

  Rng rng(derive_seed(spec.pose_seed, 0xa1bed0ull, static_cast<std::uint64_t>(spec.class_id),
                      static_cast<std::uint64_t>(spec.size)));
  const Pose pose = draw_pose(spec.class_id, rng);

  const int s = spec.size;
  AlbedoRender out;
  out.albedo = Image(s, s);
  out.shading.resize(static_cast<std::size_t>(s) * s);

  // ~1.5 px of edge softness in pose-normalized units.
  const double edge = 1.5 * (2.0 / s) / pose.scale;

  for (int y = 0; y < s; ++y) {
    const double v = (y + 0.5) / s * 2.0 - 1.0;
    for (int x = 0; x < s; ++x) {
      const double u = (x + 0.5) / s * 2.0 - 1.0;
      const double dx = u - pose.cx;
      const double dy = v - pose.cy;
      const double px = (dx * pose.cosr + dy * pose.sinr) / pose.scale;
      const double py = (-dx * pose.sinr + dy * pose.cosr) / pose.scale;

      const double m = shape_mask(spec.class_id, px, py, edge, pose);
      for (int c = 0; c < 3; ++c) {
        out.albedo.at(y, x, c) = static_cast<float>(pose.bg[c] + m * (pose.fg[c] - pose.bg[c]));
      }
      const double field = pose.shade_base + pose.shade_ax * u + pose.shade_ay * v +
                           pose.shade_rad * (u * u + v * v - 1.0);
      out.shading[static_cast<std::size_t>(y) * s + x] =
          static_cast<float>(std::clamp(field, 0.4, 1.0));
    }
  }
  return out;
}

Image render_sample(const SceneSpec& spec, const IlluminationSetting& setting,
                    const RenderOptions& opts, Rng& rng) {
  const AlbedoRender ar = render_albedo(spec);
  const RgbGain gain = kelvin_to_gain(setting.kelvin);
  const double scale = lux_to_scale(setting.lux);

  // Dual-source color field (shading realism): the two lamps sit at
  // slightly different correlated temperatures, so the per-pixel gain
  // blends between them along a setting-dependent direction. A flat
  // gray-card probe only ever sees the field average, which is exactly
  // what a global per-channel mapping can and cannot correct for.
  RgbGain g_a = gain, g_b = gain;
  double mix_cos = 0.0, mix_sin = 0.0;
  if (opts.shading) {
    const double spread = std::clamp(0.18 + 0.25 * setting.kelvin / 20000.0, 0.18, 0.45);
    g_a = kelvin_to_gain(std::clamp(setting.kelvin * (1.0 + spread), 1000.0, 40000.0));
    g_b = kelvin_to_gain(std::clamp(setting.kelvin / (1.0 + spread), 1000.0, 40000.0));
    const double lux_pos =
        setting.lux > 1e-9 ? std::log(setting.lux / 180.0) / std::log(3500.0 / 180.0) : 0.0;
    const double kelvin_pos = (setting.kelvin - 1000.0) / 39000.0;
    const double theta = 2.0 * kPi * (0.7 * lux_pos + 0.3 * kelvin_pos);
    mix_cos = std::cos(theta);
    mix_sin = std::sin(theta);
  }

  const int s = spec.size;
  Image out(s, s);
  for (int y = 0; y < s; ++y) {
    const double v = (y + 0.5) / s * 2.0 - 1.0;
    for (int x = 0; x < s; ++x) {
      const double u = (x + 0.5) / s * 2.0 - 1.0;
      const std::size_t p = static_cast<std::size_t>(y) * s + x;
      double g[3] = {gain.r, gain.g, gain.b};
      double field = 1.0;
      if (opts.shading) {
        field = ar.shading[p];
        const double t = std::clamp(0.5 + 0.42 * (u * mix_cos + v * mix_sin), 0.0, 1.0);
        g[0] = g_b.r + t * (g_a.r - g_b.r);
        g[1] = g_b.g + t * (g_a.g - g_b.g);
        g[2] = g_b.b + t * (g_a.b - g_b.b);
      }
      for (int c = 0; c < 3; ++c) {
        double lin = static_cast<double>(ar.albedo.data[p * 3 + c]) * field * g[c] * scale;
        if (opts.noise_sigma > 0.0) lin += opts.noise_sigma * rng.gaussian();
        if (opts.clip) lin = clamp01(lin);
        out.data[p * 3 + c] = static_cast<float>(opts.gamma ? gamma_encode(lin) : lin);
      }
    }
  }
  return out;
}

}  // namespace ilg
