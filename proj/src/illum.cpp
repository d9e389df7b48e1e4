#include "ilg/illum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace ilg {

namespace {

struct GridCell {
  double lux;
  double kelvin;
};

// Measured grid: rows Warm/White/Mixed, columns levels -2..+2.
constexpr GridCell kGrid[3][5] = {
    {{180, 3222}, {540, 3812}, {900, 4205}, {1260, 4388}, {1620, 4205}},
    {{200, 20397}, {600, 15186}, {1000, 12769}, {1400, 12527}, {1800, 11931}},
    {{400, 8058}, {1200, 7628}, {2000, 7192}, {2700, 6607}, {3500, 6499}},
};

constexpr LightColor kColors[3] = {LightColor::Warm, LightColor::White, LightColor::Mixed};

double clamp255(double v) { return std::clamp(v, 0.0, 255.0); }

}  // namespace

const char* light_color_name(LightColor c) {
  switch (c) {
    case LightColor::Warm: return "warm";
    case LightColor::White: return "white";
    case LightColor::Mixed: return "mixed";
  }
  return "white";
}

LightColor light_color_from_name(const std::string& name) {
  if (name == "warm") return LightColor::Warm;
  if (name == "white" || name == "cool") return LightColor::White;
  if (name == "mixed") return LightColor::Mixed;
  throw std::invalid_argument("unknown light color: " + name);
}

std::vector<IlluminationSetting> setting_grid() {
  std::vector<IlluminationSetting> out;
  out.reserve(kGridSettings);
  for (int c = 0; c < 3; ++c) {
    for (int lv = -2; lv <= 2; ++lv) {
      out.push_back(grid_setting(kColors[c], lv));
    }
  }
  return out;
}

IlluminationSetting grid_setting(LightColor color, int level) {
  if (level < -2 || level > 2) throw std::invalid_argument("grid level must be in [-2, +2]");
  const GridCell& cell = kGrid[static_cast<int>(color)][level + 2];
  return IlluminationSetting{color, level, cell.lux, cell.kelvin};
}

RgbGain kelvin_to_gain(double kelvin) {
  if (!(kelvin >= 1000.0 && kelvin <= 40000.0)) {
    throw std::invalid_argument("kelvin out of range [1000, 40000]: " + std::to_string(kelvin));
  }
  const double t = kelvin / 100.0;

  // Branch joints at t = 66; the cool green / warm blue branches are
  // rescaled so both sides agree there (see header).
  static const double green_cool_scale = 255.0 / (288.1221695283 * std::pow(6.0, -0.0755148492));
  static const double blue_warm_scale = 255.0 / (138.5177312231 * std::log(56.0) - 305.0447927307);

  double r, g, b;
  if (t <= 66.0) {
    r = 255.0;
    g = 99.4708025861 * std::log(t) - 161.1195681661;
    b = t <= 19.0 ? 0.0 : blue_warm_scale * (138.5177312231 * std::log(t - 10.0) - 305.0447927307);
  } else {
    r = 329.698727446 * std::pow(t - 60.0, -0.1332047592);
    g = green_cool_scale * 288.1221695283 * std::pow(t - 60.0, -0.0755148492);
    b = 255.0;
  }
  r = clamp255(r);
  g = clamp255(g);
  b = clamp255(b);
  const double mx = std::max({r, g, b});
  return RgbGain{r / mx, g / mx, b / mx};
}

double lux_to_scale(double lux) {
  if (lux < 0.0) throw std::invalid_argument("lux must be >= 0");
  return lux / 1000.0;
}

std::string setting_grid_table() {
  std::string out =
      "| Intensity | -2 level | -1 level | 0 level | +1 level | +2 level |\n"
      "|---|---|---|---|---|---|\n";
  const char* row_names[3] = {"Warm Light", "White Light", "Mixed Light"};
  for (int c = 0; c < 3; ++c) {
    out += "| ";
    out += row_names[c];
    out += " |";
    for (int lv = 0; lv < 5; ++lv) {
      char cell[64];
      std::snprintf(cell, sizeof(cell), " %.0fLux, %.0fK |", kGrid[c][lv].lux, kGrid[c][lv].kelvin);
      out += cell;
    }
    out += "\n";
  }
  return out;
}

GridRowRange grid_row_range(LightColor color) {
  const GridCell* row = kGrid[static_cast<int>(color)];
  GridRowRange r{row[0].lux, row[0].lux, row[0].kelvin, row[0].kelvin};
  for (int i = 1; i < 5; ++i) {
    r.lux_min = std::min(r.lux_min, row[i].lux);
    r.lux_max = std::max(r.lux_max, row[i].lux);
    r.kelvin_min = std::min(r.kelvin_min, row[i].kelvin);
    r.kelvin_max = std::max(r.kelvin_max, row[i].kelvin);
  }
  return r;
}

}  // namespace ilg
