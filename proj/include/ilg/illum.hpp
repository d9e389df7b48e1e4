#pragma once

#include <array>
#include <string>
#include <vector>

namespace ilg {

enum class LightColor { Warm, White, Mixed };

const char* light_color_name(LightColor c);
LightColor light_color_from_name(const std::string& name);

// One cell of the measured illumination grid (or a continuous test-sweep
// sample). Grid cells carry the measured lux / correlated color temperature
// verbatim; "Cool" and "White" are the same color class, canonically White.
struct IlluminationSetting {
  LightColor color = LightColor::White;
  int level = 0;  // {-2,-1,0,+1,+2} for grid cells
  double lux = 1000.0;
  double kelvin = 6600.0;

  friend bool operator==(const IlluminationSetting& a, const IlluminationSetting& b) {
    return a.color == b.color && a.level == b.level && a.lux == b.lux && a.kelvin == b.kelvin;
  }
};

inline constexpr int kGridSettings = 15;

// The full 3 colors x 5 intensity levels grid, in (Warm, White, Mixed) x
// (-2..+2) order.
std::vector<IlluminationSetting> setting_grid();

// Grid lookup by (color class, intensity level).
IlluminationSetting grid_setting(LightColor color, int level);

struct RgbGain {
  double r = 1, g = 1, b = 1;
};

// Per-channel multiplicative gains for a correlated color temperature in
// [1000, 40000] K.
//
// The curve is the piecewise log/power blackbody fit (t = kelvin/100):
//   red:   t <= 66 : 255                 else 329.698727446*(t-60)^-0.1332047592
//   green: t <= 66 : 99.4708025861*ln(t) - 161.1195681661
//          else     288.1221695283*(t-60)^-0.0755148492
//   blue:  t >= 66 : 255                 t <= 19 : 0
//          else     138.5177312231*ln(t-10) - 305.0447927307
// with the green cool branch and blue warm branch rescaled to meet their
// neighbors at t = 66 exactly (scale factors 255/251.6587... and
// 255/252.5380...), each channel clamped to [0,255], and the triple divided
// by its max component. The result is continuous in kelvin, has max
// component 1, and equals (1,1,1) at the 6600 K anchor.
RgbGain kelvin_to_gain(double kelvin);

// Linear exposure scale; 1000 lux is the reference exposure.
double lux_to_scale(double lux);

// Markdown table of the grid, one row per color class, cells formatted
// "<lux>Lux, <kelvin>K".
std::string setting_grid_table();

// Lux / kelvin endpoints of one color class's grid row (used by the
// continuous-sweep builders).
struct GridRowRange {
  double lux_min, lux_max;
  double kelvin_min, kelvin_max;
};
GridRowRange grid_row_range(LightColor color);

}  // namespace ilg
