#include "ilg/image.hpp"

#include <algorithm>
#include <cmath>

namespace ilg {

Hsv rgb_to_hsv(const Rgb& in) {
  const double mx = std::max({in.r, in.g, in.b});
  const double mn = std::min({in.r, in.g, in.b});
  const double delta = mx - mn;

  Hsv out;
  out.v = mx;
  out.s = mx > 0.0 ? delta / mx : 0.0;
  if (delta <= 0.0) {
    out.h = 0.0;  // achromatic
    return out;
  }
  double h;
  if (mx == in.r) {
    h = (in.g - in.b) / delta;
  } else if (mx == in.g) {
    h = 2.0 + (in.b - in.r) / delta;
  } else {
    h = 4.0 + (in.r - in.g) / delta;
  }
  h /= 6.0;
  if (h < 0.0) h += 1.0;
  if (h >= 1.0) h -= 1.0;
  out.h = h;
  return out;
}

Rgb hsv_to_rgb(const Hsv& in) {
  double h = in.h - std::floor(in.h);  // wrap modulo 1
  const double s = in.s;
  const double v = in.v;
  if (s <= 0.0) return {v, v, v};

  h *= 6.0;
  const int sector = std::min(5, static_cast<int>(h));
  const double f = h - sector;
  const double p = v * (1.0 - s);
  const double q = v * (1.0 - s * f);
  const double t = v * (1.0 - s * (1.0 - f));
  switch (sector) {
    case 0: return {v, t, p};
    case 1: return {q, v, p};
    case 2: return {p, v, t};
    case 3: return {p, q, v};
    case 4: return {t, p, v};
    default: return {v, p, q};
  }
}

double gamma_transfer(double value, GammaDirection direction) {
  const double v = std::max(value, 0.0);
  return direction == GammaDirection::Encode ? std::pow(v, 1.0 / 2.2) : std::pow(v, 2.2);
}

void quantize_to_u8_grid(Image& img) {
  for (float& v : img.data) {
    const double c = clamp01(static_cast<double>(v));
    v = static_cast<float>(std::lround(c * 255.0) / 255.0);
  }
}

}  // namespace ilg
