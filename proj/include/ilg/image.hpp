#pragma once

#include <cassert>
#include <cstdint>
#include <vector>

namespace ilg {

// H x W x 3 buffer of unit-interval channel values, row major, RGB
// interleaved. Stored values are gamma-encoded display space unless a
// function says otherwise; linear-space debug renders (clip off) may exceed
// [0,1] transiently, everything materialized to disk is clamped.
struct Image {
  int height = 0;
  int width = 0;
  std::vector<float> data;  // size == height * width * 3

  Image() = default;
  Image(int h, int w, float fill = 0.0f) : height(h), width(w), data(static_cast<std::size_t>(h) * w * 3, fill) {}

  float& at(int y, int x, int c) { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
  float at(int y, int x, int c) const { return data[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }

  std::size_t pixel_count() const { return static_cast<std::size_t>(height) * width; }

  bool same_shape(const Image& o) const { return height == o.height && width == o.width; }

  friend bool operator==(const Image& a, const Image& b) {
    return a.height == b.height && a.width == b.width && a.data == b.data;
  }
};

struct Rgb {
  double r = 0, g = 0, b = 0;
};

// h is a fraction of the full hue circle in [0,1); achromatic pixels get
// h = 0 by convention.
struct Hsv {
  double h = 0, s = 0, v = 0;
};

Hsv rgb_to_hsv(const Rgb& in);
Rgb hsv_to_rgb(const Hsv& in);

enum class GammaDirection { Encode, Decode };

// Fixed 2.2 display gamma: encode = v^(1/2.2), decode = v^2.2.
double gamma_transfer(double value, GammaDirection direction);

inline double gamma_encode(double v) { return gamma_transfer(v, GammaDirection::Encode); }
inline double gamma_decode(double v) { return gamma_transfer(v, GammaDirection::Decode); }

// Rec.601 luma weights (0.299, 0.587, 0.114).
inline double luma(double r, double g, double b) { return 0.299 * r + 0.587 * g + 0.114 * b; }

inline double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

// Snaps every channel to the 8-bit storage grid (round(v*255)/255), the
// same quantization save_dataset applies. Builders call this so a freshly
// built dataset and one reloaded from disk are bit-identical.
void quantize_to_u8_grid(Image& img);

}  // namespace ilg
