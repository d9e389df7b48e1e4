#include "ilg/jitter.hpp"

#include <cmath>
#include <stdexcept>

namespace ilg {

namespace {

Image apply_draw(const Image& image, const JitterDraw& draw) {
  Image out = image;
  for (ColorAdjust kind : draw.order) {
    switch (kind) {
      case ColorAdjust::Brightness: out = adjust_color(out, kind, draw.brightness_factor); break;
      case ColorAdjust::Contrast: out = adjust_color(out, kind, draw.contrast_factor); break;
      case ColorAdjust::Saturation: out = adjust_color(out, kind, draw.saturation_factor); break;
      case ColorAdjust::Hue: out = adjust_color(out, kind, draw.hue_shift); break;
    }
  }
  return out;
}

}  // namespace

void validate_jitter_params(const JitterParams& p) {
  if (!(p.brightness >= 0 && p.brightness <= 1) || !(p.contrast >= 0 && p.contrast <= 1) ||
      !(p.saturation >= 0 && p.saturation <= 1)) {
    throw std::invalid_argument("brightness/contrast/saturation strength must be in [0, 1]");
  }
  if (!(p.hue >= 0 && p.hue <= 0.5)) {
    throw std::invalid_argument("hue strength must be in [0, 0.5]");
  }
}

JitterDraw sample_jitter_draw(const JitterParams& params, Rng& rng) {
  validate_jitter_params(params);
  JitterDraw draw;
  draw.brightness_factor = rng.uniform(std::max(0.0, 1.0 - params.brightness), 1.0 + params.brightness);
  draw.contrast_factor = rng.uniform(std::max(0.0, 1.0 - params.contrast), 1.0 + params.contrast);
  draw.saturation_factor = rng.uniform(std::max(0.0, 1.0 - params.saturation), 1.0 + params.saturation);
  draw.hue_shift = rng.uniform(-params.hue, params.hue);

  static constexpr std::array<ColorAdjust, 4> kAll{ColorAdjust::Brightness, ColorAdjust::Contrast,
                                                   ColorAdjust::Saturation, ColorAdjust::Hue};
  auto perm = rng.permutation(4);
  for (int i = 0; i < 4; ++i) draw.order[i] = kAll[perm[i]];
  return draw;
}

Image adjust_color(const Image& image, ColorAdjust kind, double amount) {
  if (kind != ColorAdjust::Hue && amount < 0.0) {
    throw std::invalid_argument("adjustment factor must be >= 0");
  }
  if (kind == ColorAdjust::Hue && !(amount >= -0.5 && amount <= 0.5)) {
    throw std::invalid_argument("hue shift must be in [-0.5, 0.5]");
  }
  // Identity short-circuit keeps zero-strength jitter exact.
  if (kind == ColorAdjust::Hue ? amount == 0.0 : amount == 1.0) return image;

  Image out(image.height, image.width);
  switch (kind) {
    case ColorAdjust::Brightness: {
      for (std::size_t i = 0; i < image.data.size(); ++i) {
        out.data[i] = static_cast<float>(clamp01(image.data[i] * amount));
      }
      break;
    }
    case ColorAdjust::Contrast: {
      double mean = 0.0;
      for (std::size_t p = 0; p < image.pixel_count(); ++p) {
        mean += luma(image.data[p * 3], image.data[p * 3 + 1], image.data[p * 3 + 2]);
      }
      mean /= static_cast<double>(image.pixel_count());
      for (std::size_t i = 0; i < image.data.size(); ++i) {
        out.data[i] = static_cast<float>(clamp01(mean + amount * (image.data[i] - mean)));
      }
      break;
    }
    case ColorAdjust::Saturation: {
      for (std::size_t p = 0; p < image.pixel_count(); ++p) {
        const double y = luma(image.data[p * 3], image.data[p * 3 + 1], image.data[p * 3 + 2]);
        for (int c = 0; c < 3; ++c) {
          out.data[p * 3 + c] = static_cast<float>(clamp01(y + amount * (image.data[p * 3 + c] - y)));
        }
      }
      break;
    }
    case ColorAdjust::Hue: {
      for (std::size_t p = 0; p < image.pixel_count(); ++p) {
        Hsv hsv = rgb_to_hsv({image.data[p * 3], image.data[p * 3 + 1], image.data[p * 3 + 2]});
        hsv.h += amount;
        const Rgb rgb = hsv_to_rgb(hsv);  // wraps h modulo 1
        out.data[p * 3] = static_cast<float>(clamp01(rgb.r));
        out.data[p * 3 + 1] = static_cast<float>(clamp01(rgb.g));
        out.data[p * 3 + 2] = static_cast<float>(clamp01(rgb.b));
      }
      break;
    }
  }
  return out;
}

Image apply_color_jitter(const Image& image, const JitterParams& params, Rng& rng) {
  return apply_draw(image, sample_jitter_draw(params, rng));
}

Image apply_color_jitter_fixed_order(const Image& image, const JitterParams& params, Rng& rng) {
  JitterDraw draw = sample_jitter_draw(params, rng);
  draw.order = {ColorAdjust::Brightness, ColorAdjust::Contrast, ColorAdjust::Saturation,
                ColorAdjust::Hue};
  return apply_draw(image, draw);
}

}  // namespace ilg
