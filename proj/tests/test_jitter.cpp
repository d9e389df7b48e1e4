#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ilg/jitter.hpp"
#include "ilg/rng.hpp"

using namespace ilg;

namespace {

Image random_image(int size, std::uint64_t seed, double hi = 1.0) {
  Rng rng(seed);
  Image img(size, size);
  for (float& v : img.data) v = static_cast<float>(rng.uniform(0.0, hi));
  return img;
}

Image single_pixel(double r, double g, double b) {
  Image img(1, 1);
  img.data = {static_cast<float>(r), static_cast<float>(g), static_cast<float>(b)};
  return img;
}

}  // namespace

TEST_CASE("zero-strength params give degenerate draws") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const JitterDraw draw = sample_jitter_draw(JitterParams{}, rng);
    CHECK(draw.brightness_factor == 1.0);
    CHECK(draw.contrast_factor == 1.0);
    CHECK(draw.saturation_factor == 1.0);
    CHECK(draw.hue_shift == 0.0);
  }
}

TEST_CASE("draw intervals and empirical mean") {
  JitterParams params;
  params.brightness = 0.5;
  Rng rng(17);
  double sum = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const JitterDraw d = sample_jitter_draw(params, rng);
    CHECK(d.brightness_factor >= 0.5);
    CHECK(d.brightness_factor <= 1.5);
    sum += d.brightness_factor;
  }
  CHECK(std::abs(sum / n - 1.0) < 0.02);
}

TEST_CASE("draw order is a permutation") {
  JitterParams params{0.2, 0.2, 0.2, 0.1};
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const JitterDraw d = sample_jitter_draw(params, rng);
    bool seen[4] = {false, false, false, false};
    for (ColorAdjust k : d.order) seen[static_cast<int>(k)] = true;
    CHECK((seen[0] && seen[1] && seen[2] && seen[3]));
  }
}

TEST_CASE("adjust_color identities are exact") {
  const Image img = random_image(8, 3);
  CHECK(adjust_color(img, ColorAdjust::Brightness, 1.0) == img);
  CHECK(adjust_color(img, ColorAdjust::Contrast, 1.0) == img);
  CHECK(adjust_color(img, ColorAdjust::Saturation, 1.0) == img);
  CHECK(adjust_color(img, ColorAdjust::Hue, 0.0) == img);
}

TEST_CASE("adjust_color known effects") {
  // saturation 0 collapses to the stated luma weights
  const Image red = single_pixel(1, 0, 0);
  const Image gray = adjust_color(red, ColorAdjust::Saturation, 0.0);
  CHECK(gray.data[0] == doctest::Approx(0.299).epsilon(1e-6));
  CHECK(gray.data[1] == doctest::Approx(0.299).epsilon(1e-6));
  CHECK(gray.data[2] == doctest::Approx(0.299).epsilon(1e-6));

  // a half-circle hue rotation sends red to cyan
  const Image cyan = adjust_color(red, ColorAdjust::Hue, 0.5);
  CHECK(cyan.data[0] == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(cyan.data[1] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(cyan.data[2] == doctest::Approx(1.0).epsilon(1e-6));

  // contrast 0 flattens to the image-wide mean luma
  const Image img = random_image(8, 11);
  double mean = 0;
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    mean += luma(img.data[p * 3], img.data[p * 3 + 1], img.data[p * 3 + 2]);
  }
  mean /= static_cast<double>(img.pixel_count());
  const Image flat = adjust_color(img, ColorAdjust::Contrast, 0.0);
  for (float v : flat.data) CHECK(v == doctest::Approx(mean).epsilon(1e-5));

  // brightness scales and clamps
  const Image bright = adjust_color(single_pixel(0.8, 0.2, 0.1), ColorAdjust::Brightness, 2.0);
  CHECK(bright.data[0] == 1.0f);
  CHECK(bright.data[1] == doctest::Approx(0.4));

  CHECK_THROWS_AS(adjust_color(img, ColorAdjust::Brightness, -0.5), std::invalid_argument);
  CHECK_THROWS_AS(adjust_color(img, ColorAdjust::Hue, 0.7), std::invalid_argument);
}

TEST_CASE("apply_color_jitter zero params is the identity for every rng state") {
  const Image img = random_image(12, 99);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    CHECK(apply_color_jitter(img, JitterParams{}, rng) == img);
  }
}

TEST_CASE("apply_color_jitter is reproducible and bounded") {
  const JitterParams params{0.8, 0.8, 0.8, 0.4};
  const Image img = random_image(12, 42);
  Rng r1(7), r2(7);
  const Image a = apply_color_jitter(img, params, r1);
  const Image b = apply_color_jitter(img, params, r2);
  CHECK(a == b);

  Rng rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    const Image out = apply_color_jitter(random_image(6, 1000 + trial), params, rng);
    for (float v : out.data) {
      CHECK(v >= 0.0f);
      CHECK(v <= 1.0f);
    }
  }
}

TEST_CASE("brightness and saturation commute below clipping") {
  const Image img = random_image(8, 21, 0.6);
  const Image bs = adjust_color(adjust_color(img, ColorAdjust::Brightness, 1.2),
                                ColorAdjust::Saturation, 0.7);
  const Image sb = adjust_color(adjust_color(img, ColorAdjust::Saturation, 0.7),
                                ColorAdjust::Brightness, 1.2);
  for (std::size_t i = 0; i < bs.data.size(); ++i) {
    CHECK(std::abs(bs.data[i] - sb.data[i]) < 1e-6);
  }
}

TEST_CASE("parameter validation") {
  Rng rng(0);
  const Image img = single_pixel(0.5, 0.5, 0.5);
  CHECK_THROWS_AS(apply_color_jitter(img, JitterParams{1.2, 0, 0, 0}, rng), std::invalid_argument);
  CHECK_THROWS_AS(apply_color_jitter(img, JitterParams{0, 0, 0, 0.6}, rng), std::invalid_argument);
  CHECK_THROWS_AS(apply_color_jitter(img, JitterParams{0, -0.1, 0, 0}, rng), std::invalid_argument);
}

TEST_CASE("fixed-order variant applies the same factors") {
  const JitterParams params{0.3, 0.3, 0.3, 0.2};
  const Image img = random_image(8, 5);
  Rng r1(11), r2(11);
  const Image a = apply_color_jitter_fixed_order(img, params, r1);
  const Image b = apply_color_jitter_fixed_order(img, params, r2);
  CHECK(a == b);
}
