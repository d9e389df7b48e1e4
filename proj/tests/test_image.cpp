#include <doctest.h>

#include <cmath>

#include "ilg/image.hpp"
#include "ilg/rng.hpp"

using namespace ilg;

TEST_CASE("rgb_to_hsv known points") {
  // pure red is the hue origin
  Hsv red = rgb_to_hsv({1, 0, 0});
  CHECK(red.h == doctest::Approx(0.0));
  CHECK(red.s == doctest::Approx(1.0));
  CHECK(red.v == doctest::Approx(1.0));

  // gray is unsaturated
  Hsv gray = rgb_to_hsv({0.5, 0.5, 0.5});
  CHECK(gray.h == 0.0);
  CHECK(gray.s == 0.0);
  CHECK(gray.v == doctest::Approx(0.5));

  // hand evaluation of the hexcone formulas for cyan
  Hsv cyan = rgb_to_hsv({0, 1, 1});
  CHECK(cyan.h == doctest::Approx(0.5));
  CHECK(cyan.s == doctest::Approx(1.0));
  CHECK(cyan.v == doctest::Approx(1.0));
}

TEST_CASE("hsv_to_rgb known points") {
  Rgb gray = hsv_to_rgb({0.0, 0.0, 0.37});
  CHECK(gray.r == doctest::Approx(0.37));
  CHECK(gray.g == doctest::Approx(0.37));
  CHECK(gray.b == doctest::Approx(0.37));

  Rgb cyan = hsv_to_rgb({0.5, 1.0, 1.0});
  CHECK(cyan.r == doctest::Approx(0.0));
  CHECK(cyan.g == doctest::Approx(1.0));
  CHECK(cyan.b == doctest::Approx(1.0));

  // hue wraps modulo 1
  Rgb wrapped = hsv_to_rgb({1.25, 1.0, 1.0});
  Rgb direct = hsv_to_rgb({0.25, 1.0, 1.0});
  CHECK(wrapped.r == doctest::Approx(direct.r));
  CHECK(wrapped.g == doctest::Approx(direct.g));
  CHECK(wrapped.b == doctest::Approx(direct.b));
}

TEST_CASE("rgb<->hsv round trip over random pixels") {
  Rng rng(42);
  for (int i = 0; i < 1000; ++i) {
    const Rgb in{rng.uniform(), rng.uniform(), rng.uniform()};
    const Rgb out = hsv_to_rgb(rgb_to_hsv(in));
    CHECK(std::abs(out.r - in.r) < 1e-6);
    CHECK(std::abs(out.g - in.g) < 1e-6);
    CHECK(std::abs(out.b - in.b) < 1e-6);
  }
}

TEST_CASE("gamma transfer") {
  CHECK(gamma_encode(0.0) == 0.0);
  CHECK(gamma_encode(1.0) == 1.0);
  CHECK(gamma_encode(0.18) == doctest::Approx(std::pow(0.18, 1.0 / 2.2)).epsilon(1e-12));
  CHECK(std::abs(gamma_decode(gamma_encode(0.5)) - 0.5) < 1e-9);

  // monotone increasing and mutually inverse on a grid
  double prev = -1.0;
  for (int i = 0; i <= 200; ++i) {
    const double v = i / 200.0;
    const double e = gamma_encode(v);
    CHECK(e > prev);
    prev = e;
    CHECK(std::abs(gamma_decode(e) - v) < 1e-9);
  }
}

TEST_CASE("u8 grid quantization is idempotent") {
  Rng rng(7);
  Image img(4, 4);
  for (float& v : img.data) v = static_cast<float>(rng.uniform());
  Image once = img;
  quantize_to_u8_grid(once);
  Image twice = once;
  quantize_to_u8_grid(twice);
  CHECK(once == twice);
}
