#include "ilg/graycal.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ilg {

namespace {

constexpr double kGrayCardReflectance = 0.18;
constexpr double kDegenerateEps = 1e-4;

// Squared chromaticity distance between a green-normalized linear vector
// and the gain curve at one kelvin.
double chroma_dist_sq(double rn, double bn, double kelvin) {
  const RgbGain gain = kelvin_to_gain(kelvin);
  const double gr = gain.r / gain.g;
  const double gb = gain.b / gain.g;
  return (rn - gr) * (rn - gr) + (bn - gb) * (bn - gb);
}

}  // namespace

std::vector<Image> render_gray_card(const IlluminationSetting& setting, int n_frames,
                                    const RenderOptions& opts, Rng& rng, int size) {
  if (n_frames < 1) throw std::invalid_argument("n_frames must be >= 1");

  const RgbGain gain = kelvin_to_gain(setting.kelvin);
  const double scale = lux_to_scale(setting.lux);
  const double base[3] = {kGrayCardReflectance * gain.r * scale,
                          kGrayCardReflectance * gain.g * scale,
                          kGrayCardReflectance * gain.b * scale};

  std::vector<Image> frames;
  frames.reserve(n_frames);
  for (int f = 0; f < n_frames; ++f) {
    Image img(size, size);
    for (std::size_t p = 0; p < img.pixel_count(); ++p) {
      for (int c = 0; c < 3; ++c) {
        double lin = base[c];
        if (opts.noise_sigma > 0.0) lin += opts.noise_sigma * rng.gaussian();
        if (opts.clip) lin = clamp01(lin);
        img.data[p * 3 + c] = static_cast<float>(opts.gamma ? gamma_encode(lin) : lin);
      }
    }
    frames.push_back(std::move(img));
  }
  return frames;
}

IlluminationVector estimate_illumination_vector(const std::vector<Image>& frames) {
  return estimate_illumination_vector(frames, IlluminationSetting{});
}

IlluminationVector estimate_illumination_vector(const std::vector<Image>& frames,
                                                const IlluminationSetting& setting) {
  if (frames.empty()) throw std::invalid_argument("empty frame list");
  for (const auto& f : frames) {
    if (!f.same_shape(frames.front())) throw std::invalid_argument("frames must share dimensions");
  }

  double sum[3] = {0, 0, 0};
  std::size_t n = 0;
  for (const auto& f : frames) {
    for (std::size_t p = 0; p < f.pixel_count(); ++p) {
      for (int c = 0; c < 3; ++c) sum[c] += f.data[p * 3 + c];
    }
    n += f.pixel_count();
  }
  IlluminationVector v;
  v.r_mean = sum[0] / static_cast<double>(n);
  v.g_mean = sum[1] / static_cast<double>(n);
  v.b_mean = sum[2] / static_cast<double>(n);
  v.setting = setting;
  v.n_frames = static_cast<int>(frames.size());
  return v;
}

MappingRatio mapping_ratio(const IlluminationVector& source, const IlluminationVector& target) {
  for (int c = 0; c < 3; ++c) {
    if (!(source.channel(c) > kDegenerateEps)) {
      throw std::invalid_argument("degenerate source vector");
    }
  }
  MappingRatio ratio;
  ratio.r = target.r_mean / source.r_mean;
  ratio.g = target.g_mean / source.g_mean;
  ratio.b = target.b_mean / source.b_mean;
  ratio.source = source.setting;
  ratio.target = target.setting;
  return ratio;
}

Image apply_vector_mapping(const Image& image, const MappingRatio& ratio) {
  Image out(image.height, image.width);
  const double k[3] = {ratio.r, ratio.g, ratio.b};
  for (std::size_t p = 0; p < image.pixel_count(); ++p) {
    for (int c = 0; c < 3; ++c) {
      out.data[p * 3 + c] = static_cast<float>(clamp01(image.data[p * 3 + c] * k[c]));
    }
  }
  return out;
}

double estimate_kelvin(const IlluminationVector& vector) {
  if (!(vector.r_mean > 0.0) || !(vector.g_mean > 0.0) || !(vector.b_mean > 0.0)) {
    throw std::invalid_argument("degenerate illumination vector");
  }
  // Lift stored means back to linear space, then divide intensity away.
  const double lr = gamma_decode(vector.r_mean);
  const double lg = gamma_decode(vector.g_mean);
  const double lb = gamma_decode(vector.b_mean);
  const double rn = lr / lg;
  const double bn = lb / lg;

  double lo = 1000.0, hi = 40000.0;
  double best_k = lo;
  for (double step = 100.0; step >= 1.0; step /= 10.0) {
    double best_d = std::numeric_limits<double>::infinity();
    for (double k = lo; k <= hi + 1e-9; k += step) {
      const double d = chroma_dist_sq(rn, bn, k);
      if (d < best_d) {
        best_d = d;
        best_k = k;
      }
    }
    lo = std::max(1000.0, best_k - step);
    hi = std::min(40000.0, best_k + step);
  }
  return best_k;
}

}  // namespace ilg
