#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ilg/datasets.hpp"
#include "ilg/graycal.hpp"
#include "ilg/jitter.hpp"
#include "ilg/tinynet.hpp"
#include "ilg/tpe.hpp"
#include "ilg/version.hpp"

namespace py = pybind11;
using namespace ilg;

namespace {

py::array_t<float> image_to_array(const Image& img) {
  py::array_t<float> arr({img.height, img.width, 3});
  std::copy(img.data.begin(), img.data.end(), arr.mutable_data());
  return arr;
}

Image array_to_image(const py::array_t<float, py::array::c_style | py::array::forcecast>& arr) {
  if (arr.ndim() != 3 || arr.shape(2) != 3) {
    throw std::invalid_argument("expected an (H, W, 3) float array");
  }
  Image img(static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)));
  std::copy(arr.data(), arr.data() + arr.size(), img.data.begin());
  return img;
}

}  // namespace

PYBIND11_MODULE(illumgap, m) {
  m.doc() = "Illumination-degradation study: simulator, calibration, jitter, TPE, tiny CNN";

  py::enum_<LightColor>(m, "LightColor")
      .value("WARM", LightColor::Warm)
      .value("WHITE", LightColor::White)
      .value("MIXED", LightColor::Mixed);

  py::class_<IlluminationSetting>(m, "IlluminationSetting")
      .def(py::init<>())
      .def(py::init([](LightColor color, int level, double lux, double kelvin) {
             return IlluminationSetting{color, level, lux, kelvin};
           }),
           py::arg("color"), py::arg("level"), py::arg("lux"), py::arg("kelvin"))
      .def_readwrite("color", &IlluminationSetting::color)
      .def_readwrite("level", &IlluminationSetting::level)
      .def_readwrite("lux", &IlluminationSetting::lux)
      .def_readwrite("kelvin", &IlluminationSetting::kelvin)
      .def("__repr__", [](const IlluminationSetting& s) {
        return std::string("IlluminationSetting(") + light_color_name(s.color) + ", level " +
               std::to_string(s.level) + ", " + std::to_string(s.lux) + " lux, " +
               std::to_string(s.kelvin) + " K)";
      });

  m.def("setting_grid", &setting_grid, "The 15-cell measured illumination grid");
  m.def("grid_setting", &grid_setting, py::arg("color"), py::arg("level"));
  m.def(
      "kelvin_to_gain",
      [](double kelvin) {
        const RgbGain g = kelvin_to_gain(kelvin);
        return py::make_tuple(g.r, g.g, g.b);
      },
      py::arg("kelvin"));
  m.def("lux_to_scale", &lux_to_scale, py::arg("lux"));

  m.def(
      "rgb_to_hsv",
      [](double r, double g, double b) {
        const Hsv h = rgb_to_hsv({r, g, b});
        return py::make_tuple(h.h, h.s, h.v);
      },
      py::arg("r"), py::arg("g"), py::arg("b"));
  m.def(
      "hsv_to_rgb",
      [](double h, double s, double v) {
        const Rgb c = hsv_to_rgb({h, s, v});
        return py::make_tuple(c.r, c.g, c.b);
      },
      py::arg("h"), py::arg("s"), py::arg("v"));
  m.def(
      "gamma_transfer",
      [](double value, const std::string& direction) {
        return gamma_transfer(value, direction == "decode" ? GammaDirection::Decode
                                                           : GammaDirection::Encode);
      },
      py::arg("value"), py::arg("direction") = "encode");

  py::class_<RenderOptions>(m, "RenderOptions")
      .def(py::init<>())
      .def(py::init([](double noise_sigma, bool shading, bool gamma, bool clip) {
             return RenderOptions{noise_sigma, shading, gamma, clip};
           }),
           py::arg("noise_sigma") = 0.08, py::arg("shading") = true, py::arg("gamma") = true,
           py::arg("clip") = true)
      .def_readwrite("noise_sigma", &RenderOptions::noise_sigma)
      .def_readwrite("shading", &RenderOptions::shading)
      .def_readwrite("gamma", &RenderOptions::gamma)
      .def_readwrite("clip", &RenderOptions::clip);
  m.def("ideal_render_options", &ideal_render_options);

  m.def(
      "render_sample",
      [](int class_id, std::uint64_t pose_seed, int size, const IlluminationSetting& setting,
         const RenderOptions& opts, std::uint64_t noise_seed) {
        Rng rng(noise_seed);
        return image_to_array(render_sample({class_id, pose_seed, size}, setting, opts, rng));
      },
      py::arg("class_id"), py::arg("pose_seed"), py::arg("size"), py::arg("setting"),
      py::arg("opts") = RenderOptions{}, py::arg("noise_seed") = 0);
  m.def("class_name", &class_name, py::arg("class_id"));
  m.attr("NUM_CLASSES") = kNumClasses;
  m.attr("GRID_SETTINGS") = kGridSettings;

  py::class_<IlluminationVector>(m, "IlluminationVector")
      .def(py::init<>())
      .def_readwrite("r_mean", &IlluminationVector::r_mean)
      .def_readwrite("g_mean", &IlluminationVector::g_mean)
      .def_readwrite("b_mean", &IlluminationVector::b_mean)
      .def_readwrite("setting", &IlluminationVector::setting)
      .def_readwrite("n_frames", &IlluminationVector::n_frames);

  m.def(
      "gray_card_vector",
      [](const IlluminationSetting& setting, int n_frames, const RenderOptions& opts,
         std::uint64_t seed, int size) {
        Rng rng(seed);
        return estimate_illumination_vector(render_gray_card(setting, n_frames, opts, rng, size),
                                            setting);
      },
      py::arg("setting"), py::arg("n_frames") = kDefaultGrayCardFrames,
      py::arg("opts") = RenderOptions{}, py::arg("seed") = 0, py::arg("size") = 32);

  py::class_<MappingRatio>(m, "MappingRatio")
      .def_readwrite("r", &MappingRatio::r)
      .def_readwrite("g", &MappingRatio::g)
      .def_readwrite("b", &MappingRatio::b);
  m.def("mapping_ratio", &mapping_ratio, py::arg("source"), py::arg("target"));
  m.def(
      "apply_vector_mapping",
      [](const py::array_t<float, py::array::c_style | py::array::forcecast>& img,
         const MappingRatio& ratio) {
        return image_to_array(apply_vector_mapping(array_to_image(img), ratio));
      },
      py::arg("image"), py::arg("ratio"));
  m.def("estimate_kelvin", &estimate_kelvin, py::arg("vector"));

  py::class_<JitterParams>(m, "JitterParams")
      .def(py::init<>())
      .def(py::init([](double b, double c, double s, double h) {
             return JitterParams{b, c, s, h};
           }),
           py::arg("brightness") = 0.0, py::arg("contrast") = 0.0, py::arg("saturation") = 0.0,
           py::arg("hue") = 0.0)
      .def_readwrite("brightness", &JitterParams::brightness)
      .def_readwrite("contrast", &JitterParams::contrast)
      .def_readwrite("saturation", &JitterParams::saturation)
      .def_readwrite("hue", &JitterParams::hue);

  m.def(
      "apply_color_jitter",
      [](const py::array_t<float, py::array::c_style | py::array::forcecast>& img,
         const JitterParams& params, std::uint64_t seed) {
        Rng rng(seed);
        return image_to_array(apply_color_jitter(array_to_image(img), params, rng));
      },
      py::arg("image"), py::arg("params"), py::arg("seed") = 0);
  m.def(
      "adjust_color",
      [](const py::array_t<float, py::array::c_style | py::array::forcecast>& img,
         const std::string& kind, double amount) {
        ColorAdjust k;
        if (kind == "brightness") k = ColorAdjust::Brightness;
        else if (kind == "contrast") k = ColorAdjust::Contrast;
        else if (kind == "saturation") k = ColorAdjust::Saturation;
        else if (kind == "hue") k = ColorAdjust::Hue;
        else throw std::invalid_argument("unknown adjustment: " + kind);
        return image_to_array(adjust_color(array_to_image(img), k, amount));
      },
      py::arg("image"), py::arg("kind"), py::arg("amount"));

  py::class_<tpe::Trial>(m, "Trial")
      .def_readonly("params", &tpe::Trial::params)
      .def_readonly("objective", &tpe::Trial::objective)
      .def_readonly("index", &tpe::Trial::index);

  py::class_<tpe::OptimizeResult>(m, "OptimizeResult")
      .def_readonly("best", &tpe::OptimizeResult::best)
      .def_readonly("history", &tpe::OptimizeResult::history);

  m.def(
      "tpe_optimize",
      [](const std::function<double(const std::vector<double>&)>& objective,
         const std::vector<std::tuple<std::string, double, double>>& bounds, int n_trials,
         std::uint64_t seed) {
        tpe::SearchSpace space;
        for (const auto& [name, lo, hi] : bounds) space.dims.push_back({name, lo, hi});
        return tpe::optimize(objective, space, n_trials, seed);
      },
      py::arg("objective"), py::arg("bounds"), py::arg("n_trials") = 200, py::arg("seed") = 0);

  // Dataset builders return (images, labels) numpy pairs for quick use.
  m.def(
      "build_dataset",
      [](const std::string& kind, int images_per_cell, int images_per_class, std::uint64_t seed,
         int size, const RenderOptions& opts, int threads) {
        DatasetSpec spec;
        if (kind == "fsid") spec.kind = DatasetKind::Fsid;
        else if (kind == "sid") spec.kind = DatasetKind::Sid;
        else if (kind == "test") spec.kind = DatasetKind::Test;
        else if (kind == "tune") spec.kind = DatasetKind::Tune;
        else throw std::invalid_argument("kind must be fsid|sid|test|tune");
        spec.images_per_cell = images_per_cell;
        spec.images_per_class = images_per_class;
        spec.seed = seed;
        spec.size = size;
        spec.render = opts;
        spec.threads = threads;
        Dataset d;
        switch (spec.kind) {
          case DatasetKind::Fsid: d = build_fsid(spec); break;
          case DatasetKind::Sid: d = build_sid(spec); break;
          case DatasetKind::Test: d = build_test(spec); break;
          default: d = build_tune(spec); break;
        }
        py::array_t<float> images;
        py::array_t<std::int32_t> labels(static_cast<py::ssize_t>(d.size()));
        if (!d.empty()) {
          const int h = d.front().image.height, w = d.front().image.width;
          images = py::array_t<float>({static_cast<int>(d.size()), h, w, 3});
          float* ip = images.mutable_data();
          std::int32_t* lp = labels.mutable_data();
          for (std::size_t i = 0; i < d.size(); ++i) {
            std::copy(d[i].image.data.begin(), d[i].image.data.end(),
                      ip + i * d[i].image.data.size());
            lp[i] = d[i].label;
          }
        }
        return py::make_tuple(images, labels);
      },
      py::arg("kind"), py::arg("images_per_cell") = 4, py::arg("images_per_class") = 20,
      py::arg("seed") = 0, py::arg("size") = 32, py::arg("opts") = RenderOptions{},
      py::arg("threads") = 1);

  m.def("setting_grid_table", &setting_grid_table);
  m.attr("__version__") = kGeneratorVersion;
}
