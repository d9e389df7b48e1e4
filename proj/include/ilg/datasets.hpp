#pragma once

#include <array>
#include <cstdint>
#include <utility>

#include <json.hpp>

#include "ilg/dataset_io.hpp"
#include "ilg/graycal.hpp"
#include "ilg/render.hpp"

namespace ilg {

enum class DatasetKind { Fsid, Sid, Ivad, Test, Tune };

const char* dataset_kind_name(DatasetKind k);

// Build recipe for one dataset condition. FSID/IVAD are sized per grid
// cell; SID/TEST/TUNE per class. Pixels come out quantized to the 8-bit
// storage grid so a build and its on-disk round trip are bit-identical.
struct DatasetSpec {
  DatasetKind kind = DatasetKind::Fsid;
  int images_per_cell = 50;    // FSID / IVAD
  int images_per_class = 200;  // SID / TEST / TUNE
  std::uint64_t seed = 0;
  int size = 32;
  RenderOptions render;
  int threads = 1;
};

// Distribution descriptor recorded in the manifest.
nlohmann::json distribution_descriptor(const DatasetSpec& spec);

// 15 grid settings x 10 classes x images_per_cell, ordered by
// (setting, class, index), each sample with a fresh derived pose seed.
Dataset build_fsid(const DatasetSpec& spec);

// Same content volume as the matching FSID build, all rendered under the
// (White, 0) grid cell; 15 * images_per_cell samples per class.
Dataset build_sid(const DatasetSpec& spec);

// SID samples remapped to every grid setting by gray-card ratios; the
// (White, 0) cell keeps unmodified SID images (identity ratio). Cell
// composition mirrors FSID's.
Dataset build_ivad(const Dataset& sid, const std::array<IlluminationVector, kGridSettings>& vectors,
                   const DatasetSpec& spec);

// Continuous sweep: per sample a uniform color class, kelvin uniform within
// that class's measured row range, lux uniform within the row's level -2 to
// +2 range; classes balanced; pose seeds disjoint from all training builds.
Dataset build_test(const DatasetSpec& spec);

// Same sampling law as build_test with an independent seed and pose range;
// the leakage-free objective set for augmentation tuning.
Dataset build_tune(const DatasetSpec& spec);

// Per-class proportional split, deterministic under seed. Every class needs
// at least 5 samples.
std::pair<Dataset, Dataset> stratified_split(const Dataset& dataset, double fraction,
                                             std::uint64_t seed);

struct NormalizationStats {
  std::array<float, 3> mean{0.f, 0.f, 0.f};
  std::array<float, 3> stddev{1.f, 1.f, 1.f};
};

// Per-channel mean/stddev over all pixels of a training split; stddev
// floored at 1e-6.
NormalizationStats compute_normalization(const Dataset& train_split);

}  // namespace ilg
