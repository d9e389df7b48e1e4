#include "ilg/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "ilg/parallel.hpp"

namespace ilg {

namespace {

// Pose-seed namespaces: the top byte encodes the dataset kind, so training,
// tune and test pose ranges are disjoint by construction; the low bits are
// seed-derived.
std::uint64_t pose_seed_for(DatasetKind kind, std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t ns = static_cast<std::uint64_t>(kind) + 1;
  const std::uint64_t low = derive_seed(seed, 0x9053ull, index) >> 8;
  return (ns << 56) | low;
}

void require_kind(const DatasetSpec& spec, DatasetKind kind) {
  if (spec.kind != kind) throw std::invalid_argument("dataset spec kind mismatch");
}

Dataset render_batch(const DatasetSpec& spec,
                     const std::vector<std::pair<IlluminationSetting, int>>& plan,
                     DatasetKind kind) {
  Dataset out(plan.size());
  parallel_for(plan.size(), spec.threads, [&](std::size_t i) {
    const auto& [setting, label] = plan[i];
    LabeledSample s;
    s.label = label;
    s.setting = setting;
    s.pose_seed = pose_seed_for(kind, spec.seed, i);
    Rng noise(derive_seed(s.pose_seed, 0x0415eull));
    s.image = render_sample(SceneSpec{label, s.pose_seed, spec.size}, setting, spec.render, noise);
    quantize_to_u8_grid(s.image);
    out[i] = std::move(s);
  });
  return out;
}

Dataset build_sweep(const DatasetSpec& spec, DatasetKind kind) {
  const int per_class = spec.images_per_class;
  std::vector<std::pair<IlluminationSetting, int>> plan;
  plan.reserve(static_cast<std::size_t>(per_class) * kNumClasses);
  Rng rng(derive_seed(spec.seed, 0x5beebull, static_cast<std::uint64_t>(kind)));
  for (int cls = 0; cls < kNumClasses; ++cls) {
    for (int i = 0; i < per_class; ++i) {
      const LightColor color = static_cast<LightColor>(rng.uniform_index(3));
      const GridRowRange range = grid_row_range(color);
      IlluminationSetting s;
      s.color = color;
      s.level = 0;  // not a grid cell; level is informational only here
      s.kelvin = rng.uniform(range.kelvin_min, range.kelvin_max);
      s.lux = rng.uniform(range.lux_min, range.lux_max);
      plan.emplace_back(s, cls);
    }
  }
  return render_batch(spec, plan, kind);
}

}  // namespace

const char* dataset_kind_name(DatasetKind k) {
  switch (k) {
    case DatasetKind::Fsid: return "FSID";
    case DatasetKind::Sid: return "SID";
    case DatasetKind::Ivad: return "IVAD";
    case DatasetKind::Test: return "TEST";
    case DatasetKind::Tune: return "TUNE";
  }
  return "?";
}

nlohmann::json distribution_descriptor(const DatasetSpec& spec) {
  switch (spec.kind) {
    case DatasetKind::Fsid:
      return {{"kind", "grid"}, {"settings", kGridSettings}, {"images_per_cell", spec.images_per_cell}};
    case DatasetKind::Ivad:
      return {{"kind", "grid"},
              {"settings", kGridSettings},
              {"images_per_cell", spec.images_per_cell},
              {"mapped_from", "SID"}};
    case DatasetKind::Sid:
      return {{"kind", "singular"}, {"setting", setting_to_json(grid_setting(LightColor::White, 0))}};
    case DatasetKind::Test:
    case DatasetKind::Tune:
      return {{"kind", "sweep"}, {"images_per_class", spec.images_per_class}};
  }
  return nlohmann::json::object();
}

Dataset build_fsid(const DatasetSpec& spec) {
  require_kind(spec, DatasetKind::Fsid);
  std::vector<std::pair<IlluminationSetting, int>> plan;
  plan.reserve(static_cast<std::size_t>(kGridSettings) * kNumClasses * spec.images_per_cell);
  for (const IlluminationSetting& setting : setting_grid()) {
    for (int cls = 0; cls < kNumClasses; ++cls) {
      for (int i = 0; i < spec.images_per_cell; ++i) plan.emplace_back(setting, cls);
    }
  }
  return render_batch(spec, plan, DatasetKind::Fsid);
}

Dataset build_sid(const DatasetSpec& spec) {
  require_kind(spec, DatasetKind::Sid);
  const IlluminationSetting setting = grid_setting(LightColor::White, 0);
  std::vector<std::pair<IlluminationSetting, int>> plan;
  plan.reserve(static_cast<std::size_t>(spec.images_per_class) * kNumClasses);
  for (int cls = 0; cls < kNumClasses; ++cls) {
    for (int i = 0; i < spec.images_per_class; ++i) plan.emplace_back(setting, cls);
  }
  return render_batch(spec, plan, DatasetKind::Sid);
}

Dataset build_ivad(const Dataset& sid, const std::array<IlluminationVector, kGridSettings>& vectors,
                   const DatasetSpec& spec) {
  require_kind(spec, DatasetKind::Ivad);

  const IlluminationSetting sid_setting = grid_setting(LightColor::White, 0);
  const IlluminationVector* source = nullptr;
  for (const auto& v : vectors) {
    if (v.setting == sid_setting) source = &v;
  }
  if (source == nullptr) {
    throw std::invalid_argument("grid vectors must include the (White, 0) source cell");
  }

  // SID indices grouped by class for the per-cell draws.
  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < sid.size(); ++i) {
    const int label = sid[i].label;
    if (label < 0 || label >= kNumClasses) throw std::invalid_argument("label out of range in SID");
    by_class[label].push_back(i);
  }
  for (int cls = 0; cls < kNumClasses; ++cls) {
    if (by_class[cls].size() < static_cast<std::size_t>(spec.images_per_cell)) {
      throw std::invalid_argument("insufficient SID samples for class " + std::to_string(cls));
    }
  }

  struct MappedDraw {
    std::size_t sid_index;
    const IlluminationVector* target;
  };
  std::vector<MappedDraw> plan;
  plan.reserve(static_cast<std::size_t>(kGridSettings) * kNumClasses * spec.images_per_cell);
  Rng rng(derive_seed(spec.seed, 0x17adull));
  for (const auto& target : vectors) {
    for (int cls = 0; cls < kNumClasses; ++cls) {
      // Without replacement within this cell's draw; distinct cells may
      // reuse source images.
      std::vector<std::size_t> pool = by_class[cls];
      rng.shuffle(pool.begin(), pool.end());
      for (int i = 0; i < spec.images_per_cell; ++i) plan.push_back({pool[i], &target});
    }
  }

  Dataset out(plan.size());
  parallel_for(plan.size(), spec.threads, [&](std::size_t i) {
    const LabeledSample& src = sid[plan[i].sid_index];
    const IlluminationVector& target = *plan[i].target;
    LabeledSample s;
    s.label = src.label;
    s.setting = target.setting;
    s.pose_seed = src.pose_seed;
    if (target.setting == sid_setting) {
      s.image = src.image;  // identity cell keeps the original pixels
    } else {
      s.image = apply_vector_mapping(src.image, mapping_ratio(*source, target));
      quantize_to_u8_grid(s.image);
    }
    out[i] = std::move(s);
  });
  return out;
}

Dataset build_test(const DatasetSpec& spec) {
  require_kind(spec, DatasetKind::Test);
  return build_sweep(spec, DatasetKind::Test);
}

Dataset build_tune(const DatasetSpec& spec) {
  require_kind(spec, DatasetKind::Tune);
  return build_sweep(spec, DatasetKind::Tune);
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& dataset, double fraction,
                                             std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw std::invalid_argument("fraction must be in (0, 1)");

  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < dataset.size(); ++i) by_class[dataset[i].label].push_back(i);
  for (const auto& [label, idx] : by_class) {
    if (idx.size() < 5) {
      throw std::invalid_argument("class " + std::to_string(label) + " has fewer than 5 samples");
    }
  }

  Rng rng(derive_seed(seed, 0x5417ull));
  std::vector<std::size_t> val_indices, train_indices;
  for (auto& [label, idx] : by_class) {
    rng.shuffle(idx.begin(), idx.end());
    const std::size_t n_val = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(idx.size())));
    for (std::size_t i = 0; i < idx.size(); ++i) {
      (i < n_val ? val_indices : train_indices).push_back(idx[i]);
    }
  }
  std::sort(val_indices.begin(), val_indices.end());
  std::sort(train_indices.begin(), train_indices.end());

  std::pair<Dataset, Dataset> out;
  out.first.reserve(train_indices.size());
  out.second.reserve(val_indices.size());
  for (std::size_t i : train_indices) out.first.push_back(dataset[i]);
  for (std::size_t i : val_indices) out.second.push_back(dataset[i]);
  return out;
}

NormalizationStats compute_normalization(const Dataset& train_split) {
  if (train_split.empty()) throw std::invalid_argument("empty training split");
  double sum[3] = {0, 0, 0};
  double sum_sq[3] = {0, 0, 0};
  std::size_t n = 0;
  for (const auto& s : train_split) {
    for (std::size_t p = 0; p < s.image.pixel_count(); ++p) {
      for (int c = 0; c < 3; ++c) {
        const double v = s.image.data[p * 3 + c];
        sum[c] += v;
        sum_sq[c] += v * v;
      }
    }
    n += s.image.pixel_count();
  }
  NormalizationStats stats;
  for (int c = 0; c < 3; ++c) {
    const double mean = sum[c] / static_cast<double>(n);
    const double var = std::max(0.0, sum_sq[c] / static_cast<double>(n) - mean * mean);
    stats.mean[c] = static_cast<float>(mean);
    stats.stddev[c] = static_cast<float>(std::max(std::sqrt(var), 1e-6));
  }
  return stats;
}

}  // namespace ilg
