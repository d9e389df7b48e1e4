#include "ilg/dataset_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

#include "ilg/version.hpp"

namespace ilg {

namespace {

constexpr char kMagic[4] = {'I', 'L', 'G', 'D'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u16(std::string& buf, std::uint16_t v) {
  buf.push_back(static_cast<char>(v & 0xff));
  buf.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

struct Reader {
  const std::string& buf;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > buf.size()) {
      throw DatasetIoError(DatasetIoError::Code::Truncated, "dataset file truncated");
    }
  }
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(buf[pos++]);
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint8_t>(buf[pos]) |
                      (static_cast<std::uint16_t>(static_cast<std::uint8_t>(buf[pos + 1])) << 8);
    pos += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(buf[pos + i])) << (8 * i);
    pos += 4;
    return v;
  }
};

std::uint8_t quantize(float v) {
  return static_cast<std::uint8_t>(std::lround(clamp01(static_cast<double>(v)) * 255.0));
}

}  // namespace

std::string manifest_path_for(const std::string& dataset_path) {
  return dataset_path + ".manifest.json";
}

nlohmann::json setting_to_json(const IlluminationSetting& s) {
  return nlohmann::json{{"color", light_color_name(s.color)},
                        {"level", s.level},
                        {"lux", s.lux},
                        {"kelvin", s.kelvin}};
}

IlluminationSetting setting_from_json(const nlohmann::json& j) {
  IlluminationSetting s;
  s.color = light_color_from_name(j.at("color").get<std::string>());
  s.level = j.at("level").get<int>();
  s.lux = j.at("lux").get<double>();
  s.kelvin = j.at("kelvin").get<double>();
  return s;
}

void save_dataset(const Dataset& samples, const std::string& path, const DatasetMeta& meta) {
  int h = 0, w = 0;
  if (!samples.empty()) {
    h = samples.front().image.height;
    w = samples.front().image.width;
    for (const auto& s : samples) {
      if (s.image.height != h || s.image.width != w) {
        throw DatasetIoError(DatasetIoError::Code::MixedDimensions,
                             "all images in a dataset must share dimensions");
      }
    }
  }

  std::string buf;
  buf.reserve(16 + samples.size() * (1 + static_cast<std::size_t>(h) * w * 3));
  buf.append(kMagic, 4);
  put_u32(buf, kFormatVersion);
  put_u32(buf, static_cast<std::uint32_t>(samples.size()));
  put_u16(buf, static_cast<std::uint16_t>(h));
  put_u16(buf, static_cast<std::uint16_t>(w));
  buf.push_back(3);
  for (const auto& s : samples) buf.push_back(static_cast<char>(s.label));
  for (const auto& s : samples) {
    for (float v : s.image.data) buf.push_back(static_cast<char>(quantize(v)));
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DatasetIoError(DatasetIoError::Code::Io, "cannot open for writing: " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw DatasetIoError(DatasetIoError::Code::Io, "write failed: " + path);
  out.close();

  // Deduplicated settings table plus per-sample indices keeps the manifest
  // small for grid builds and exact for continuous sweeps.
  nlohmann::json settings = nlohmann::json::array();
  std::map<std::string, std::size_t> index_of;
  nlohmann::json sample_settings = nlohmann::json::array();
  nlohmann::json pose_seeds = nlohmann::json::array();
  for (const auto& s : samples) {
    nlohmann::json js = setting_to_json(s.setting);
    const std::string key = js.dump();
    auto [it, inserted] = index_of.emplace(key, settings.size());
    if (inserted) settings.push_back(js);
    sample_settings.push_back(it->second);
    pose_seeds.push_back(s.pose_seed);
  }

  nlohmann::json manifest{
      {"generator_version", meta.generator_version.empty() ? kGeneratorVersion : meta.generator_version},
      {"seed", meta.seed},
      {"distribution", meta.distribution.is_null() ? nlohmann::json::object() : meta.distribution},
      {"settings", settings},
      {"sample_settings", sample_settings},
      {"pose_seeds", pose_seeds},
  };
  std::ofstream mout(manifest_path_for(path), std::ios::trunc);
  if (!mout) throw DatasetIoError(DatasetIoError::Code::Io, "cannot write manifest for: " + path);
  mout << manifest.dump(2) << "\n";
}

LoadedDataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetIoError(DatasetIoError::Code::Io, "cannot open: " + path);
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  Reader r{buf};
  r.need(4);
  if (std::memcmp(buf.data(), kMagic, 4) != 0) {
    throw DatasetIoError(DatasetIoError::Code::BadMagic, "bad magic in " + path);
  }
  r.pos = 4;
  const std::uint32_t version = r.u32();
  if (version != kFormatVersion) {
    throw DatasetIoError(DatasetIoError::Code::VersionMismatch,
                         "unsupported dataset version " + std::to_string(version));
  }
  const std::uint32_t count = r.u32();
  const int h = r.u16();
  const int w = r.u16();
  const int channels = r.u8();
  if (channels != 3) {
    throw DatasetIoError(DatasetIoError::Code::BadManifest, "unsupported channel count");
  }
  r.need(count);
  const std::size_t labels_at = r.pos;
  r.pos += count;
  const std::size_t pixel_bytes = static_cast<std::size_t>(count) * h * w * 3;
  r.need(pixel_bytes);
  const std::size_t pixels_at = r.pos;

  LoadedDataset out;
  out.samples.resize(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    LabeledSample& s = out.samples[i];
    s.label = static_cast<std::uint8_t>(buf[labels_at + i]);
    s.image = Image(h, w);
    const std::size_t base = pixels_at + static_cast<std::size_t>(i) * h * w * 3;
    for (std::size_t k = 0; k < static_cast<std::size_t>(h) * w * 3; ++k) {
      s.image.data[k] = static_cast<float>(static_cast<std::uint8_t>(buf[base + k]) / 255.0);
    }
  }

  std::ifstream min(manifest_path_for(path));
  if (!min) {
    throw DatasetIoError(DatasetIoError::Code::BadManifest, "missing manifest for: " + path);
  }
  nlohmann::json manifest;
  try {
    min >> manifest;
    out.meta.seed = manifest.at("seed").get<std::uint64_t>();
    out.meta.distribution = manifest.value("distribution", nlohmann::json::object());
    out.meta.generator_version = manifest.value("generator_version", "");

    std::vector<IlluminationSetting> settings;
    for (const auto& js : manifest.at("settings")) settings.push_back(setting_from_json(js));
    const auto& sample_settings = manifest.at("sample_settings");
    const auto& pose_seeds = manifest.at("pose_seeds");
    if (sample_settings.size() != count || pose_seeds.size() != count) {
      throw DatasetIoError(DatasetIoError::Code::BadManifest, "manifest sample count mismatch");
    }
    for (std::uint32_t i = 0; i < count; ++i) {
      out.samples[i].setting = settings.at(sample_settings[i].get<std::size_t>());
      out.samples[i].pose_seed = pose_seeds[i].get<std::uint64_t>();
    }
  } catch (const DatasetIoError&) {
    throw;
  } catch (const std::exception& e) {
    throw DatasetIoError(DatasetIoError::Code::BadManifest,
                         std::string("bad manifest for ") + path + ": " + e.what());
  }
  return out;
}

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetIoError(DatasetIoError::Code::Io, "cannot open: " + path);
  std::uint64_t hash = 0xcbf29ce484222325ull;
  char chunk[4096];
  while (in.read(chunk, sizeof(chunk)) || in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      hash ^= static_cast<std::uint8_t>(chunk[i]);
      hash *= 0x100000001b3ull;
    }
  }
  return hash;
}

}  // namespace ilg
