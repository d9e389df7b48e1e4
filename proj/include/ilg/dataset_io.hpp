#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ilg/illum.hpp"
#include "ilg/image.hpp"

namespace ilg {

struct LabeledSample {
  Image image;
  int label = 0;  // class index 0..9
  IlluminationSetting setting;
  std::uint64_t pose_seed = 0;
};

using Dataset = std::vector<LabeledSample>;

// Provenance carried in the manifest sidecar next to the binary file.
struct DatasetMeta {
  std::uint64_t seed = 0;
  nlohmann::json distribution;  // e.g. {"kind":"grid"} / {"kind":"singular",...} / {"kind":"sweep"}
  std::string generator_version;
};

class DatasetIoError : public std::runtime_error {
 public:
  enum class Code { Io, BadMagic, VersionMismatch, Truncated, MixedDimensions, BadManifest };

  DatasetIoError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

// Binary layout (little-endian):
//   magic "ILGD" | u32 version=1 | u32 count | u16 height | u16 width |
//   u8 channels=3 | count bytes of labels | count*H*W*3 bytes of pixels
// 8-bit quantization q = round(clamp01(v) * 255); dequantization v = q/255.
// The manifest sidecar "<path>.manifest.json" records seed, distribution,
// settings, pose seeds and generator_version, so a load restores every
// LabeledSample field.
void save_dataset(const Dataset& samples, const std::string& path, const DatasetMeta& meta = {});

struct LoadedDataset {
  Dataset samples;
  DatasetMeta meta;
};

LoadedDataset load_dataset(const std::string& path);

std::string manifest_path_for(const std::string& dataset_path);

nlohmann::json setting_to_json(const IlluminationSetting& s);
IlluminationSetting setting_from_json(const nlohmann::json& j);

// FNV-1a 64 over a file's bytes; used by the golden-fixture hash check.
std::uint64_t fnv1a64_file(const std::string& path);

}  // namespace ilg
