#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ilg/dataset_io.hpp"
#include "ilg/render.hpp"

using namespace ilg;

namespace {

std::string tmp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

Dataset tiny_dataset(int n, int size) {
  Dataset out;
  for (int i = 0; i < n; ++i) {
    LabeledSample s;
    s.label = i % kNumClasses;
    s.setting = grid_setting(LightColor::Warm, (i % 5) - 2);
    s.pose_seed = 1000 + i;
    Rng rng(i);
    s.image = render_sample({s.label, s.pose_seed, size}, s.setting, RenderOptions{}, rng);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

TEST_CASE("empty dataset file layout") {
  const std::string path = tmp_path("ilg_empty.ilgd");
  save_dataset({}, path);
  // magic + version + count + h + w + channels = 17 bytes, zero payload
  CHECK(std::filesystem::file_size(path) == 17);
  const LoadedDataset back = load_dataset(path);
  CHECK(back.samples.empty());
}

TEST_CASE("payload size for one 2x2 sample") {
  Dataset d(1);
  d[0].image = Image(2, 2, 0.5f);
  d[0].label = 3;
  const std::string path = tmp_path("ilg_2x2.ilgd");
  save_dataset(d, path);
  CHECK(std::filesystem::file_size(path) == 17 + 1 + 12);  // header, label, 2*2*3 bytes
}

TEST_CASE("save -> load -> save is byte identical") {
  const Dataset d = tiny_dataset(12, 8);
  const std::string p1 = tmp_path("ilg_rt1.ilgd");
  const std::string p2 = tmp_path("ilg_rt2.ilgd");
  DatasetMeta meta;
  meta.seed = 99;
  meta.distribution = {{"kind", "grid"}};
  save_dataset(d, p1, meta);
  const LoadedDataset back = load_dataset(p1);
  CHECK(back.meta.seed == 99);
  CHECK(back.meta.distribution.at("kind") == "grid");
  save_dataset(back.samples, p2, back.meta);
  CHECK(slurp(p1) == slurp(p2));
  CHECK(slurp(manifest_path_for(p1)) == slurp(manifest_path_for(p2)));
}

TEST_CASE("round trip restores labels, settings, pose seeds exactly; pixels within half a step") {
  const Dataset d = tiny_dataset(10, 8);
  const std::string path = tmp_path("ilg_rt3.ilgd");
  save_dataset(d, path);
  const LoadedDataset back = load_dataset(path);
  REQUIRE(back.samples.size() == d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(back.samples[i].label == d[i].label);
    CHECK(back.samples[i].setting == d[i].setting);
    CHECK(back.samples[i].pose_seed == d[i].pose_seed);
    for (std::size_t k = 0; k < d[i].image.data.size(); ++k) {
      CHECK(std::abs(back.samples[i].image.data[k] - d[i].image.data[k]) <= 1.0f / 510.0f);
    }
  }
}

TEST_CASE("distinct error values") {
  const Dataset d = tiny_dataset(2, 4);
  const std::string path = tmp_path("ilg_err.ilgd");
  save_dataset(d, path);
  std::string bytes = slurp(path);

  SUBCASE("bad magic") {
    bytes[0] = 'X';
    std::ofstream(path, std::ios::binary | std::ios::trunc) << bytes;
    try {
      load_dataset(path);
      FAIL("expected bad magic");
    } catch (const DatasetIoError& e) {
      CHECK(e.code() == DatasetIoError::Code::BadMagic);
    }
  }
  SUBCASE("version mismatch") {
    bytes[4] = 9;
    std::ofstream(path, std::ios::binary | std::ios::trunc) << bytes;
    try {
      load_dataset(path);
      FAIL("expected version mismatch");
    } catch (const DatasetIoError& e) {
      CHECK(e.code() == DatasetIoError::Code::VersionMismatch);
    }
  }
  SUBCASE("truncated payload") {
    bytes.resize(bytes.size() - 5);
    std::ofstream(path, std::ios::binary | std::ios::trunc) << bytes;
    try {
      load_dataset(path);
      FAIL("expected truncation");
    } catch (const DatasetIoError& e) {
      CHECK(e.code() == DatasetIoError::Code::Truncated);
    }
  }
}

TEST_CASE("mixed dimensions rejected on save") {
  Dataset d(2);
  d[0].image = Image(4, 4);
  d[1].image = Image(4, 5);
  try {
    save_dataset(d, tmp_path("ilg_mixed.ilgd"));
    FAIL("expected mixed dimensions error");
  } catch (const DatasetIoError& e) {
    CHECK(e.code() == DatasetIoError::Code::MixedDimensions);
  }
}

TEST_CASE("unwritable path errors") {
  CHECK_THROWS_AS(save_dataset({}, "/nonexistent_dir_zz/x.ilgd"), DatasetIoError);
}
