#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ilg/datasets.hpp"
#include "ilg/jitter.hpp"
#include "ilg/tinynet.hpp"
#include "ilg/tpe.hpp"

namespace ilg {

struct TpeRunConfig {
  int n_trials = 40;  // desk scale; the paper-scale flag raises it to 200
  double gamma = 0.25;
  int n_startup = 10;
  int n_candidates = 24;
  std::string objective = "tune";  // "tune" (leakage-free) or "test" (paper-faithful)
};

struct ExperimentConfig {
  int images_per_cell = 50;          // FSID/IVAD cell size; SID volume matches FSID
  int test_images_per_class = 200;   // 2000-image test sweep
  int tune_images_per_class = 100;   // 1000-image tuning sweep
  int image_size = 32;
  std::uint64_t data_seed = 20240501;
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  std::string out_dir = "out";
  int jobs = 2;
  // Zeroes the wall_time column so results.csv is byte-comparable across
  // runs; metrics are unaffected.
  bool deterministic_timing = false;
  RenderOptions render;
  TrainConfig train;
  TpeRunConfig tpe;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);

// images_per_cell 100 (15000-image builds) and 200 optimization trials.
void apply_paper_scale(ExperimentConfig& config);

struct ResultRow {
  std::string condition;  // FSID | SID | IVAD | BO-DA
  std::uint64_t seed = 0;
  double accuracy = 0;
  double precision_weighted = 0;
  double recall_weighted = 0;
  double wall_time_sec = 0;
};

// results.csv is the persistent result store: experiments upsert their rows
// keyed by (condition, seed) and the file is rewritten in canonical order
// (FSID, SID, IVAD, BO-DA; seeds ascending).
class ResultStore {
 public:
  static ResultStore load(const std::string& csv_path);
  void save(const std::string& csv_path) const;
  void upsert(const ResultRow& row);
  const std::vector<ResultRow>& rows() const { return rows_; }

 private:
  std::vector<ResultRow> rows_;
};

struct TrialRecord {
  int index = 0;
  JitterParams params;
  double objective = 0;  // NaN marks a failed trial
  bool failed = false;
};

// Builds (or reloads) the persisted dataset for one kind under the config's
// out directory; IVAD additionally needs the gray-card vectors.
Dataset ensure_dataset(const ExperimentConfig& config, DatasetKind kind);

// Gray-card illumination vectors for all 15 grid settings (100 frames each
// under the config's render options), cached at out/data/vectors.json.
std::array<IlluminationVector, kGridSettings> grid_vectors(const ExperimentConfig& config);

std::vector<ResultRow> run_exp1(const ExperimentConfig& config);
std::vector<ResultRow> run_exp2(const ExperimentConfig& config);

struct Exp3Result {
  std::vector<ResultRow> rows;
  std::vector<TrialRecord> trials;
  JitterParams best_params;
};
Exp3Result run_exp3(const ExperimentConfig& config);

void run_gen(const ExperimentConfig& config);
void run_all(const ExperimentConfig& config);

// Writes summary.md and the best-so-far SVG chart from the persisted store
// and trial log.
void emit_report(const ExperimentConfig& config);

std::string results_csv_path(const ExperimentConfig& config);
std::string trials_csv_path(const ExperimentConfig& config);

// "%.6f" with the C locale; every number in the CSV outputs goes through
// this.
std::string format_fixed6(double v);

}  // namespace ilg
