#include "ilg/harness.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "ilg/parallel.hpp"
#include "ilg/version.hpp"

namespace ilg {

namespace fs = std::filesystem;

namespace {

const char* kConditionOrder[4] = {"FSID", "SID", "IVAD", "BO-DA"};

int condition_rank(const std::string& c) {
  for (int i = 0; i < 4; ++i) {
    if (c == kConditionOrder[i]) return i;
  }
  return 4;
}

double parse_double(const std::string& s) {
  double v = 0;
  const auto* begin = s.data();
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{}) throw std::runtime_error("bad number in csv: " + s);
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::string data_dir(const ExperimentConfig& c) { return c.out_dir + "/data"; }
std::string models_dir(const ExperimentConfig& c) { return c.out_dir + "/models"; }

DatasetSpec spec_for(const ExperimentConfig& config, DatasetKind kind) {
  DatasetSpec spec;
  spec.kind = kind;
  spec.size = config.image_size;
  spec.render = config.render;
  spec.threads = config.jobs;
  spec.images_per_cell = config.images_per_cell;
  switch (kind) {
    case DatasetKind::Fsid:
    case DatasetKind::Ivad:
      break;
    case DatasetKind::Sid:
      // Volume matched to FSID: 15 * images_per_cell per class.
      spec.images_per_class = kGridSettings * config.images_per_cell;
      break;
    case DatasetKind::Test:
      spec.images_per_class = config.test_images_per_class;
      break;
    case DatasetKind::Tune:
      spec.images_per_class = config.tune_images_per_class;
      break;
  }
  spec.seed = derive_seed(config.data_seed, 0xd5ull, static_cast<std::uint64_t>(kind));
  return spec;
}

nlohmann::json render_to_json(const RenderOptions& r) {
  return {{"noise_sigma", r.noise_sigma}, {"shading", r.shading}, {"gamma", r.gamma}, {"clip", r.clip}};
}

RenderOptions render_from_json(const nlohmann::json& j) {
  RenderOptions r;
  r.noise_sigma = j.value("noise_sigma", r.noise_sigma);
  r.shading = j.value("shading", r.shading);
  r.gamma = j.value("gamma", r.gamma);
  r.clip = j.value("clip", r.clip);
  return r;
}

// Everything that determines a build's content; a cached file whose
// fingerprint differs is rebuilt.
nlohmann::json spec_fingerprint(const DatasetSpec& spec) {
  return {{"kind", dataset_kind_name(spec.kind)},
          {"images_per_cell", spec.images_per_cell},
          {"images_per_class", spec.images_per_class},
          {"seed", spec.seed},
          {"size", spec.size},
          {"render", render_to_json(spec.render)},
          {"generator_version", kGeneratorVersion}};
}

std::string dataset_path(const ExperimentConfig& config, DatasetKind kind) {
  std::string name = dataset_kind_name(kind);
  std::transform(name.begin(), name.end(), name.begin(), [](char c) { return std::tolower(c); });
  return data_dir(config) + "/" + name + ".ilgd";
}

nlohmann::json vector_to_json(const IlluminationVector& v) {
  return {{"setting", setting_to_json(v.setting)},
          {"r_mean", v.r_mean},
          {"g_mean", v.g_mean},
          {"b_mean", v.b_mean},
          {"n_frames", v.n_frames}};
}

struct Job {
  std::string condition;
  std::uint64_t seed;
  const Dataset* train_data;
  const Dataset* test_data;
  Augmentation augmentation;
};

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

// Runs the fixed job list through the parallel-map contract and merges
// rows in job-list order, so results are byte-stable at any parallelism.
std::vector<ResultRow> run_jobs(const ExperimentConfig& config, const std::vector<Job>& jobs) {
  fs::create_directories(models_dir(config));
  std::vector<ResultRow> rows(jobs.size());
  const bool parallel_jobs = config.jobs > 1 && jobs.size() > 1;
  const int train_threads = parallel_jobs ? 1 : config.jobs;
  parallel_for(jobs.size(), parallel_jobs ? config.jobs : 1, [&](std::size_t i) {
    const Job& job = jobs[i];
    const double t0 = now_seconds();

    TrainConfig tc = config.train;
    tc.seed = job.seed;
    tc.input_size = config.image_size;
    tc.threads = train_threads;
    const TrainResult trained = train(*job.train_data, tc, job.augmentation);
    const EvalMetrics metrics = evaluate(trained.model, *job.test_data, train_threads);

    ResultRow row;
    row.condition = job.condition;
    row.seed = job.seed;
    row.accuracy = metrics.accuracy;
    row.precision_weighted = metrics.precision_weighted;
    row.recall_weighted = metrics.recall_weighted;
    row.wall_time_sec = config.deterministic_timing ? 0.0 : now_seconds() - t0;
    rows[i] = row;

    // Provenance: checkpoint plus loss history per row.
    const std::string stem =
        models_dir(config) + "/" + job.condition + "_seed" + std::to_string(job.seed);
    save_checkpoint(trained.model, stem + ".ilgm");
    std::ofstream loss(stem + "_loss.csv", std::ios::trunc);
    loss << "epoch,train_loss,val_loss\n";
    for (std::size_t e = 0; e < trained.train_losses.size(); ++e) {
      loss << e << "," << format_fixed6(trained.train_losses[e]) << ","
           << format_fixed6(trained.val_losses[e]) << "\n";
    }
  });
  return rows;
}

void merge_rows(const ExperimentConfig& config, const std::vector<ResultRow>& rows) {
  ResultStore store = ResultStore::load(results_csv_path(config));
  for (const ResultRow& r : rows) store.upsert(r);
  store.save(results_csv_path(config));
}

tpe::SearchSpace jitter_search_space() {
  return tpe::SearchSpace{{{"brightness", 0.0, 1.0},
                      {"contrast", 0.0, 1.0},
                      {"saturation", 0.0, 1.0},
                      {"hue", 0.0, 0.5}}};
}

JitterParams params_from_point(const std::vector<double>& x) {
  return JitterParams{x[0], x[1], x[2], x[3]};
}

Augmentation jitter_augmentation(const JitterParams& params) {
  return [params](const Image& img, Rng& rng) { return apply_color_jitter(img, params, rng); };
}

std::string chart_path(const ExperimentConfig& config) { return config.out_dir + "/bestsofar.svg"; }

void write_best_so_far_chart(const std::vector<TrialRecord>& trials, const std::string& path);

}  // namespace

std::string format_fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.images_per_cell = j.value("images_per_cell", c.images_per_cell);
  c.test_images_per_class = j.value("test_images_per_class", c.test_images_per_class);
  c.tune_images_per_class = j.value("tune_images_per_class", c.tune_images_per_class);
  c.image_size = j.value("image_size", c.image_size);
  c.data_seed = j.value("data_seed", c.data_seed);
  if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  c.out_dir = j.value("out_dir", c.out_dir);
  c.jobs = j.value("jobs", c.jobs);
  c.deterministic_timing = j.value("deterministic_timing", c.deterministic_timing);
  if (j.contains("render")) c.render = render_from_json(j.at("render"));
  if (j.contains("train")) {
    const auto& t = j.at("train");
    c.train.val_split = t.value("val_split", c.train.val_split);
    c.train.batch_size = t.value("batch_size", c.train.batch_size);
    c.train.learning_rate = t.value("learning_rate", c.train.learning_rate);
    c.train.max_epochs = t.value("max_epochs", c.train.max_epochs);
    c.train.patience = t.value("patience", c.train.patience);
    if (t.contains("arch")) c.train.arch = model_arch_from_name(t.at("arch").get<std::string>());
  }
  if (j.contains("tpe")) {
    const auto& t = j.at("tpe");
    c.tpe.n_trials = t.value("n_trials", c.tpe.n_trials);
    c.tpe.gamma = t.value("gamma", c.tpe.gamma);
    c.tpe.n_startup = t.value("n_startup", c.tpe.n_startup);
    c.tpe.n_candidates = t.value("n_candidates", c.tpe.n_candidates);
    c.tpe.objective = t.value("objective", c.tpe.objective);
  }
  if (c.seeds.empty()) throw std::invalid_argument("seeds must be non-empty");
  if (c.tpe.objective != "tune" && c.tpe.objective != "test") {
    throw std::invalid_argument("tpe.objective must be 'tune' or 'test'");
  }
  return c;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  return {{"images_per_cell", c.images_per_cell},
          {"test_images_per_class", c.test_images_per_class},
          {"tune_images_per_class", c.tune_images_per_class},
          {"image_size", c.image_size},
          {"data_seed", c.data_seed},
          {"seeds", c.seeds},
          {"out_dir", c.out_dir},
          {"jobs", c.jobs},
          {"deterministic_timing", c.deterministic_timing},
          {"render", render_to_json(c.render)},
          {"train",
           {{"val_split", c.train.val_split},
            {"batch_size", c.train.batch_size},
            {"learning_rate", c.train.learning_rate},
            {"max_epochs", c.train.max_epochs},
            {"patience", c.train.patience},
            {"arch", model_arch_name(c.train.arch)}}},
          {"tpe",
           {{"n_trials", c.tpe.n_trials},
            {"gamma", c.tpe.gamma},
            {"n_startup", c.tpe.n_startup},
            {"n_candidates", c.tpe.n_candidates},
            {"objective", c.tpe.objective}}}};
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  nlohmann::json j;
  in >> j;
  return config_from_json(j);
}

void apply_paper_scale(ExperimentConfig& config) {
  config.images_per_cell = 100;  // 15000-image FSID/SID/IVAD builds
  config.tpe.n_trials = 200;
}

ResultStore ResultStore::load(const std::string& csv_path) {
  ResultStore store;
  std::ifstream in(csv_path);
  if (!in) return store;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != 6) throw std::runtime_error("malformed results.csv row: " + line);
    ResultRow row;
    row.condition = f[0];
    row.seed = std::stoull(f[1]);
    row.accuracy = parse_double(f[2]);
    row.precision_weighted = parse_double(f[3]);
    row.recall_weighted = parse_double(f[4]);
    row.wall_time_sec = parse_double(f[5]);
    store.rows_.push_back(std::move(row));
  }
  return store;
}

void ResultStore::save(const std::string& csv_path) const {
  std::vector<ResultRow> sorted = rows_;
  std::stable_sort(sorted.begin(), sorted.end(), [](const ResultRow& a, const ResultRow& b) {
    const int ra = condition_rank(a.condition), rb = condition_rank(b.condition);
    return ra != rb ? ra < rb : a.seed < b.seed;
  });
  std::ofstream out(csv_path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + csv_path);
  out << "condition,seed,acc,pre,rec,wall_time\n";
  for (const ResultRow& r : sorted) {
    out << r.condition << "," << r.seed << "," << format_fixed6(r.accuracy) << ","
        << format_fixed6(r.precision_weighted) << "," << format_fixed6(r.recall_weighted) << ","
        << format_fixed6(r.wall_time_sec) << "\n";
  }
}

void ResultStore::upsert(const ResultRow& row) {
  for (ResultRow& r : rows_) {
    if (r.condition == row.condition && r.seed == row.seed) {
      r = row;
      return;
    }
  }
  rows_.push_back(row);
}

std::string results_csv_path(const ExperimentConfig& config) {
  return config.out_dir + "/results.csv";
}

std::string trials_csv_path(const ExperimentConfig& config) {
  return config.out_dir + "/trials.csv";
}

Dataset ensure_dataset(const ExperimentConfig& config, DatasetKind kind) {
  fs::create_directories(data_dir(config));
  const DatasetSpec spec = spec_for(config, kind);
  const std::string path = dataset_path(config, kind);
  const nlohmann::json fingerprint = spec_fingerprint(spec);

  if (fs::exists(path) && fs::exists(manifest_path_for(path))) {
    try {
      LoadedDataset loaded = load_dataset(path);
      if (loaded.meta.distribution.value("spec", nlohmann::json()) == fingerprint) {
        return std::move(loaded.samples);
      }
    } catch (const DatasetIoError&) {
      // fall through to rebuild
    }
  }

  Dataset built;
  switch (kind) {
    case DatasetKind::Fsid: built = build_fsid(spec); break;
    case DatasetKind::Sid: built = build_sid(spec); break;
    case DatasetKind::Test: built = build_test(spec); break;
    case DatasetKind::Tune: built = build_tune(spec); break;
    case DatasetKind::Ivad: {
      const Dataset sid = ensure_dataset(config, DatasetKind::Sid);
      built = build_ivad(sid, grid_vectors(config), spec);
      break;
    }
  }

  DatasetMeta meta;
  meta.seed = spec.seed;
  meta.distribution = distribution_descriptor(spec);
  meta.distribution["spec"] = fingerprint;
  if (kind == DatasetKind::Ivad) {
    nlohmann::json vjson = nlohmann::json::array();
    for (const auto& v : grid_vectors(config)) vjson.push_back(vector_to_json(v));
    meta.distribution["vectors"] = vjson;
  }
  save_dataset(built, path, meta);
  return built;
}

std::array<IlluminationVector, kGridSettings> grid_vectors(const ExperimentConfig& config) {
  std::array<IlluminationVector, kGridSettings> vectors;
  const std::vector<IlluminationSetting> grid = setting_grid();
  for (int i = 0; i < kGridSettings; ++i) {
    Rng rng(derive_seed(config.data_seed, 0x6ca7ull, static_cast<std::uint64_t>(i)));
    const std::vector<Image> frames =
        render_gray_card(grid[i], kDefaultGrayCardFrames, config.render, rng, config.image_size);
    vectors[i] = estimate_illumination_vector(frames, grid[i]);
  }

  fs::create_directories(data_dir(config));
  nlohmann::json out = nlohmann::json::array();
  for (const auto& v : vectors) out.push_back(vector_to_json(v));
  std::ofstream f(data_dir(config) + "/vectors.json", std::ios::trunc);
  f << out.dump(2) << "\n";
  return vectors;
}

std::vector<ResultRow> run_exp1(const ExperimentConfig& config) {
  const Dataset fsid = ensure_dataset(config, DatasetKind::Fsid);
  const Dataset sid = ensure_dataset(config, DatasetKind::Sid);
  const Dataset test = ensure_dataset(config, DatasetKind::Test);

  std::vector<Job> jobs;
  for (std::uint64_t seed : config.seeds) jobs.push_back({"FSID", seed, &fsid, &test, nullptr});
  for (std::uint64_t seed : config.seeds) jobs.push_back({"SID", seed, &sid, &test, nullptr});
  const std::vector<ResultRow> rows = run_jobs(config, jobs);
  merge_rows(config, rows);
  return rows;
}

std::vector<ResultRow> run_exp2(const ExperimentConfig& config) {
  const Dataset ivad = ensure_dataset(config, DatasetKind::Ivad);
  const Dataset test = ensure_dataset(config, DatasetKind::Test);

  std::vector<Job> jobs;
  for (std::uint64_t seed : config.seeds) jobs.push_back({"IVAD", seed, &ivad, &test, nullptr});
  const std::vector<ResultRow> rows = run_jobs(config, jobs);
  merge_rows(config, rows);
  return rows;
}

Exp3Result run_exp3(const ExperimentConfig& config) {
  const Dataset sid = ensure_dataset(config, DatasetKind::Sid);
  const Dataset test = ensure_dataset(config, DatasetKind::Test);
  const Dataset objective_set = ensure_dataset(
      config, config.tpe.objective == "test" ? DatasetKind::Test : DatasetKind::Tune);

  const tpe::SearchSpace space = jitter_search_space();
  tpe::TpeConfig tpe_config{config.tpe.gamma, config.tpe.n_startup, config.tpe.n_candidates};
  tpe::TrialHistory history(derive_seed(config.seeds.front(), 0xb0daull));

  fs::create_directories(config.out_dir);
  std::ofstream log(trials_csv_path(config), std::ios::trunc);
  if (!log) throw std::runtime_error("cannot write " + trials_csv_path(config));
  log << "trial,brightness,contrast,saturation,hue,objective\n";

  Exp3Result result;
  int failures = 0;
  const int max_failures = config.tpe.n_trials / 10;
  for (int i = 0; i < config.tpe.n_trials; ++i) {
    const std::vector<double> point = tpe::ask(history, space, tpe_config);
    const JitterParams params = params_from_point(point);

    TrialRecord record;
    record.index = i;
    record.params = params;
    try {
      TrainConfig tc = config.train;
      tc.seed = config.seeds.front();
      tc.input_size = config.image_size;
      tc.threads = config.jobs;
      const TrainResult trained = train(sid, tc, jitter_augmentation(params));
      record.objective = evaluate(trained.model, objective_set, config.jobs).accuracy;
      tpe::tell(history, point, record.objective, space);
    } catch (const std::exception& e) {
      record.failed = true;
      record.objective = std::numeric_limits<double>::quiet_NaN();
      failures += 1;
      if (failures > max_failures) {
        throw std::runtime_error("exp3 aborted: trial " + std::to_string(i) + " failed (" +
                                 e.what() + ") and failure budget exhausted");
      }
    }
    result.trials.push_back(record);
    log << record.index << "," << format_fixed6(params.brightness) << ","
        << format_fixed6(params.contrast) << "," << format_fixed6(params.saturation) << ","
        << format_fixed6(params.hue) << "," << format_fixed6(record.objective) << "\n";
    log.flush();
  }
  if (history.trials().empty()) throw std::runtime_error("exp3 produced no successful trials");

  const tpe::Trial* best = &history.trials().front();
  for (const tpe::Trial& t : history.trials()) {
    if (t.objective > best->objective) best = &t;
  }
  result.best_params = params_from_point(best->params);

  std::vector<Job> jobs;
  const Augmentation aug = jitter_augmentation(result.best_params);
  for (std::uint64_t seed : config.seeds) jobs.push_back({"BO-DA", seed, &sid, &test, aug});
  result.rows = run_jobs(config, jobs);
  merge_rows(config, result.rows);

  std::ofstream best_out(config.out_dir + "/best_jitter.json", std::ios::trunc);
  best_out << nlohmann::json{{"brightness", result.best_params.brightness},
                             {"contrast", result.best_params.contrast},
                             {"saturation", result.best_params.saturation},
                             {"hue", result.best_params.hue},
                             {"objective", best->objective},
                             {"trial", best->index}}
                  .dump(2)
           << "\n";

  write_best_so_far_chart(result.trials, chart_path(config));
  return result;
}

void run_gen(const ExperimentConfig& config) {
  ensure_dataset(config, DatasetKind::Fsid);
  ensure_dataset(config, DatasetKind::Sid);
  ensure_dataset(config, DatasetKind::Test);
  ensure_dataset(config, DatasetKind::Tune);
  ensure_dataset(config, DatasetKind::Ivad);
}

void run_all(const ExperimentConfig& config) {
  run_gen(config);
  run_exp1(config);
  run_exp2(config);
  run_exp3(config);
  emit_report(config);
}

namespace {

void write_best_so_far_chart(const std::vector<TrialRecord>& trials, const std::string& path) {
  std::vector<double> best_so_far;
  double best = -std::numeric_limits<double>::infinity();
  for (const TrialRecord& t : trials) {
    if (!t.failed && t.objective > best) best = t.objective;
    best_so_far.push_back(best);
  }
  // Leading failed trials leave -inf; clamp them to the first finite value.
  double first_finite = 0.0;
  for (double v : best_so_far) {
    if (std::isfinite(v)) {
      first_finite = v;
      break;
    }
  }
  for (double& v : best_so_far) {
    if (!std::isfinite(v)) v = first_finite;
  }
  if (best_so_far.empty()) return;

  const double w = 640, h = 400, ml = 60, mr = 20, mt = 30, mb = 50;
  double lo = *std::min_element(best_so_far.begin(), best_so_far.end());
  double hi = *std::max_element(best_so_far.begin(), best_so_far.end());
  if (hi - lo < 1e-9) {
    lo -= 0.05;
    hi += 0.05;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;

  auto sx = [&](std::size_t i) {
    return ml + (w - ml - mr) * (best_so_far.size() == 1
                                     ? 0.5
                                     : static_cast<double>(i) / (best_so_far.size() - 1));
  };
  auto sy = [&](double v) { return h - mb - (h - mt - mb) * (v - lo) / (hi - lo); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  svg << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb
      << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\"" << h - mb
      << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = lo + (hi - lo) * k / 4.0;
    svg << "<text x=\"" << ml - 8 << "\" y=\"" << sy(v) + 4
        << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\">"
        << format_fixed6(v).substr(0, 5) << "</text>\n";
    svg << "<line x1=\"" << ml - 4 << "\" y1=\"" << sy(v) << "\" x2=\"" << ml << "\" y2=\"" << sy(v)
        << "\" stroke=\"black\"/>\n";
  }
  svg << "<text x=\"" << (w + ml - mr) / 2 << "\" y=\"" << h - 12
      << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">trial</text>\n";
  svg << "<text x=\"" << (w + ml - mr) / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\""
      << " font-family=\"sans-serif\">best objective so far</text>\n";
  svg << "<polyline fill=\"none\" stroke=\"#0b62a4\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < best_so_far.size(); ++i) {
    svg << sx(i) << "," << sy(best_so_far[i]) << " ";
  }
  svg << "\"/>\n</svg>\n";

  std::ofstream out(path, std::ios::trunc);
  out << svg.str();
}

}  // namespace

void emit_report(const ExperimentConfig& config) {
  const ResultStore store = ResultStore::load(results_csv_path(config));
  if (store.rows().empty()) {
    throw std::runtime_error("no result rows; run an experiment before report");
  }

  std::map<std::string, std::vector<const ResultRow*>> by_cond;
  for (const ResultRow& r : store.rows()) by_cond[r.condition].push_back(&r);

  std::ofstream out(config.out_dir + "/summary.md", std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write summary.md");
  out << "# Results summary\n\n";
  out << "| condition | seeds | acc (mean±std) | pre (mean±std) | rec (mean±std) |\n";
  out << "|---|---|---|---|---|\n";
  for (const char* cond : kConditionOrder) {
    const auto it = by_cond.find(cond);
    if (it == by_cond.end()) continue;
    auto stats = [&](auto getter) {
      double mean = 0;
      for (const ResultRow* r : it->second) mean += getter(*r);
      mean /= static_cast<double>(it->second.size());
      double var = 0;
      for (const ResultRow* r : it->second) {
        const double d = getter(*r) - mean;
        var += d * d;
      }
      var /= static_cast<double>(it->second.size());
      return std::pair<double, double>(mean, std::sqrt(var));
    };
    const auto acc = stats([](const ResultRow& r) { return r.accuracy; });
    const auto pre = stats([](const ResultRow& r) { return r.precision_weighted; });
    const auto rec = stats([](const ResultRow& r) { return r.recall_weighted; });
    out << "| " << cond << " | " << it->second.size() << " | " << format_fixed6(acc.first) << " ± "
        << format_fixed6(acc.second) << " | " << format_fixed6(pre.first) << " ± "
        << format_fixed6(pre.second) << " | " << format_fixed6(rec.first) << " ± "
        << format_fixed6(rec.second) << " |\n";
  }

  // Refresh the chart from the trial log when one exists.
  std::ifstream tin(trials_csv_path(config));
  if (tin) {
    std::vector<TrialRecord> trials;
    std::string line;
    bool header = true;
    while (std::getline(tin, line)) {
      if (line.empty()) continue;
      if (header) {
        header = false;
        continue;
      }
      const auto f = split_csv_line(line);
      if (f.size() != 6) continue;
      TrialRecord t;
      t.index = static_cast<int>(std::stol(f[0]));
      t.params = JitterParams{parse_double(f[1]), parse_double(f[2]), parse_double(f[3]),
                              parse_double(f[4])};
      t.objective = std::strtod(f[5].c_str(), nullptr);  // tolerates "nan"
      t.failed = !std::isfinite(t.objective);
      trials.push_back(t);
    }
    if (!trials.empty()) write_best_so_far_chart(trials, chart_path(config));
  }
}

}  // namespace ilg
