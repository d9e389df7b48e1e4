#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ilg/harness.hpp"

namespace {

struct CliOverrides {
  std::string config_path;
  std::string out_dir;
  std::vector<std::uint64_t> seeds;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int trials = -1;
  int images_per_cell = -1;
  int size = -1;
  std::string objective;
  bool paper_scale = false;
  int jobs = -1;
  bool deterministic_timing = false;
};

ilg::ExperimentConfig resolve_config(const CliOverrides& o) {
  ilg::ExperimentConfig config;
  if (!o.config_path.empty()) config = ilg::load_config(o.config_path);
  if (o.paper_scale) ilg::apply_paper_scale(config);
  if (!o.out_dir.empty()) config.out_dir = o.out_dir;
  if (!o.seeds.empty()) config.seeds = o.seeds;
  if (o.seed_set) config.seeds = {o.seed};
  if (o.trials >= 1) config.tpe.n_trials = o.trials;
  if (o.images_per_cell >= 1) config.images_per_cell = o.images_per_cell;
  if (o.size >= 4) config.image_size = o.size;
  if (!o.objective.empty()) config.tpe.objective = o.objective;
  if (o.jobs >= 1) config.jobs = o.jobs;
  if (o.deterministic_timing) config.deterministic_timing = true;
  return config;
}

void print_rows(const std::vector<ilg::ResultRow>& rows) {
  for (const auto& r : rows) {
    std::printf("%-6s seed=%llu acc=%.4f pre=%.4f rec=%.4f (%.1fs)\n", r.condition.c_str(),
                static_cast<unsigned long long>(r.seed), r.accuracy, r.precision_weighted,
                r.recall_weighted, r.wall_time_sec);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"illumgap: illumination-degradation study harness"};
  app.require_subcommand(1);

  CliOverrides o;
  app.add_option("--config", o.config_path, "JSON config file; flags override its values");
  app.add_option("--out", o.out_dir, "output directory");
  app.add_option("--seeds", o.seeds, "replication seeds (space separated)");
  auto* seed_opt = app.add_option("--seed", o.seed, "single replication seed");
  app.add_option("--trials", o.trials, "optimization trials for exp3");
  app.add_option("--images-per-cell", o.images_per_cell, "images per (setting, class) grid cell");
  app.add_option("--size", o.size, "image size in pixels (multiple of 4)");
  app.add_option("--objective", o.objective, "exp3 objective set: tune or test")
      ->check(CLI::IsMember({"tune", "test"}));
  app.add_flag("--paper-scale", o.paper_scale, "paper-scale builds (15000 images, 200 trials)");
  app.add_option("--jobs", o.jobs, "worker threads");
  app.add_flag("--deterministic-timing", o.deterministic_timing,
               "zero the wall_time column in results.csv");

  auto* gen = app.add_subcommand("gen", "build and persist all datasets");
  auto* exp1 = app.add_subcommand("exp1", "FSID vs SID generalization gap");
  auto* exp2 = app.add_subcommand("exp2", "gray-card vector-mapping augmentation (IVAD)");
  auto* exp3 = app.add_subcommand("exp3", "TPE-tuned color jitter (BO-DA)");
  auto* all = app.add_subcommand("all", "gen + exp1 + exp2 + exp3 + report");
  auto* report = app.add_subcommand("report", "re-emit summary and chart from stored results");
  for (auto* sub : {gen, exp1, exp2, exp3, all, report}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);
  o.seed_set = seed_opt->count() > 0;

  try {
    const ilg::ExperimentConfig config = resolve_config(o);
    if (gen->parsed()) {
      ilg::run_gen(config);
      std::printf("datasets ready under %s/data\n", config.out_dir.c_str());
    } else if (exp1->parsed()) {
      print_rows(ilg::run_exp1(config));
    } else if (exp2->parsed()) {
      print_rows(ilg::run_exp2(config));
    } else if (exp3->parsed()) {
      const ilg::Exp3Result res = ilg::run_exp3(config);
      std::printf("best jitter: b=%.4f c=%.4f s=%.4f h=%.4f\n", res.best_params.brightness,
                  res.best_params.contrast, res.best_params.saturation, res.best_params.hue);
      print_rows(res.rows);
    } else if (all->parsed()) {
      ilg::run_all(config);
      std::printf("report written under %s\n", config.out_dir.c_str());
    } else if (report->parsed()) {
      ilg::emit_report(config);
      std::printf("report written under %s\n", config.out_dir.c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
