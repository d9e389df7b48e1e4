#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ilg/rng.hpp"

namespace ilg {
namespace tpe {

struct SearchSpace {
  struct Dim {
    std::string name;
    double lo = 0;
    double hi = 1;
  };
  std::vector<Dim> dims;
};

struct Trial {
  std::vector<double> params;
  double objective = 0;  // higher is better
  int index = 0;
};

struct TpeConfig {
  double gamma = 0.25;    // top fraction of trials modeled as "good"
  int n_startup = 10;     // uniform trials before the density model kicks in
  int n_candidates = 24;  // candidates drawn from l(x) per ask
};

// Ordered trial record plus the sampler's rng stream. ask() consumes
// randomness, tell() appends; the pair forms a sequential protocol.
class TrialHistory {
 public:
  explicit TrialHistory(std::uint64_t seed) : rng_(derive_seed(seed, 0x791e5ull)) {}

  const std::vector<Trial>& trials() const { return trials_; }
  std::vector<Trial>& trials() { return trials_; }
  Rng& rng() { return rng_; }

 private:
  std::vector<Trial> trials_;
  Rng rng_;
};

// Size of the "good" split: ceil(gamma * n), kept within [1, n-1].
std::size_t good_count(std::size_t n_trials, double gamma);

// Next point to evaluate. Uniform within bounds for the first n_startup
// trials; afterwards splits the history at the gamma-quantile of objective,
// fits per-dimension Parzen mixtures (one truncated-normal kernel per
// observation, bandwidth = distance to the farther adjacent observation
// floored at 1% and capped at 100% of the range, plus a uniform prior
// kernel, all weighted 1/(k+1)), draws n_candidates from the good density l
// and returns the candidate maximizing l(x)/g(x).
std::vector<double> ask(TrialHistory& history, const SearchSpace& space, const TpeConfig& config = {});

void tell(TrialHistory& history, const std::vector<double>& params, double objective,
          const SearchSpace& space);

// Thrown when the objective function fails; carries the trial index.
class ObjectiveError : public std::runtime_error {
 public:
  ObjectiveError(int trial_index, const std::string& what)
      : std::runtime_error("objective failed at trial " + std::to_string(trial_index) + ": " + what),
        trial_index_(trial_index) {}
  int trial_index() const { return trial_index_; }

 private:
  int trial_index_;
};

struct OptimizeResult {
  Trial best;
  std::vector<Trial> history;
};

using ObjectiveFn = std::function<double(const std::vector<double>&)>;

// Sequential ask/evaluate/tell loop; ties on the maximum go to the earliest
// trial. Deterministic given seed and a deterministic objective.
OptimizeResult optimize(const ObjectiveFn& objective, const SearchSpace& space, int n_trials = 200,
                        std::uint64_t seed = 0, const TpeConfig& config = {});

}  // namespace tpe
}  // namespace ilg
