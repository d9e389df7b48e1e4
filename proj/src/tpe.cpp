#include "ilg/tpe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ilg {
namespace tpe {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2*pi))

double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

// One dimension's Parzen mixture: truncated-normal kernels centered on the
// observations plus a uniform kernel over [lo, hi], equal weights 1/(k+1).
struct ParzenMixture {
  std::vector<double> mu;
  std::vector<double> sigma;
  std::vector<double> log_trunc_norm;  // log of each kernel's truncation mass
  double lo, hi;

  static ParzenMixture fit(std::vector<double> values, double lo, double hi) {
    ParzenMixture m;
    m.lo = lo;
    m.hi = hi;
    std::sort(values.begin(), values.end());
    const std::size_t k = values.size();
    const double range = hi - lo;
    m.mu = values;
    m.sigma.resize(k);
    m.log_trunc_norm.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
      // Bandwidth: distance to the farther adjacent observation; the grid
      // bounds stand in for the missing neighbor at the ends.
      const double left = i == 0 ? values[0] - lo : values[i] - values[i - 1];
      const double right = i + 1 == k ? hi - values[k - 1] : values[i + 1] - values[i];
      double s = std::max(left, right);
      s = std::clamp(s, 0.01 * range, range);
      m.sigma[i] = s;
      const double mass =
          normal_cdf((hi - values[i]) / s) - normal_cdf((lo - values[i]) / s);
      m.log_trunc_norm[i] = std::log(std::max(mass, 1e-300));
    }
    return m;
  }

  // log pdf of the equal-weight mixture at x.
  double log_pdf(double x) const {
    const std::size_t k = mu.size();
    const double log_w = -std::log(static_cast<double>(k + 1));
    // uniform prior kernel
    double best = log_w - std::log(hi - lo);
    std::vector<double> logs;
    logs.reserve(k + 1);
    logs.push_back(best);
    for (std::size_t i = 0; i < k; ++i) {
      const double z = (x - mu[i]) / sigma[i];
      const double lp = log_w - kLogSqrt2Pi - std::log(sigma[i]) - 0.5 * z * z - log_trunc_norm[i];
      logs.push_back(lp);
      best = std::max(best, lp);
    }
    double sum = 0.0;
    for (double lp : logs) sum += std::exp(lp - best);
    return best + std::log(sum);
  }

  // Draw from the mixture: pick a kernel uniformly (k observation kernels
  // plus the prior), then sample it, clamping to bounds.
  double sample(Rng& rng) const {
    const std::size_t k = mu.size();
    const std::uint64_t pick = rng.uniform_index(k + 1);
    if (pick == k) return rng.uniform(lo, hi);
    const double x = mu[pick] + sigma[pick] * rng.gaussian();
    return std::clamp(x, lo, hi);
  }
};

void check_params(const std::vector<double>& params, const SearchSpace& space) {
  if (params.size() != space.dims.size()) {
    throw std::invalid_argument("params dimension mismatch");
  }
  for (std::size_t d = 0; d < params.size(); ++d) {
    if (!(params[d] >= space.dims[d].lo && params[d] <= space.dims[d].hi)) {
      throw std::invalid_argument("params out of bounds in dimension " + space.dims[d].name);
    }
  }
}

}  // namespace

std::size_t good_count(std::size_t n_trials, double gamma) {
  const std::size_t g =
      static_cast<std::size_t>(std::ceil(gamma * static_cast<double>(n_trials)));
  return std::clamp<std::size_t>(g, 1, n_trials - 1);
}

std::vector<double> ask(TrialHistory& history, const SearchSpace& space, const TpeConfig& config) {
  const std::size_t ndim = space.dims.size();
  if (ndim == 0) throw std::invalid_argument("empty search space");
  Rng& rng = history.rng();

  const std::size_t n = history.trials().size();
  if (n < static_cast<std::size_t>(config.n_startup)) {
    std::vector<double> out(ndim);
    for (std::size_t d = 0; d < ndim; ++d) out[d] = rng.uniform(space.dims[d].lo, space.dims[d].hi);
    return out;
  }

  // Split at the gamma-quantile: top ceil(gamma*n) trials are "good".
  const std::size_t n_good = good_count(n, config.gamma);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return history.trials()[a].objective > history.trials()[b].objective;
  });

  std::vector<ParzenMixture> good(ndim), bad(ndim);
  for (std::size_t d = 0; d < ndim; ++d) {
    std::vector<double> good_vals, bad_vals;
    good_vals.reserve(n_good);
    bad_vals.reserve(n - n_good);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = history.trials()[order[i]].params[d];
      (i < n_good ? good_vals : bad_vals).push_back(v);
    }
    good[d] = ParzenMixture::fit(std::move(good_vals), space.dims[d].lo, space.dims[d].hi);
    bad[d] = ParzenMixture::fit(std::move(bad_vals), space.dims[d].lo, space.dims[d].hi);
  }

  std::vector<double> best_candidate;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < config.n_candidates; ++c) {
    std::vector<double> cand(ndim);
    double score = 0.0;
    for (std::size_t d = 0; d < ndim; ++d) {
      cand[d] = good[d].sample(rng);
      score += good[d].log_pdf(cand[d]) - bad[d].log_pdf(cand[d]);
    }
    if (score > best_score) {
      best_score = score;
      best_candidate = std::move(cand);
    }
  }
  return best_candidate;
}

void tell(TrialHistory& history, const std::vector<double>& params, double objective,
          const SearchSpace& space) {
  if (!std::isfinite(objective)) throw std::invalid_argument("objective must be finite");
  check_params(params, space);
  Trial t;
  t.params = params;
  t.objective = objective;
  t.index = static_cast<int>(history.trials().size());
  history.trials().push_back(std::move(t));
}

OptimizeResult optimize(const ObjectiveFn& objective, const SearchSpace& space, int n_trials,
                        std::uint64_t seed, const TpeConfig& config) {
  if (n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
  TrialHistory history(seed);
  for (int i = 0; i < n_trials; ++i) {
    const std::vector<double> params = ask(history, space, config);
    double value;
    try {
      value = objective(params);
    } catch (const std::exception& e) {
      throw ObjectiveError(i, e.what());
    }
    tell(history, params, value, space);
  }
  OptimizeResult result;
  result.history = history.trials();
  const Trial* best = &result.history.front();
  for (const Trial& t : result.history) {
    if (t.objective > best->objective) best = &t;
  }
  result.best = *best;
  return result;
}

}  // namespace tpe
}  // namespace ilg
