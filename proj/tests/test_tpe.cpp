#include <doctest.h>

#include <cmath>

#include "ilg/rng.hpp"
#include "ilg/tpe.hpp"

using namespace ilg;
using namespace ilg::tpe;

namespace {

const SearchSpace kUnit{{{"x", 0.0, 1.0}}};

double quadratic(const std::vector<double>& x) {
  return -(x[0] - 0.3) * (x[0] - 0.3);
}

}  // namespace

TEST_CASE("startup asks are uniform within bounds") {
  const SearchSpace space{{{"a", -2.0, 3.0}, {"b", 0.0, 0.5}}};
  TrialHistory history(1);
  for (int i = 0; i < 10; ++i) {
    const auto p = ask(history, space);
    REQUIRE(p.size() == 2);
    CHECK(p[0] >= -2.0);
    CHECK(p[0] <= 3.0);
    CHECK(p[1] >= 0.0);
    CHECK(p[1] <= 0.5);
    tell(history, p, 0.1 * i, space);
  }
}

TEST_CASE("good split size follows ceil(gamma * n)") {
  CHECK(good_count(20, 0.25) == 5);
  CHECK(good_count(10, 0.25) == 3);  // ceil(2.5)
  CHECK(good_count(2, 0.25) == 1);
  CHECK(good_count(4, 0.9) == 3);  // capped at n-1
}

TEST_CASE("tell appends with strictly increasing indices and guards") {
  TrialHistory history(3);
  tell(history, {0.5}, 1.0, kUnit);
  CHECK(history.trials().size() == 1);
  for (int i = 1; i < 5; ++i) tell(history, {0.1 * i}, static_cast<double>(i), kUnit);
  for (int i = 0; i < 5; ++i) CHECK(history.trials()[i].index == i);

  CHECK_THROWS_AS(tell(history, {0.5}, std::nan(""), kUnit), std::invalid_argument);
  CHECK_THROWS_AS(tell(history, {1.5}, 0.0, kUnit), std::invalid_argument);
  CHECK_THROWS_AS(tell(history, {0.5, 0.5}, 0.0, kUnit), std::invalid_argument);
}

TEST_CASE("suggestions concentrate near the good cluster") {
  int near_good = 0;
  const int n_seeds = 100;
  for (int seed = 0; seed < n_seeds; ++seed) {
    TrialHistory history(seed);
    Rng jig(seed + 1000);
    // good cluster at 0.3 (high objective), bad cluster at 0.8
    for (int i = 0; i < 10; ++i) {
      tell(history, {0.3 + 0.01 * jig.uniform(-1.0, 1.0)}, 1.0 + 0.01 * i, kUnit);
    }
    for (int i = 0; i < 30; ++i) {
      tell(history, {0.8 + 0.01 * jig.uniform(-1.0, 1.0)}, 0.0 + 0.001 * i, kUnit);
    }
    const auto p = ask(history, kUnit);
    if (std::abs(p[0] - 0.3) < std::abs(p[0] - 0.8)) near_good += 1;
  }
  CHECK(near_good >= 90);
}

TEST_CASE("optimize on the 1-D quadratic beats random search") {
  const int n_trials = 50;
  int hits = 0;
  double tpe_mean_best = 0;
  double rand_mean_best = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const OptimizeResult res = optimize(quadratic, kUnit, n_trials, seed);
    CHECK(res.history.size() == n_trials);
    if (std::abs(res.best.params[0] - 0.3) < 0.05) hits += 1;
    tpe_mean_best += res.best.objective;

    Rng rng(derive_seed(seed, 0x12345ull));
    double best = -1e300;
    for (int i = 0; i < n_trials; ++i) best = std::max(best, quadratic({rng.uniform()}));
    rand_mean_best += best;

    // running maximum is non-decreasing
    double run = -1e300;
    for (const Trial& t : res.history) {
      run = std::max(run, t.objective);
      CHECK(run >= t.objective);
    }
  }
  CHECK(hits >= 18);
  CHECK(tpe_mean_best / 20.0 >= rand_mean_best / 20.0);
}

TEST_CASE("optimize is deterministic and ties go to the first trial") {
  const OptimizeResult a = optimize(quadratic, kUnit, 30, 7);
  const OptimizeResult b = optimize(quadratic, kUnit, 30, 7);
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].params == b.history[i].params);
    CHECK(a.history[i].objective == b.history[i].objective);
  }

  const OptimizeResult c = optimize([](const std::vector<double>&) { return 1.0; }, kUnit, 25, 3);
  CHECK(c.best.index == 0);  // constant objective: first seen wins
}

TEST_CASE("suggestions always stay within bounds") {
  const SearchSpace space{{{"x", 0.2, 0.4}}};
  TrialHistory history(9);
  Rng jig(1);
  // pile observations on the boundary to stress the truncation
  for (int i = 0; i < 40; ++i) {
    tell(history, {i % 2 == 0 ? 0.2 : 0.4}, jig.uniform(), space);
  }
  for (int i = 0; i < 200; ++i) {
    const auto p = ask(history, space);
    CHECK(p[0] >= 0.2);
    CHECK(p[0] <= 0.4);
  }
}

TEST_CASE("objective failures carry the trial index") {
  try {
    optimize(
        [](const std::vector<double>&) -> double { throw std::runtime_error("boom"); }, kUnit, 5,
        1);
    FAIL("expected ObjectiveError");
  } catch (const ObjectiveError& e) {
    CHECK(e.trial_index() == 0);
    CHECK(std::string(e.what()).find("boom") != std::string::npos);
  }
}
