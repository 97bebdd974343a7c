#include "rntopo/boundary_walk.hpp"

#include "rntopo/measure.hpp"
#include "rntopo/system.hpp"

#include <cmath>
#include <random>

namespace rntopo {

namespace {

// Reduced word of the walk position with the time each letter was last written.
struct WalkState {
  Word word;
  std::vector<std::size_t> written;
  std::size_t t = 0;
  // least stack height reached since the last snapshot
  std::size_t low_water = 0;

  void step(Symbol s) {
    ++t;
    if (!word.empty() && word.back() == Alphabet::inverse(s)) {
      word.pop_back();
      written.pop_back();
      low_water = std::min(low_water, word.size());
    } else {
      word.push_back(s);
      written.push_back(t);
    }
  }
  bool stable(std::size_t length, std::size_t k) const {
    return word.size() >= length && (length == 0 || written[length - 1] + k <= t);
  }
};

void check_walk_law(int d, const std::vector<Weight>& m) { validate_measure(HittingMeasure{d, m}); }

WalkState run_until_stable(const CategoricalSampler& draw, std::mt19937_64& rng, std::size_t k, std::size_t length,
                           std::size_t budget) {
  WalkState st;
  while (!st.stable(length, k)) {
    if (st.t >= budget)
      throw BudgetError("walk prefix did not stabilize within " + std::to_string(budget) + " steps", st.t);
    st.step(static_cast<Symbol>(draw(rng)));
  }
  return st;
}

}  // namespace

WalkSample random_walk_boundary_sample(int d, const std::vector<Weight>& m, std::uint64_t seed,
                                       std::size_t stability_window, std::size_t length, std::size_t step_budget) {
  check_walk_law(d, m);
  if (stability_window == 0) throw std::invalid_argument("stability window must be positive");
  const CategoricalSampler draw(m);
  std::mt19937_64 rng(seed);
  WalkState st = run_until_stable(draw, rng, stability_window, length, step_budget);
  return {Word(st.word.begin(), st.word.begin() + static_cast<std::ptrdiff_t>(length)), stability_window, st.t};
}

WalkCalibration calibrate_stability_window(int d, const std::vector<Weight>& m, std::uint64_t seed,
                                           std::size_t length, std::size_t pilot_walks, std::size_t initial,
                                           std::size_t step_budget) {
  check_walk_law(d, m);
  const CategoricalSampler draw(m);
  std::size_t k = std::max<std::size_t>(initial, 1);
  for (std::size_t round = 1;; ++round, k *= 2) {
    bool all_held = true;
    for (std::size_t i = 0; i < pilot_walks && all_held; ++i) {
      std::mt19937_64 rng(mix_seed(seed, i));
      WalkState st = run_until_stable(draw, rng, k, length, step_budget);
      st.low_water = st.word.size();
      for (std::size_t j = 0; j < 8 * k; ++j) st.step(static_cast<Symbol>(draw(rng)));
      all_held = st.low_water >= length;
    }
    if (all_held) return {k, pilot_walks, round};
    if (k > step_budget) throw BudgetError("stability window calibration did not converge", k);
  }
}

SpeedEstimate estimate_walk_speed(int d, const std::vector<Weight>& m, std::uint64_t seed, std::size_t walks,
                                  std::size_t steps) {
  check_walk_law(d, m);
  if (walks < 2 || steps == 0) throw std::invalid_argument("speed estimate needs >= 2 walks and >= 1 step");
  const CategoricalSampler draw(m);
  double sum = 0, sum_sq = 0;
  for (std::size_t i = 0; i < walks; ++i) {
    std::mt19937_64 rng(mix_seed(seed, i));
    WalkState st;
    for (std::size_t j = 0; j < steps; ++j) st.step(static_cast<Symbol>(draw(rng)));
    const double v = static_cast<double>(st.word.size()) / static_cast<double>(steps);
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(walks);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1));
  return {mean, std::sqrt(var / n), walks, steps};
}

}  // namespace rntopo
