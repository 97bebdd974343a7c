#pragma once

#include "rntopo/symbolic_point.hpp"
#include "rntopo/weight.hpp"

#include <cstdint>
#include <vector>

namespace rntopo {

struct WalkSample {
  Word prefix;                    // reduced, length = requested target length
  std::size_t stability_window;   // K actually used
  std::size_t steps = 0;          // walk steps until the prefix was accepted
};

/// Simulates the m-random walk on the free group F_d, tracking the reduced word, and
/// accepts the first `length` letters once none of them has changed for K consecutive
/// steps.  Throws BudgetError if this does not happen within `step_budget` steps.
WalkSample random_walk_boundary_sample(int d, const std::vector<Weight>& m, std::uint64_t seed,
                                       std::size_t stability_window, std::size_t length,
                                       std::size_t step_budget = 1u << 22);

struct WalkCalibration {
  std::size_t stability_window = 0;
  std::size_t pilot_walks = 0;
  std::size_t rounds = 0;
};

/// Pilot calibration of K: starting from `initial`, run `pilot_walks` walks, continue
/// each accepted walk for 8K further steps, and double K until no pilot prefix changes
/// during the extension.
WalkCalibration calibrate_stability_window(int d, const std::vector<Weight>& m, std::uint64_t seed,
                                           std::size_t length, std::size_t pilot_walks = 200,
                                           std::size_t initial = 8, std::size_t step_budget = 1u << 22);

struct SpeedEstimate {
  double mean = 0;  // reduced length / steps
  double standard_error = 0;
  std::size_t walks = 0;
  std::size_t steps = 0;
};

/// Mean distance from the identity per step after `steps` steps, over `walks` walks
/// seeded from mix_seed(seed, i).
SpeedEstimate estimate_walk_speed(int d, const std::vector<Weight>& m, std::uint64_t seed, std::size_t walks,
                                  std::size_t steps);

}  // namespace rntopo
