#include "rntopo/boundary_walk.hpp"
#include "rntopo/measure.hpp"
#include "rntopo/system.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

using namespace rntopo;

namespace {

std::vector<Weight> uniform(int d) { return std::vector<Weight>(2 * d, Weight(1, 2 * d)); }

bool reduced(const Word& w) {
  for (std::size_t i = 1; i < w.size(); ++i)
    if (w[i] == Alphabet::inverse(w[i - 1])) return false;
  return true;
}

}  // namespace

TEST(BoundaryWalk, RejectsBadLaws) {
  EXPECT_THROW(random_walk_boundary_sample(2, {Weight(1, 2), Weight(1, 2)}, 1, 8, 2), std::invalid_argument);
  EXPECT_THROW(random_walk_boundary_sample(2, {Weight(1, 8), Weight(3, 8), Weight(1, 4), Weight(1, 4)}, 1, 8, 2),
               std::invalid_argument);
  EXPECT_THROW(random_walk_boundary_sample(2, uniform(2), 1, 0, 2), std::invalid_argument);
  EXPECT_THROW(estimate_walk_speed(2, uniform(2), 1, 1, 10), std::invalid_argument);
}

TEST(BoundaryWalk, SamplesAreReducedAndDeterministic) {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto a = random_walk_boundary_sample(3, uniform(3), s, 16, 5);
    const auto b = random_walk_boundary_sample(3, uniform(3), s, 16, 5);
    ASSERT_EQ(a.prefix, b.prefix);
    ASSERT_EQ(a.steps, b.steps);
    ASSERT_EQ(a.prefix.size(), 5u);
    ASSERT_TRUE(reduced(a.prefix));
    ASSERT_GE(a.steps, 5u + 16u);
  }
}

TEST(BoundaryWalk, BudgetIsEnforced) {
  EXPECT_THROW(random_walk_boundary_sample(2, uniform(2), 3, 1000, 4, 100), BudgetError);
}

TEST(BoundaryWalk, CalibratedWindowIsStable) {
  const auto cal = calibrate_stability_window(2, uniform(2), 9, 2, 100);
  EXPECT_GE(cal.stability_window, 8u);
  EXPECT_EQ(cal.pilot_walks, 100u);
  const auto again = calibrate_stability_window(2, uniform(2), 9, 2, 100);
  EXPECT_EQ(again.stability_window, cal.stability_window);
  // 100 clean pilots bound the failure rate near 3%; a much longer window rarely changes the prefix
  int changed = 0;
  for (std::uint64_t s = 0; s < 500; ++s) {
    const auto a = random_walk_boundary_sample(2, uniform(2), mix_seed(5, s), cal.stability_window, 2);
    const auto b = random_walk_boundary_sample(2, uniform(2), mix_seed(5, s), 8 * cal.stability_window, 2);
    changed += !std::ranges::equal(a.prefix, b.prefix);
  }
  EXPECT_LE(changed, 25);
}

TEST(BoundaryWalk, CylinderFrequenciesMatchHittingMeasure) {
  const int d = 2;
  const HittingMeasure mu{d, uniform(d)};
  const std::size_t walks = 4000;
  std::map<Symbol, std::size_t> first_letters;
  std::map<Word, std::size_t> pairs;
  for (std::uint64_t s = 0; s < walks; ++s) {
    const auto w = random_walk_boundary_sample(d, mu.m, mix_seed(77, s), 16, 2);
    ++first_letters[w.prefix[0]];
    ++pairs[w.prefix];
  }
  std::vector<std::pair<Word, std::size_t>> firsts;
  for (const auto& [s, c] : first_letters) firsts.emplace_back(Word(1, s), c);
  ASSERT_EQ(firsts.size(), 4u);
  ASSERT_EQ(pairs.size(), 12u);
  for (const auto& counts : {firsts, std::vector<std::pair<Word, std::size_t>>(pairs.begin(), pairs.end())})
    for (const auto& [word, c] : counts) {
      const double p = cylinder_mass(mu, word).to_double();
      const double se = std::sqrt(p * (1 - p) / walks);
      EXPECT_NEAR(static_cast<double>(c) / walks, p, 4 * se) << Alphabet::free_group(d).render(word);
    }
}

TEST(BoundaryWalk, SpeedOfUniformWalk) {
  // away from the identity the length moves +1 w.p. (2d-1)/2d and -1 w.p. 1/2d
  for (int d : {2, 3}) {
    const auto a = estimate_walk_speed(d, uniform(d), 1, 400, 2000);
    const auto b = estimate_walk_speed(d, uniform(d), 2, 400, 2000);
    const double expected = static_cast<double>(d - 1) / d;
    EXPECT_NEAR(a.mean, expected, 4 * a.standard_error + 2e-3);
    EXPECT_NEAR(a.mean, b.mean, 4 * std::hypot(a.standard_error, b.standard_error));
    EXPECT_EQ(a.walks, 400u);
  }
}
