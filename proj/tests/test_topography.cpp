#include "oracles.hpp"
#include "rntopo/topography.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>

using namespace rntopo;

namespace {

const Alphabet bin = Alphabet::digits(2);
const Weight p23(2, 3), p13(1, 3);

SymbolicPoint pt(const std::string& prefix, const std::string& period, const Alphabet& a = bin) {
  return SymbolicPoint::parse(a, prefix, period);
}

Weight binom(long n, long k) {
  mpz_class c;
  mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return Weight(mpq_class(c));
}

// Plain BFS with a visited set; valid on acyclic systems.
std::map<SymbolicPoint, std::size_t> naive_ball(const GeneratorSystem& sys, const SymbolicPoint& x, std::size_t r) {
  std::map<SymbolicPoint, std::size_t> dist{{x, 0}};
  std::vector<SymbolicPoint> frontier{x};
  for (std::size_t d = 1; d <= r; ++d) {
    std::vector<SymbolicPoint> next;
    for (const auto& v : frontier) {
      std::vector<SymbolicPoint> nb = sys.preimages(v);
      nb.push_back(sys.forward(v));
      for (auto& u : nb)
        if (dist.emplace(u, d).second) next.push_back(u);
    }
    frontier = std::move(next);
  }
  return dist;
}

}  // namespace

TEST(Ball, MatchesNaiveSearchOnAcyclicSystems) {
  for (const auto& [sys, x] : {std::pair{GeneratorSystem::least_deletion(p23), pt("0010", "110")},
                               std::pair{GeneratorSystem::odometer(p13), pt("0110", "10")}}) {
    const auto ball = explore_ball(sys, x, 5);
    const auto naive = naive_ball(sys, x, 5);
    ASSERT_EQ(ball.size(), naive.size());
    for (const auto& v : ball.vertices) {
      ASSERT_EQ(naive.at(v.point), v.depth);
      ASSERT_EQ(v.weight, sys.cocycle(x, v.point));
    }
    std::size_t total = 0;
    for (const auto& s : ball.spheres) total += s.size();
    EXPECT_EQ(total, ball.size());
  }
}

TEST(Ball, UnrollsPeriodicCyclesOfTheShift) {
  // (10) and (01) form a 2-cycle; the ball follows non-backtracking paths
  const auto sh = GeneratorSystem::shift(2);
  const auto ball = explore_ball(sh, pt("", "10"), 3);
  // sizes: 1, 1 forward + 2 preimages, ...: every vertex but the base has 2 new neighbours
  EXPECT_EQ(ball.sphere_sizes(), (std::vector<std::size_t>{1, 3, 6, 12}));
}

TEST(Ball, BudgetIsEnforced) {
  const auto sh = GeneratorSystem::shift(3);
  EXPECT_THROW(explore_ball(sh, pt("", "120", Alphabet::digits(3)), 12, 1000), PartialBallError);
}

TEST(BackSpheres, ShiftLevelsWeighOne) {
  for (int k : {2, 3}) {
    const auto sh = GeneratorSystem::shift(k);
    const auto x = k == 2 ? pt("", "10") : pt("", "120", Alphabet::digits(3));
    for (std::size_t n = 0; n <= 6; ++n) {
      EXPECT_EQ(back_sphere_mass(sh, x, n), Weight::one());
      const auto tail = back_tail_sup(sh, x, n, n + 2);
      ASSERT_TRUE(tail.value);
      EXPECT_EQ(*tail.value, Weight::power(Weight(1, k), static_cast<long>(n)));
      EXPECT_TRUE(tail.exact);
    }
  }
}

TEST(BackSpheres, LeastDeletionLevelsAreBinomial) {
  const auto ld = GeneratorSystem::least_deletion(p23);
  const Weight lambda(2);
  for (long m = 0; m <= 7; ++m) {
    Word prefix(static_cast<std::size_t>(m), 0);
    prefix.push_back(1);
    const SymbolicPoint x(bin, prefix, {1, 0});
    Weight total;
    for (long n = 0; n <= m + 2; ++n) {
      const Weight expected = n <= m ? binom(m, n) * Weight::power(lambda, n) : Weight();
      ASSERT_EQ(back_sphere_mass(ld, x, static_cast<std::size_t>(n)), expected);
      total += expected;
    }
    const MassReport r = back_orbit_mass(ld, x, static_cast<std::size_t>(m) + 3);
    EXPECT_TRUE(r.exhausted);
    EXPECT_EQ(r.value(), total);
    ASSERT_TRUE(r.certificate);
    EXPECT_EQ(r.certificate->total, total);
    const TailSup tail = back_tail_sup(ld, x, static_cast<std::size_t>(m) + 1, static_cast<std::size_t>(m) + 3);
    EXPECT_FALSE(tail.value);
    EXPECT_TRUE(tail.exact);
  }
}

TEST(ForwardTrace, LeastDeletionGeometricSeries) {
  const auto ld = GeneratorSystem::least_deletion(p23);
  const auto t = forward_trace(ld, pt("", "10"), 40);
  ASSERT_EQ(t.rho.size(), 41u);
  for (long n = 0; n <= 40; ++n) {
    EXPECT_EQ(t.rho[n], Weight::power(Weight(1, 2), n));
    EXPECT_EQ(t.partial_sums[n], Weight(mpq_class(2) - Weight::power(Weight(1, 2), n).rational()));
  }
  const auto slow = forward_trace(GeneratorSystem::least_deletion(p13), pt("", "10"), 7);
  EXPECT_GT(slow.partial_sums[7], Weight(100));
}

TEST(HalfSpace, LayersAndCertificates) {
  const auto ld = GeneratorSystem::least_deletion(p23);
  const auto x = pt("001", "10");
  // back side of the edge x -> f(x): the whole back orbit of x, mass (1 + 2)^2
  const MassReport back = half_space_mass(ld, {x, ld.forward(x), true}, 6);
  EXPECT_EQ(back.lower_bounds[0], Weight());
  EXPECT_EQ(back.lower_bounds[1], Weight(1));
  EXPECT_TRUE(back.exhausted);
  EXPECT_EQ(back.value(), Weight(9));
  EXPECT_EQ(*back.upper_bound, Weight(9));
  // forward side of the edge x -> preimage: never exhausted, certified infinite
  const auto z = ld.preimages(x).front();
  const MassReport fwd = half_space_mass(ld, {x, z, false}, 6);
  EXPECT_FALSE(fwd.exhausted);
  EXPECT_EQ(fwd.certificate->kind, MassCertificate::Kind::infinite);
  EXPECT_THROW(half_space_mass(ld, {x, x, true}, 3), std::invalid_argument);
  // the two sides of an edge cover the ball: inside radius r they partition it
  const auto ball = explore_ball(ld, x, 4);
  Weight ball_mass;
  for (const auto& v : ball.vertices) ball_mass += v.weight;
  const MassReport near = half_space_mass(ld, {x, ld.forward(x), true}, 5);
  const MassReport far = half_space_mass(ld, {ld.forward(x), x, false}, 4);
  // far side is normalized at f(x); rescale to x
  EXPECT_EQ(near.lower_bounds[5] + far.lower_bounds[4] * ld.step_cocycle(x), ball_mass);
}

TEST(Probes, GreedyBackwardProbe) {
  const auto ld = GeneratorSystem::least_deletion(p23);
  const auto probe = probe_end(ld, pt("0001", "10"), StepDirection::backward, 10);
  EXPECT_TRUE(probe.ended);
  EXPECT_EQ(probe.points.size(), 4u);
  EXPECT_EQ(probe.rho.back(), Weight(8));
  const auto sh = probe_end(GeneratorSystem::shift(2), pt("", "10"), StepDirection::backward, 8);
  EXPECT_FALSE(sh.ended);
  EXPECT_EQ(sh.rho.back(), Weight(1, 256));
}

TEST(Core, ShiftIsFullLeastDeletionIsEmpty) {
  const auto sh = GeneratorSystem::shift(2);
  const auto full = rn_core_truncated(sh, pt("", "10"), 3, Weight(1000));
  EXPECT_TRUE(full.all_in_core());
  EXPECT_TRUE(verify_core_report(sh, full).empty());
  const auto ld = GeneratorSystem::least_deletion(p23);
  const auto empty = rn_core_truncated(ld, pt("", "10"), 3, Weight(1000));
  EXPECT_TRUE(empty.all_excluded());
  for (const auto& e : empty.entries) {
    ASSERT_TRUE(e.exclusion);
    EXPECT_TRUE(e.exclusion->certified);
  }
  EXPECT_TRUE(verify_core_report(ld, empty).empty());
}

TEST(Core, TamperedReportFailsVerification) {
  const auto ld = GeneratorSystem::least_deletion(p23);
  auto report = rn_core_truncated(ld, pt("", "10"), 2, Weight(1000));
  ASSERT_FALSE(report.entries.empty());
  report.entries[0].exclusion->total = report.entries[0].exclusion->total + Weight(1);
  EXPECT_FALSE(verify_core_report(ld, report).empty());
}

TEST(Classify, PaperExampleRows) {
  const std::map<std::string, std::string> expected = {
      {"shift", "forward nonvanishing / back vanishing / core full"},
      {"least_deletion", "forward nonvanishing / back orbits finite / core empty"},
      {"odometer", "two-sided oscillation / core full"},
      {"free_boundary", "forward nonvanishing / back decay / core full"}};
  const auto fb = GeneratorSystem::free_boundary_uniform(2);
  const std::vector<std::pair<GeneratorSystem, SymbolicPoint>> cases = {
      {GeneratorSystem::shift(2), pt("", "10")},
      {GeneratorSystem::least_deletion(p23), pt("", "10")},
      {GeneratorSystem::odometer(p13), pt("0110", "10")},
      {fb, pt("", "ab", fb.alphabet())}};
  for (const auto& [sys, x] : cases) {
    const ClassifyReport r = classify(sys, x);
    EXPECT_EQ(r.summary, expected.at(sys.type_name())) << sys.type_name();
  }
}

TEST(Oscillation, OdometerWitnessesAreGenuineIterates) {
  const auto od = GeneratorSystem::odometer(p13);
  const auto x = pt("0110", "10");
  for (int dir : {1, -1}) {
    const auto w = odometer_oscillation(od, x, dir, Weight(32), Weight(1, 32), 128);
    ASSERT_TRUE(w.found());
    EXPECT_GT(*w.high, Weight(32));
    EXPECT_LT(*w.low, Weight(1, 32));
    EXPECT_EQ(od.cocycle(x, odometer_power(x, *w.high_step)), *w.high);
    EXPECT_EQ(od.cocycle(x, odometer_power(x, *w.low_step)), *w.low);
    EXPECT_EQ(sgn(*w.high_step), dir);
    EXPECT_EQ(sgn(*w.low_step), dir);
  }
}

TEST(BackSpheres, FreeBoundaryLevelsObeyTheDecayBound) {
  // a/A weigh 1/8, b/B weigh 3/8; prepending s multiplies the weight by m(s) / (1 - m(s^-1))
  const std::vector<Weight> m{Weight(1, 8), Weight(1, 8), Weight(3, 8), Weight(3, 8)};
  const auto fb = GeneratorSystem::free_boundary(2, m);
  const Alphabet& a = fb.alphabet();
  auto ratio = [&](Symbol s) { return m[s] / Weight(mpq_class(1) - m[Alphabet::inverse(s)].rational()); };
  Weight alpha;
  for (Symbol s = 0; s < 4; ++s) alpha = max(alpha, ratio(s));
  ASSERT_EQ(fb.back_level_decay()->rate, alpha);
  for (const char* per : {"ab", "aB", "bA", "BBa"}) {
    const auto x = pt("", per, a);
    // level n of the back orbit: reduced words w with w x reduced
    std::vector<std::pair<Word, Weight>> level{{x.head(1), Weight::one()}};
    for (std::size_t n = 1; n <= 5; ++n) {
      std::vector<std::pair<Word, Weight>> next;
      std::optional<Weight> best;
      for (const auto& [w, r] : level)
        for (Symbol s = 0; s < 4; ++s) {
          if (s == Alphabet::inverse(w.front())) continue;
          Word v{s};
          v.insert(v.end(), w.begin(), w.end());
          const Weight rv = r * ratio(s);
          best = best ? max(*best, rv) : rv;
          next.emplace_back(std::move(v), rv);
        }
      level = std::move(next);
      const TailSup tail = back_tail_sup(fb, x, n, n);
      ASSERT_TRUE(tail.value);
      EXPECT_EQ(*tail.value, *best) << per << " n=" << n;
      EXPECT_LE(*tail.value, Weight::power(alpha, static_cast<long>(n)));
      EXPECT_EQ(*tail.certified_upper, Weight::power(alpha, static_cast<long>(n)));
      // attaining alpha^n at level n settles the sup over all deeper levels
      EXPECT_EQ(tail.exact, *tail.value == Weight::power(alpha, static_cast<long>(n)));
    }
  }
}
