#pragma once

#include "rntopo/symbolic_point.hpp"
#include "rntopo/weight.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <variant>
#include <vector>

namespace rntopo {

/// i.i.d. coin flips on {0,1} with P(1) = p.
struct BernoulliMeasure {
  Weight p;
};

/// i.i.d. uniform symbols on {0,...,k-1}.
struct UniformMeasure {
  int k = 2;
};

/// Exit law on the free-group boundary of the random walk with step law m.
/// m is indexed by symbol code (see Alphabet::free_group).
struct HittingMeasure {
  int d = 2;
  std::vector<Weight> m;

  /// P(a, b) = m(b) / m(S \ {a^-1}) for b != a^-1, else 0.
  Weight transition(Symbol a, Symbol b) const;
};

using MeasureSpec = std::variant<BernoulliMeasure, UniformMeasure, HittingMeasure>;

Alphabet alphabet_of(const MeasureSpec& measure);
/// Throws std::invalid_argument for p outside (0,1), or m not a symmetric,
/// strictly positive probability vector.
void validate_measure(const MeasureSpec& measure);

/// Exact mass of the cylinder of sequences starting with `word`.  The empty word has
/// mass 1.  Throws std::invalid_argument for an unreduced word under a hitting measure.
Weight cylinder_mass(const MeasureSpec& measure, const Word& word);

/// splitmix64 finalizer; used to derive every per-sample and per-chunk seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

/// Sampled sequence whose coordinates are drawn on demand from the measure and
/// memoized, so each coordinate is fixed once queried.  Deterministic per seed.
/// Single-owner: not safe for concurrent queries.
class LazyPoint {
 public:
  LazyPoint(MeasureSpec measure, std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  const MeasureSpec& measure() const { return measure_; }
  Symbol at(std::size_t i);
  /// First n coordinates.
  Word head(std::size_t n);
  /// Index of the first coordinate equal to s at or after `from`.  Sampling continues
  /// until found; throws std::runtime_error after `limit` coordinates.
  std::size_t find(Symbol s, std::size_t from = 0, std::size_t limit = 1u << 20);
  std::size_t materialized() const { return coords_.size(); }

 private:
  Symbol draw();

  MeasureSpec measure_;
  std::uint64_t seed_;
  std::mt19937_64 rng_;
  Word coords_;
  // cumulative integer weights over a common denominator for categorical draws
  std::vector<std::vector<std::uint64_t>> cumulative_;
  std::uint64_t denominator_ = 1;
};

LazyPoint sample_point(const MeasureSpec& measure, std::uint64_t seed);

/// Exact categorical draws: probabilities are scaled to integers over their common
/// denominator, then sampled with a uniform integer draw.
class CategoricalSampler {
 public:
  explicit CategoricalSampler(const std::vector<Weight>& probabilities);
  std::size_t operator()(std::mt19937_64& rng) const;

 private:
  std::vector<std::uint64_t> cumulative_;
  std::uint64_t denominator_ = 1;
};

/// Membership test for a set determined by the first `length` coordinates.
struct CoordinatePredicate {
  std::size_t length = 0;
  std::function<bool(const Word&)> contains;

  static CoordinatePredicate everything();
  /// Sequences whose first coordinates equal `word`.
  static CoordinatePredicate cylinder(Word word);
};

}  // namespace rntopo
