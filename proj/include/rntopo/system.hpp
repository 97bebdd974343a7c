#pragma once

#include "rntopo/measure.hpp"
#include "rntopo/symbolic_point.hpp"
#include "rntopo/weight.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace rntopo {

struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NotRelatedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BudgetError : std::runtime_error {
  BudgetError(const std::string& what, std::size_t examined)
      : std::runtime_error(what), examined(examined) {}
  std::size_t examined;
};

/// Analytic statement about the total cocycle mass of an infinite vertex set.
struct MassCertificate {
  enum class Kind { infinite, total };
  Kind kind = Kind::infinite;
  Weight total;        // meaningful for Kind::total
  std::string reason;  // short human-readable justification

  static MassCertificate infinite(std::string why) { return {Kind::infinite, Weight::infinity(), std::move(why)}; }
  static MassCertificate exact(Weight w, std::string why) { return {Kind::total, std::move(w), std::move(why)}; }
  bool is_finite() const { return kind == Kind::total && total.is_finite(); }
};

/// Per-level bound on back-orbit weights.  `exact` means every vertex at back level j
/// weighs exactly rate^j, so truncated sups are the true sups.
struct LevelDecay {
  Weight rate;
  bool exact = false;
};

struct ShiftParams {
  int k = 2;
};
struct LeastDeletionParams {
  Weight p;
};
struct OdometerParams {
  Weight p;
};
struct FreeBoundaryParams {
  int d = 2;
  std::vector<Weight> m;  // indexed by symbol code, symmetric
};

/// One of the example dynamical systems: a forward map on eventually periodic
/// sequences together with its preimage enumerator, its Radon-Nikodym step cocycle
/// and its natural measure.
///
/// The tree T_f joins each point to its image.  Step cocycles are rho^x(f(x)).
class GeneratorSystem {
 public:
  enum class Kind { shift, least_deletion, odometer, free_boundary };
  using point_type = SymbolicPoint;

  static GeneratorSystem shift(int k);
  static GeneratorSystem least_deletion(Weight p);
  static GeneratorSystem odometer(Weight p);
  static GeneratorSystem free_boundary(int d, std::vector<Weight> m);
  static GeneratorSystem free_boundary_uniform(int d);

  Kind kind() const;
  /// "shift", "least_deletion", "odometer" or "free_boundary".
  std::string type_name() const;
  const auto& params() const { return params_; }
  Alphabet alphabet() const;
  MeasureSpec measure() const;
  /// lambda = p / (1 - p); only for the binary systems.
  Weight lambda() const;

  /// Throws DomainError naming the failed condition.
  void validate(const SymbolicPoint& x) const;
  SymbolicPoint forward(const SymbolicPoint& x) const;
  /// All y with forward(y) == x, sorted.
  std::vector<SymbolicPoint> preimages(const SymbolicPoint& x) const;
  /// rho^x(f(x)).
  Weight step_cocycle(const SymbolicPoint& x) const;
  /// rho^x(y) for related x, y; NotRelatedError if no join is found within
  /// 8 * (combined representation length) coordinates / iterates.
  Weight cocycle(const SymbolicPoint& x, const SymbolicPoint& y) const;

  // Analytic oracles.  Each returns nullopt when the system has no closed form.

  /// Mass rho^x(f^{-N}(x)) of the whole back orbit.
  std::optional<MassCertificate> back_orbit_certificate(const SymbolicPoint& x) const;
  /// Mass, normalized at y, of the half-space on the far side of the edge from y
  /// to one of its preimages z: everything except the back orbit of z.
  std::optional<MassCertificate> forward_side_certificate(const SymbolicPoint& y) const;
  /// A rate r < 1 with every vertex at back level j weighing at most r^j.
  std::optional<LevelDecay> back_level_decay() const;
  /// Number of leading symbols equal to s.
  static std::size_t leading_run(const SymbolicPoint& x, Symbol s);

  friend bool operator==(const GeneratorSystem&, const GeneratorSystem&);

 private:
  using Params = std::variant<ShiftParams, LeastDeletionParams, OdometerParams, FreeBoundaryParams>;
  explicit GeneratorSystem(Params p) : params_(std::move(p)) {}
  Weight binary_cocycle(const SymbolicPoint& x, const SymbolicPoint& y) const;
  Weight join_cocycle(const SymbolicPoint& x, const SymbolicPoint& y) const;

  Params params_;
};

/// Free-function form of GeneratorSystem::validate.
void validate_for(const GeneratorSystem& system, const SymbolicPoint& x);

/// Odometer power f^j(x) for any integer j (negative = inverse iterates), computed
/// as 2-adic addition.  Throws DomainError if x is not an odometer point.
SymbolicPoint odometer_power(const SymbolicPoint& x, const mpz_class& j);

enum class ReturnMode { next_return, retraction };

template <class Point>
struct ReturnResult {
  Point point;
  std::size_t steps = 0;
};

/// First forward iterate f^n(x) satisfying `in_target`, with n >= 1 for next-return
/// and n >= 0 for retraction.  Throws BudgetError after `budget` iterates.
template <class System, class Membership>
ReturnResult<typename System::point_type> first_iterate_in(const System& system, Membership&& in_target,
                                                          typename System::point_type x, ReturnMode mode,
                                                          std::size_t budget) {
  std::size_t steps = 0;
  if (mode == ReturnMode::retraction && in_target(x)) return {std::move(x), 0};
  while (steps < budget) {
    x = system.forward(x);
    ++steps;
    if (in_target(x)) return {std::move(x), steps};
  }
  throw BudgetError("target set not reached within " + std::to_string(budget) + " iterates", steps);
}

ReturnResult<SymbolicPoint> next_return(const GeneratorSystem& system, const CoordinatePredicate& target,
                                        const SymbolicPoint& x, ReturnMode mode, std::size_t budget);

/// Projection of a sampled sequence onto an eventually periodic point that agrees with
/// it on the first `window` coordinates.  The tail is a short period that keeps the
/// point inside the system's domain; callers choose `window` so that the quantity they
/// evaluate depends only on those coordinates.
SymbolicPoint cylinder_representative(const GeneratorSystem& system, LazyPoint& sample, std::size_t window);

}  // namespace rntopo
