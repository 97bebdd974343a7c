#pragma once

#include "rntopo/system.hpp"

#include <compare>
#include <optional>
#include <string>
#include <vector>

namespace rntopo {

/// Point of the expanded space: a base point (level empty), a tagged copy (x, n), or
/// the truncation marker standing for a tower taller than n_max.
struct TildePoint {
  SymbolicPoint x;
  std::optional<int> level;
  bool truncated = false;

  static TildePoint base(SymbolicPoint p) { return {std::move(p), std::nullopt, false}; }
  static TildePoint tagged(SymbolicPoint p, int n) { return {std::move(p), n, false}; }
  static TildePoint truncation(SymbolicPoint p) { return {std::move(p), std::nullopt, true}; }
  bool is_base() const { return !level && !truncated; }

  /// "x", "(x,n)" or "x|truncated".
  std::string to_string() const;

  friend bool operator==(const TildePoint&, const TildePoint&) = default;
  friend auto operator<=>(const TildePoint& a, const TildePoint& b) {
    if (auto c = a.truncated <=> b.truncated; c != 0) return c;
    if (auto c = a.level <=> b.level; c != 0) return c;
    return a.x <=> b.x;
  }
};

/// Tower expansion of an odometer or least-deletion base g.
///
/// X_n is the set of base points beginning with n copies of the frontier symbol (1 for
/// the odometer, 0 for least deletion); F_n relates points agreeing from coordinate n on.
/// Each x in X_n \ X_{n+1} climbs to (x, n), descends through (x, n-1), ..., (x, 0), and
/// then continues to g(x).  The copy of X_n at level n carries the density
///   w_n(x) = 2^-n * min over y in [x]_{F_n} of rho^x(y).
class TildeSystem {
 public:
  using point_type = TildePoint;

  TildeSystem(GeneratorSystem base, int n_max);

  const GeneratorSystem& base() const { return base_; }
  int n_max() const { return n_max_; }
  Symbol frontier_symbol() const;
  /// Largest n with x in X_n.
  std::size_t level_of(const SymbolicPoint& x) const;
  bool in_level_set(const SymbolicPoint& x, std::size_t n) const { return level_of(x) >= n; }

  /// w_n(x) in closed form; x must lie in X_n.
  Weight density(const SymbolicPoint& x, int n) const;
  /// Total added measure mu_n(X_n) = integral of w_n over X_n.
  Weight level_measure(int n) const;

  void validate(const TildePoint& p) const;
  /// The truncation marker has no image (DomainError); its only preimage is the base copy.
  TildePoint forward(const TildePoint& p) const;
  std::vector<TildePoint> preimages(const TildePoint& p) const;
  Weight step_cocycle(const TildePoint& p) const;
  /// rho~^p(q) = rho^x(y) * w(q) / w(p), with weight 1 on base points.
  Weight cocycle(const TildePoint& p, const TildePoint& q) const;

  /// r_{g, X_n}(x): the first g-iterate (zero steps allowed) inside X_n.
  ReturnResult<SymbolicPoint> retract_to_level_set(const SymbolicPoint& x, std::size_t n,
                                                   std::size_t budget = 1u << 20) const;

 private:
  Weight point_density(const TildePoint& p) const;

  GeneratorSystem base_;
  int n_max_;
};

/// min over the 2^n points y agreeing with x from coordinate n on of rho^x(y), in closed
/// form (binary systems only).
Weight min_prefix_variant_cocycle(const GeneratorSystem& base, const SymbolicPoint& x, std::size_t n);

}  // namespace rntopo
