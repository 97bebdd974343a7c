#pragma once

#include <gmpxx.h>

#include <compare>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rntopo {

/// Exact nonnegative rational extended with +infinity.
///
/// Cocycle values are always finite and strictly positive; masses (sums of
/// cocycle values over infinite sets) may be infinite.  Arithmetic follows
/// the usual conventions on [0, inf]: inf + a = inf, inf * a = inf for a > 0,
/// inf * 0 = 0 (measure-theoretic convention), a / inf = 0.
class Weight {
 public:
  Weight() : value_(0) {}
  Weight(long v) : value_(v) { check_nonnegative(); }  // NOLINT(implicit)
  Weight(long num, long den);
  explicit Weight(mpq_class v);

  static Weight infinity();
  static Weight zero() { return Weight(); }
  static Weight one() { return Weight(1); }
  /// base^exponent for a finite positive base; negative exponents allowed.
  static Weight power(const Weight& base, long exponent);

  /// Accepts "num/den", "num", or "inf".
  static Weight parse(std::string_view text);

  bool is_infinite() const { return infinite_; }
  bool is_finite() const { return !infinite_; }
  bool is_zero() const { return !infinite_ && sgn(value_) == 0; }

  /// Underlying rational; throws if infinite.
  const mpq_class& rational() const;

  /// "num/den" (always with a denominator) or "inf".
  std::string to_string() const;
  /// Truncated to the nearest double toward zero (within one ulp); +inf for
  /// infinite or out-of-range values.
  double to_double() const;
  /// log2 of the value, usable when to_double() over/underflows.
  double log2() const;

  Weight& operator+=(const Weight& o);
  Weight& operator*=(const Weight& o);
  Weight& operator/=(const Weight& o);

  friend Weight operator+(Weight a, const Weight& b) { return a += b; }
  friend Weight operator*(Weight a, const Weight& b) { return a *= b; }
  friend Weight operator/(Weight a, const Weight& b) { return a /= b; }
  /// Reciprocal; 1/inf = 0, 1/0 = inf.
  Weight reciprocal() const;

  friend bool operator==(const Weight& a, const Weight& b);
  friend std::strong_ordering operator<=>(const Weight& a, const Weight& b);

 private:
  void check_nonnegative() const;

  mpq_class value_;
  bool infinite_ = false;
};

std::ostream& operator<<(std::ostream& os, const Weight& w);

Weight max(const Weight& a, const Weight& b);
Weight min(const Weight& a, const Weight& b);

}  // namespace rntopo
