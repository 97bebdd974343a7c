#include "rntopo/weight.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <ostream>

namespace rntopo {

Weight::Weight(long num, long den) : value_(num, den == 0 ? 1 : den) {
  if (den == 0) throw std::invalid_argument("weight: zero denominator");
  value_.canonicalize();
  check_nonnegative();
}

Weight::Weight(mpq_class v) : value_(std::move(v)) {
  value_.canonicalize();
  check_nonnegative();
}

void Weight::check_nonnegative() const {
  if (sgn(value_) < 0) throw std::invalid_argument("weight: negative value " + value_.get_str());
}

Weight Weight::infinity() {
  Weight w;
  w.infinite_ = true;
  return w;
}

Weight Weight::power(const Weight& base, long exponent) {
  if (base.infinite_ || base.is_zero()) throw std::domain_error("weight: power of 0 or inf");
  mpz_class num, den;
  const unsigned long e = static_cast<unsigned long>(exponent < 0 ? -exponent : exponent);
  mpz_pow_ui(num.get_mpz_t(), base.value_.get_num_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), base.value_.get_den_mpz_t(), e);
  if (exponent < 0) std::swap(num, den);
  return Weight(mpq_class(num, den));
}

Weight Weight::parse(std::string_view text) {
  if (text == "inf" || text == "infinity") return infinity();
  std::string s(text);
  if (s.empty()) throw std::invalid_argument("malformed rational: empty string");
  for (char c : s) {
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '/'))
      throw std::invalid_argument("malformed rational: \"" + s + "\"");
  }
  const auto slash = s.find('/');
  if (slash != std::string::npos &&
      (slash == 0 || slash + 1 == s.size() || s.find('/', slash + 1) != std::string::npos))
    throw std::invalid_argument("malformed rational: \"" + s + "\"");
  mpq_class q;
  if (q.set_str(s, 10) != 0) throw std::invalid_argument("malformed rational: \"" + s + "\"");
  if (q.get_den() == 0) throw std::invalid_argument("malformed rational: zero denominator");
  return Weight(q);
}

const mpq_class& Weight::rational() const {
  if (infinite_) throw std::domain_error("weight: infinite value has no rational form");
  return value_;
}

std::string Weight::to_string() const {
  if (infinite_) return "inf";
  return value_.get_num().get_str() + "/" + value_.get_den().get_str();
}

double Weight::to_double() const {
  if (infinite_) return std::numeric_limits<double>::infinity();
  const double l = log2();
  if (l > 1023.0) return std::numeric_limits<double>::infinity();
  return value_.get_d();
}

double Weight::log2() const {
  if (infinite_) return std::numeric_limits<double>::infinity();
  if (is_zero()) return -std::numeric_limits<double>::infinity();
  long enum_ = 0, eden = 0;
  const double mn = mpz_get_d_2exp(&enum_, value_.get_num_mpz_t());
  const double md = mpz_get_d_2exp(&eden, value_.get_den_mpz_t());
  return std::log2(mn / md) + static_cast<double>(enum_ - eden);
}

Weight& Weight::operator+=(const Weight& o) {
  if (o.infinite_) infinite_ = true;
  if (infinite_) {
    value_ = 0;
    return *this;
  }
  value_ += o.value_;
  return *this;
}

Weight& Weight::operator*=(const Weight& o) {
  if (is_zero() || o.is_zero()) {
    *this = Weight();
    return *this;
  }
  if (o.infinite_) infinite_ = true;
  if (infinite_) {
    value_ = 0;
    return *this;
  }
  value_ *= o.value_;
  return *this;
}

Weight& Weight::operator/=(const Weight& o) {
  return *this *= o.reciprocal();
}

Weight Weight::reciprocal() const {
  if (infinite_) return Weight();
  if (is_zero()) return infinity();
  return Weight(mpq_class(1) / value_);
}

bool operator==(const Weight& a, const Weight& b) {
  if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
  return a.value_ == b.value_;
}

std::strong_ordering operator<=>(const Weight& a, const Weight& b) {
  if (a.infinite_ || b.infinite_) {
    if (a.infinite_ == b.infinite_) return std::strong_ordering::equal;
    return a.infinite_ ? std::strong_ordering::greater : std::strong_ordering::less;
  }
  const int c = cmp(a.value_, b.value_);
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const Weight& w) { return os << w.to_string(); }

Weight max(const Weight& a, const Weight& b) { return a < b ? b : a; }
Weight min(const Weight& a, const Weight& b) { return b < a ? b : a; }

}  // namespace rntopo
