#include "rntopo/symbolic_point.hpp"

#include <algorithm>
#include <numeric>

namespace rntopo {

Alphabet Alphabet::digits(int k) {
  if (k < 2 || k > 10) throw std::invalid_argument("digit alphabet needs 2..10 symbols");
  return {Kind::digits, k};
}

Alphabet Alphabet::free_group(int d) {
  if (d < 2 || d > 26) throw std::invalid_argument("free group needs 2..26 generators");
  return {Kind::free_group, 2 * d};
}

char Alphabet::render(Symbol s) const {
  if (kind == Kind::digits) return static_cast<char>('0' + s);
  return static_cast<char>((s & 1 ? 'A' : 'a') + s / 2);
}

Symbol Alphabet::parse_symbol(char c) const {
  int code = -1;
  if (kind == Kind::digits) {
    if (c >= '0' && c <= '9') code = c - '0';
  } else if (c >= 'a' && c <= 'z') {
    code = 2 * (c - 'a');
  } else if (c >= 'A' && c <= 'Z') {
    code = 2 * (c - 'A') + 1;
  }
  if (code < 0 || code >= size)
    throw InvalidPointError(std::string("invalid symbol '") + c + "' for alphabet of size " +
                            std::to_string(size));
  return static_cast<Symbol>(code);
}

std::string Alphabet::render(const Word& w) const {
  std::string out;
  out.reserve(w.size());
  for (Symbol s : w) out.push_back(render(s));
  return out;
}

Word Alphabet::parse(std::string_view text) const {
  Word w;
  w.reserve(text.size());
  for (char c : text) w.push_back(parse_symbol(c));
  return w;
}

SymbolicPoint::SymbolicPoint(Alphabet alphabet, Word prefix, Word period)
    : alphabet_(alphabet), prefix_(std::move(prefix)), period_(std::move(period)) {
  if (period_.empty()) throw InvalidPointError("empty period");
  for (Symbol s : prefix_)
    if (!alphabet_.contains(s)) throw InvalidPointError("symbol out of range in prefix");
  for (Symbol s : period_)
    if (!alphabet_.contains(s)) throw InvalidPointError("symbol out of range in period");
  canonicalize();
}

SymbolicPoint SymbolicPoint::parse(Alphabet alphabet, std::string_view prefix, std::string_view period) {
  return SymbolicPoint(alphabet, alphabet.parse(prefix), alphabet.parse(period));
}

void SymbolicPoint::canonicalize() {
  const std::size_t n = period_.size();
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p != 0) continue;
    bool periodic = true;
    for (std::size_t i = p; i < n && periodic; ++i) periodic = period_[i] == period_[i - p];
    if (periodic) {
      period_.resize(p);
      break;
    }
  }
  while (!prefix_.empty() && prefix_.back() == period_.back()) {
    std::rotate(period_.rbegin(), period_.rbegin() + 1, period_.rend());
    prefix_.pop_back();
  }
}

Symbol SymbolicPoint::at(std::size_t i) const {
  if (i < prefix_.size()) return prefix_[i];
  return period_[(i - prefix_.size()) % period_.size()];
}

Word SymbolicPoint::head(std::size_t n) const {
  Word w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = at(i);
  return w;
}

std::size_t SymbolicPoint::find(Symbol s) const {
  for (std::size_t i = 0; i < representation_length(); ++i)
    if (at(i) == s) return i;
  return npos;
}

SymbolicPoint SymbolicPoint::with_head(const Word& w) const {
  const std::size_t len = std::max(w.size(), prefix_.size());
  Word prefix = head(len);
  std::copy(w.begin(), w.end(), prefix.begin());
  Word period(period_.size());
  for (std::size_t i = 0; i < period.size(); ++i) period[i] = at(len + i);
  return SymbolicPoint(alphabet_, std::move(prefix), std::move(period));
}

SymbolicPoint SymbolicPoint::with_coordinate(std::size_t i, Symbol s) const {
  Word w = head(i + 1);
  w[i] = s;
  return with_head(w);
}

SymbolicPoint SymbolicPoint::prepend(Symbol s) const {
  Word prefix;
  prefix.reserve(prefix_.size() + 1);
  prefix.push_back(s);
  prefix.insert(prefix.end(), prefix_.begin(), prefix_.end());
  return SymbolicPoint(alphabet_, std::move(prefix), period_);
}

SymbolicPoint SymbolicPoint::drop_first() const {
  if (!prefix_.empty()) return SymbolicPoint(alphabet_, Word(prefix_.begin() + 1, prefix_.end()), period_);
  Word period = period_;
  std::rotate(period.begin(), period.begin() + 1, period.end());
  return SymbolicPoint(alphabet_, {}, std::move(period));
}

std::strong_ordering operator<=>(const SymbolicPoint& a, const SymbolicPoint& b) {
  if (auto c = a.alphabet_.size <=> b.alphabet_.size; c != 0) return c;
  // sequences agreeing this far agree forever
  const std::size_t pa = a.period_.size(), pb = b.period_.size();
  const std::size_t n = std::max(a.prefix_.size(), b.prefix_.size()) + pa / std::gcd(pa, pb) * pb;
  for (std::size_t i = 0; i < n; ++i)
    if (auto c = a.at(i) <=> b.at(i); c != 0) return c;
  return std::strong_ordering::equal;
}

std::string SymbolicPoint::to_string() const {
  return alphabet_.render(prefix_) + "(" + alphabet_.render(period_) + ")";
}

std::size_t SymbolicPointHash::operator()(const SymbolicPoint& p) const noexcept {
  std::size_t h = 1469598103934665603ull;
  auto mix = [&h](std::size_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  for (Symbol s : p.prefix()) mix(s);
  mix(0xff);
  for (Symbol s : p.period()) mix(s);
  return h;
}

}  // namespace rntopo
