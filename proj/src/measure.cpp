#include "rntopo/measure.hpp"

#include <algorithm>
#include <stdexcept>

namespace rntopo {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Integer weights over a common denominator for one categorical law.
std::vector<std::uint64_t> integer_cumulative(const std::vector<Weight>& probs, std::uint64_t& den_out) {
  mpz_class den = 1;
  for (const auto& p : probs) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), p.rational().get_den_mpz_t());
  if (den > mpz_class("9223372036854775807"))
    throw std::invalid_argument("probability denominators too large for exact sampling");
  std::vector<std::uint64_t> cum;
  mpz_class acc = 0;
  for (const auto& p : probs) {
    acc += p.rational().get_num() * (den / p.rational().get_den());
    cum.push_back(acc.get_ui());
  }
  den_out = den.get_ui();
  return cum;
}

}  // namespace

Weight HittingMeasure::transition(Symbol a, Symbol b) const {
  if (b == Alphabet::inverse(a)) return Weight();
  return m.at(b) / Weight(mpq_class(1) - m.at(Alphabet::inverse(a)).rational());
}

Alphabet alphabet_of(const MeasureSpec& measure) {
  return std::visit(overloaded{[](const BernoulliMeasure&) { return Alphabet::digits(2); },
                               [](const UniformMeasure& u) { return Alphabet::digits(u.k); },
                               [](const HittingMeasure& h) { return Alphabet::free_group(h.d); }},
                    measure);
}

void validate_measure(const MeasureSpec& measure) {
  std::visit(overloaded{[](const BernoulliMeasure& b) {
                          if (b.p.is_infinite() || b.p.is_zero() || b.p >= Weight::one())
                            throw std::invalid_argument("p must lie strictly between 0 and 1");
                        },
                        [](const UniformMeasure& u) {
                          if (u.k < 2 || u.k > 10) throw std::invalid_argument("k must be in 2..10");
                        },
                        [](const HittingMeasure& h) {
                          if (h.d < 2 || h.d > 26) throw std::invalid_argument("d must be in 2..26");
                          if (h.m.size() != static_cast<std::size_t>(2 * h.d))
                            throw std::invalid_argument("m needs one weight per generator and inverse");
                          Weight total;
                          for (std::size_t s = 0; s < h.m.size(); ++s) {
                            if (h.m[s].is_zero() || h.m[s].is_infinite())
                              throw std::invalid_argument("m must be strictly positive");
                            if (h.m[s] != h.m[s ^ 1]) throw std::invalid_argument("m must be symmetric");
                            total += h.m[s];
                          }
                          if (total != Weight::one()) throw std::invalid_argument("m must sum to 1");
                        }},
             measure);
}

Weight cylinder_mass(const MeasureSpec& measure, const Word& word) {
  const Alphabet alphabet = alphabet_of(measure);
  for (Symbol s : word)
    if (!alphabet.contains(s)) throw std::invalid_argument("symbol outside the measure's alphabet");
  return std::visit(
      overloaded{[&](const BernoulliMeasure& b) {
                   const Weight q(mpq_class(1) - b.p.rational());
                   Weight mass = Weight::one();
                   for (Symbol s : word) mass *= s ? b.p : q;
                   return mass;
                 },
                 [&](const UniformMeasure& u) {
                   return Weight::power(Weight(1, u.k), static_cast<long>(word.size()));
                 },
                 [&](const HittingMeasure& h) {
                   if (word.empty()) return Weight::one();
                   Weight mass = h.m.at(word[0]);
                   for (std::size_t i = 1; i < word.size(); ++i) {
                     if (word[i] == Alphabet::inverse(word[i - 1]))
                       throw std::invalid_argument("unreduced word for hitting measure");
                     mass *= h.transition(word[i - 1], word[i]);
                   }
                   return mass;
                 }},
      measure);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

LazyPoint::LazyPoint(MeasureSpec measure, std::uint64_t seed)
    : measure_(std::move(measure)), seed_(seed), rng_(seed) {
  validate_measure(measure_);
  // rows: one per previous symbol, plus a final row for the first coordinate
  std::visit(overloaded{[&](const BernoulliMeasure& b) {
                          cumulative_.push_back(integer_cumulative(
                              {Weight(mpq_class(1) - b.p.rational()), b.p}, denominator_));
                        },
                        [&](const UniformMeasure& u) {
                          cumulative_.push_back(
                              integer_cumulative(std::vector<Weight>(u.k, Weight(1, u.k)), denominator_));
                        },
                        [&](const HittingMeasure& h) {
                          // all rows share the denominator lcm; compute it via the row laws
                          std::vector<std::vector<Weight>> rows;
                          for (int a = 0; a < 2 * h.d; ++a) {
                            std::vector<Weight> row;
                            for (int b = 0; b < 2 * h.d; ++b)
                              row.push_back(h.transition(static_cast<Symbol>(a), static_cast<Symbol>(b)));
                            rows.push_back(std::move(row));
                          }
                          rows.push_back(h.m);
                          std::vector<Weight> all;
                          for (const auto& r : rows) all.insert(all.end(), r.begin(), r.end());
                          integer_cumulative(all, denominator_);  // fixes the shared denominator
                          for (const auto& r : rows) {
                            std::uint64_t den = 0;
                            auto cum = integer_cumulative(r, den);
                            const std::uint64_t scale = denominator_ / den;
                            for (auto& c : cum) c *= scale;
                            cumulative_.push_back(std::move(cum));
                          }
                        }},
             measure_);
}

Symbol LazyPoint::draw() {
  const std::vector<std::uint64_t>* row = &cumulative_.front();
  if (std::holds_alternative<HittingMeasure>(measure_))
    row = coords_.empty() ? &cumulative_.back() : &cumulative_[coords_.back()];
  std::uniform_int_distribution<std::uint64_t> dist(0, denominator_ - 1);
  const std::uint64_t u = dist(rng_);
  const auto it = std::upper_bound(row->begin(), row->end(), u);
  return static_cast<Symbol>(it - row->begin());
}

Symbol LazyPoint::at(std::size_t i) {
  while (coords_.size() <= i) coords_.push_back(draw());
  return coords_[i];
}

Word LazyPoint::head(std::size_t n) {
  if (n > 0) at(n - 1);
  return Word(coords_.begin(), coords_.begin() + static_cast<std::ptrdiff_t>(n));
}

std::size_t LazyPoint::find(Symbol s, std::size_t from, std::size_t limit) {
  for (std::size_t i = from; i < limit; ++i)
    if (at(i) == s) return i;
  throw std::runtime_error("symbol not found within the sampling limit");
}

CategoricalSampler::CategoricalSampler(const std::vector<Weight>& probabilities) {
  cumulative_ = integer_cumulative(probabilities, denominator_);
  if (cumulative_.empty() || cumulative_.back() != denominator_)
    throw std::invalid_argument("probabilities must sum to 1");
}

std::size_t CategoricalSampler::operator()(std::mt19937_64& rng) const {
  std::uniform_int_distribution<std::uint64_t> dist(0, denominator_ - 1);
  const std::uint64_t u = dist(rng);
  return static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), u) - cumulative_.begin());
}

LazyPoint sample_point(const MeasureSpec& measure, std::uint64_t seed) { return LazyPoint(measure, seed); }

CoordinatePredicate CoordinatePredicate::everything() {
  return {0, [](const Word&) { return true; }};
}

CoordinatePredicate CoordinatePredicate::cylinder(Word word) {
  const std::size_t n = word.size();
  return {n, [w = std::move(word)](const Word& head) { return std::equal(w.begin(), w.end(), head.begin()); }};
}

}  // namespace rntopo
