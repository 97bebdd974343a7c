#include "rntopo/system.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

namespace rntopo {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Weight one_minus(const Weight& w) { return Weight(mpq_class(1) - w.rational()); }

void check_probability(const Weight& p) {
  if (p.is_infinite() || p.is_zero() || p >= Weight::one())
    throw std::invalid_argument("p must lie strictly between 0 and 1");
}

bool contains_symbol(const Word& w, Symbol s) { return std::find(w.begin(), w.end(), s) != w.end(); }

// r(s) = m(s) / m(S \ {s^-1}): the weight rho^x(s.x) of prepending s.
Weight prepend_ratio(const FreeBoundaryParams& fb, Symbol s) {
  return fb.m[s] / one_minus(fb.m[Alphabet::inverse(s)]);
}

}  // namespace

GeneratorSystem GeneratorSystem::shift(int k) {
  if (k < 2 || k > 10) throw std::invalid_argument("shift needs k in 2..10");
  return GeneratorSystem(ShiftParams{k});
}

GeneratorSystem GeneratorSystem::least_deletion(Weight p) {
  check_probability(p);
  return GeneratorSystem(LeastDeletionParams{std::move(p)});
}

GeneratorSystem GeneratorSystem::odometer(Weight p) {
  check_probability(p);
  return GeneratorSystem(OdometerParams{std::move(p)});
}

GeneratorSystem GeneratorSystem::free_boundary(int d, std::vector<Weight> m) {
  validate_measure(HittingMeasure{d, m});
  return GeneratorSystem(FreeBoundaryParams{d, std::move(m)});
}

GeneratorSystem GeneratorSystem::free_boundary_uniform(int d) {
  if (d < 2 || d > 26) throw std::invalid_argument("d must be in 2..26");
  return free_boundary(d, std::vector<Weight>(2 * d, Weight(1, 2 * d)));
}

GeneratorSystem::Kind GeneratorSystem::kind() const { return static_cast<Kind>(params_.index()); }

std::string GeneratorSystem::type_name() const {
  static const char* names[] = {"shift", "least_deletion", "odometer", "free_boundary"};
  return names[params_.index()];
}

Alphabet GeneratorSystem::alphabet() const { return alphabet_of(measure()); }

MeasureSpec GeneratorSystem::measure() const {
  return std::visit(overloaded{[](const ShiftParams& s) -> MeasureSpec { return UniformMeasure{s.k}; },
                               [](const LeastDeletionParams& s) -> MeasureSpec { return BernoulliMeasure{s.p}; },
                               [](const OdometerParams& s) -> MeasureSpec { return BernoulliMeasure{s.p}; },
                               [](const FreeBoundaryParams& s) -> MeasureSpec {
                                 return HittingMeasure{s.d, s.m};
                               }},
                    params_);
}

Weight GeneratorSystem::lambda() const {
  const Weight* p = nullptr;
  if (auto* ld = std::get_if<LeastDeletionParams>(&params_)) p = &ld->p;
  if (auto* od = std::get_if<OdometerParams>(&params_)) p = &od->p;
  if (!p) throw std::logic_error("lambda is defined only for the binary systems");
  return *p / one_minus(*p);
}

std::size_t GeneratorSystem::leading_run(const SymbolicPoint& x, Symbol s) {
  std::size_t n = 0;
  while (n < x.representation_length() && x.at(n) == s) ++n;
  if (n == x.representation_length()) {
    // the run covers the prefix and a whole period, so it never ends
    bool constant = std::all_of(x.period().begin(), x.period().end(), [s](Symbol c) { return c == s; });
    if (constant) return SymbolicPoint::npos;
    while (x.at(n) == s) ++n;
  }
  return n;
}

void GeneratorSystem::validate(const SymbolicPoint& x) const {
  if (!(x.alphabet() == alphabet())) throw DomainError("point alphabet does not match the system");
  switch (kind()) {
    case Kind::shift:
      if (x.period().size() == 1)
        throw DomainError("eventually constant sequence: its shift orbit ends in a fixed point");
      break;
    case Kind::least_deletion:
    case Kind::odometer:
      if (!contains_symbol(x.period(), 0) || !contains_symbol(x.period(), 1))
        throw DomainError("period must contain both 0 and 1");
      break;
    case Kind::free_boundary:
      if (x.period().size() == 1)
        throw DomainError("eventually constant word: its shift orbit ends in a fixed point");
      // prefix, prefix-period seam and period-period seam
      for (std::size_t i = 0; i + 1 < x.representation_length() + x.period().size(); ++i)
        if (x.at(i + 1) == Alphabet::inverse(x.at(i)))
          throw DomainError("word is not reduced at position " + std::to_string(i));
      break;
  }
}

void validate_for(const GeneratorSystem& system, const SymbolicPoint& x) { system.validate(x); }

SymbolicPoint GeneratorSystem::forward(const SymbolicPoint& x) const {
  validate(x);
  switch (kind()) {
    case Kind::shift:
    case Kind::free_boundary:
      return x.drop_first();
    case Kind::least_deletion:
      return x.with_coordinate(x.find(1), 0);
    case Kind::odometer: {
      const std::size_t n = leading_run(x, 1);
      Word head(n + 1, 0);
      head[n] = 1;
      return x.with_head(head);
    }
  }
  throw std::logic_error("unreachable");
}

std::vector<SymbolicPoint> GeneratorSystem::preimages(const SymbolicPoint& x) const {
  validate(x);
  std::vector<SymbolicPoint> out;
  switch (kind()) {
    case Kind::shift:
      for (int s = 0; s < alphabet().size; ++s) out.push_back(x.prepend(static_cast<Symbol>(s)));
      break;
    case Kind::free_boundary:
      for (int s = 0; s < alphabet().size; ++s)
        if (static_cast<Symbol>(s) != Alphabet::inverse(x.at(0))) out.push_back(x.prepend(static_cast<Symbol>(s)));
      break;
    case Kind::least_deletion: {
      const std::size_t m = x.find(1);
      for (std::size_t i = 0; i < m; ++i) out.push_back(x.with_coordinate(i, 1));
      break;
    }
    case Kind::odometer: {
      const std::size_t n = leading_run(x, 0);
      Word head(n + 1, 1);
      head[n] = 0;
      out.push_back(x.with_head(head));
      break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Weight GeneratorSystem::step_cocycle(const SymbolicPoint& x) const {
  validate(x);
  return std::visit(overloaded{[](const ShiftParams& s) { return Weight(s.k); },
                               [this](const LeastDeletionParams&) { return lambda().reciprocal(); },
                               [&](const OdometerParams&) {
                                 return Weight::power(lambda(), 1 - static_cast<long>(leading_run(x, 1)));
                               },
                               [&](const FreeBoundaryParams& fb) {
                                 return prepend_ratio(fb, x.at(0)).reciprocal();
                               }},
                    params_);
}

Weight GeneratorSystem::binary_cocycle(const SymbolicPoint& x, const SymbolicPoint& y) const {
  // Both binary systems relate exactly the tail-equivalent points of the domain.
  const std::size_t start = std::max(x.prefix().size(), y.prefix().size());
  const std::size_t px = x.period().size(), py = y.period().size();
  const std::size_t cycle = px / std::gcd(px, py) * py;
  for (std::size_t i = start; i < start + cycle; ++i)
    if (x.at(i) != y.at(i)) throw NotRelatedError(x.to_string() + " and " + y.to_string() + " are not tail-equivalent");
  long up = 0;
  for (std::size_t i = 0; i < start; ++i) {
    if (x.at(i) == 0 && y.at(i) == 1) ++up;
    if (x.at(i) == 1 && y.at(i) == 0) --up;
  }
  return Weight::power(lambda(), up);
}

Weight GeneratorSystem::join_cocycle(const SymbolicPoint& x, const SymbolicPoint& y) const {
  const std::size_t horizon = 8 * (x.representation_length() + y.representation_length());
  // weight rho^x(f^a x) for the first occurrence of each forward iterate
  std::unordered_map<SymbolicPoint, Weight, SymbolicPointHash> from_x;
  SymbolicPoint cur = x;
  Weight w = Weight::one();
  for (std::size_t a = 0; a <= horizon; ++a) {
    from_x.emplace(cur, w);
    w *= step_cocycle(cur);
    cur = cur.drop_first();
  }
  cur = y;
  w = Weight::one();
  for (std::size_t b = 0; b <= horizon; ++b) {
    if (auto it = from_x.find(cur); it != from_x.end()) return it->second / w;
    w *= step_cocycle(cur);
    cur = cur.drop_first();
  }
  throw NotRelatedError("no common forward iterate of " + x.to_string() + " and " + y.to_string() +
                        " within " + std::to_string(horizon) + " steps");
}

Weight GeneratorSystem::cocycle(const SymbolicPoint& x, const SymbolicPoint& y) const {
  validate(x);
  validate(y);
  if (x == y) return Weight::one();
  if (kind() == Kind::least_deletion || kind() == Kind::odometer) return binary_cocycle(x, y);
  return join_cocycle(x, y);
}

std::optional<MassCertificate> GeneratorSystem::back_orbit_certificate(const SymbolicPoint& x) const {
  validate(x);
  switch (kind()) {
    case Kind::shift:
      return MassCertificate::infinite("every back level has total weight 1");
    case Kind::least_deletion: {
      const long m = static_cast<long>(x.find(1));
      return MassCertificate::exact(Weight::power(Weight::one() + lambda(), m),
                                    "back orbit = raise any subset of the " + std::to_string(m) +
                                        " zeros before the first 1");
    }
    case Kind::odometer:
      return MassCertificate::infinite("f^{-j}(x) = x - j has weight >= 1 for infinitely many j");
    case Kind::free_boundary: {
      const auto& fb = std::get<FreeBoundaryParams>(params_);
      // level mass is a product of transfer matrices with rows sum_{s != a^-1} r(s)
      Weight min_row = Weight::infinity();
      for (int a = 0; a < alphabet().size; ++a) {
        Weight row;
        for (int s = 0; s < alphabet().size; ++s)
          if (s != Alphabet::inverse(static_cast<Symbol>(a))) row += prepend_ratio(fb, static_cast<Symbol>(s));
        min_row = min(min_row, row);
      }
      if (min_row >= Weight::one())
        return MassCertificate::infinite("every back level has total weight >= 1 (row sums >= 1)");
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::optional<MassCertificate> GeneratorSystem::forward_side_certificate(const SymbolicPoint& y) const {
  validate(y);
  switch (kind()) {
    case Kind::shift:
      return MassCertificate::infinite("forward ray weights k^n");
    case Kind::least_deletion:
      return MassCertificate::infinite("rho^y(f^n y) * P(f^n y) >= ((1 + lambda) / lambda)^n");
    case Kind::odometer:
      return MassCertificate::infinite("f^j(y) = y + j has weight >= 1 for infinitely many j");
    case Kind::free_boundary:
      return MassCertificate::infinite("each forward step multiplies the weight by at least 1/alpha > 1");
  }
  return std::nullopt;
}

std::optional<LevelDecay> GeneratorSystem::back_level_decay() const {
  switch (kind()) {
    case Kind::shift:
      return LevelDecay{Weight(1, std::get<ShiftParams>(params_).k), true};
    case Kind::free_boundary: {
      const auto& fb = std::get<FreeBoundaryParams>(params_);
      Weight alpha;
      for (int s = 0; s < alphabet().size; ++s) alpha = max(alpha, prepend_ratio(fb, static_cast<Symbol>(s)));
      return LevelDecay{alpha, false};
    }
    default:
      return std::nullopt;
  }
}

bool operator==(const GeneratorSystem& a, const GeneratorSystem& b) {
  if (a.kind() != b.kind()) return false;
  return std::visit(overloaded{[&](const ShiftParams& s) { return s.k == std::get<ShiftParams>(b.params_).k; },
                               [&](const LeastDeletionParams& s) {
                                 return s.p == std::get<LeastDeletionParams>(b.params_).p;
                               },
                               [&](const OdometerParams& s) { return s.p == std::get<OdometerParams>(b.params_).p; },
                               [&](const FreeBoundaryParams& s) {
                                 const auto& o = std::get<FreeBoundaryParams>(b.params_);
                                 return s.d == o.d && s.m == o.m;
                               }},
                    a.params_);
}

SymbolicPoint odometer_power(const SymbolicPoint& x, const mpz_class& j) {
  const Alphabet bin = Alphabet::digits(2);
  if (!(x.alphabet() == bin) || !contains_symbol(x.period(), 0) || !contains_symbol(x.period(), 1))
    throw DomainError("odometer points need both 0 and 1 in the period");
  const mpz_class mag = abs(j);
  const std::size_t bits = mpz_sizeinbase(mag.get_mpz_t(), 2);
  // past `start` the summand is 0 (or its borrow pattern); the carry dies at the first
  // 0 (resp. borrow at the first 1) of the period
  const std::size_t start = std::max(x.prefix().size(), bits);
  const std::size_t window = start + x.period().size() + 1;
  mpz_class value = 0;
  for (std::size_t i = window; i-- > 0;) {
    value <<= 1;
    if (x.at(i)) value += 1;
  }
  if (sgn(j) >= 0) {
    value += mag;
  } else {
    value -= mag;
  }
  if (sgn(value) < 0 || mpz_sizeinbase(value.get_mpz_t(), 2) > window)
    throw std::logic_error("odometer carry escaped its window");
  Word prefix(window);
  for (std::size_t i = 0; i < window; ++i) prefix[i] = mpz_tstbit(value.get_mpz_t(), i) ? 1 : 0;
  Word period(x.period().size());
  for (std::size_t i = 0; i < period.size(); ++i) period[i] = x.at(window + i);
  return SymbolicPoint(bin, std::move(prefix), std::move(period));
}

ReturnResult<SymbolicPoint> next_return(const GeneratorSystem& system, const CoordinatePredicate& target,
                                        const SymbolicPoint& x, ReturnMode mode, std::size_t budget) {
  system.validate(x);
  return first_iterate_in(
      system, [&](const SymbolicPoint& p) { return target.contains(p.head(target.length)); }, x, mode, budget);
}

SymbolicPoint cylinder_representative(const GeneratorSystem& system, LazyPoint& sample, std::size_t window) {
  Word prefix = sample.head(window);
  const Alphabet alphabet = system.alphabet();
  if (system.kind() != GeneratorSystem::Kind::free_boundary) return SymbolicPoint(alphabet, std::move(prefix), {0, 1});
  // period (t u): t continues the prefix, u avoids t and its inverse
  Symbol t = 0;
  if (!prefix.empty())
    while (t == Alphabet::inverse(prefix.back())) ++t;
  Symbol u = 0;
  while (u == t || u == Alphabet::inverse(t)) ++u;
  return SymbolicPoint(alphabet, std::move(prefix), {t, u});
}

}  // namespace rntopo
