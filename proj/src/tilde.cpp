#include "rntopo/tilde.hpp"

namespace rntopo {

std::string TildePoint::to_string() const {
  if (truncated) return x.to_string() + "|truncated";
  if (level) return "(" + x.to_string() + "," + std::to_string(*level) + ")";
  return x.to_string();
}

TildeSystem::TildeSystem(GeneratorSystem base, int n_max) : base_(std::move(base)), n_max_(n_max) {
  if (base_.kind() != GeneratorSystem::Kind::odometer && base_.kind() != GeneratorSystem::Kind::least_deletion)
    throw std::invalid_argument("tilde expansion supports only odometer and least_deletion bases");
  if (n_max_ < 1) throw std::invalid_argument("n_max must be at least 1");
}

Symbol TildeSystem::frontier_symbol() const { return base_.kind() == GeneratorSystem::Kind::odometer ? 1 : 0; }

std::size_t TildeSystem::level_of(const SymbolicPoint& x) const {
  return GeneratorSystem::leading_run(x, frontier_symbol());
}

Weight min_prefix_variant_cocycle(const GeneratorSystem& base, const SymbolicPoint& x, std::size_t n) {
  // rho^x(y) = lambda^(#{x_i=0,y_i=1} - #{x_i=1,y_i=0}); the exponent ranges over
  // [-ones, zeros] of x's first n coordinates
  long zeros = 0, ones = 0;
  for (std::size_t i = 0; i < n; ++i) (x.at(i) ? ones : zeros) += 1;
  const Weight lambda = base.lambda();
  return lambda >= Weight::one() ? Weight::power(lambda, -ones) : Weight::power(lambda, zeros);
}

Weight TildeSystem::density(const SymbolicPoint& x, int n) const {
  if (n < 0 || !in_level_set(x, static_cast<std::size_t>(n)))
    throw DomainError(x.to_string() + " is not in X_" + std::to_string(n));
  return Weight::power(Weight(1, 2), n) * min_prefix_variant_cocycle(base_, x, static_cast<std::size_t>(n));
}

Weight TildeSystem::level_measure(int n) const {
  if (n < 0) throw std::invalid_argument("negative level");
  const Weight p = std::get<BernoulliMeasure>(base_.measure()).p;
  const Weight q(mpq_class(1) - p.rational());
  // w_n is constant on X_n, so mu_n(X_n) = mu(X_n) * w_n
  const Weight mass_xn = Weight::power(frontier_symbol() ? p : q, n);
  const Weight lambda = base_.lambda();
  const Weight min_rho = frontier_symbol() ? min(Weight::one(), Weight::power(lambda, -n))
                                           : min(Weight::one(), Weight::power(lambda, n));
  return mass_xn * Weight::power(Weight(1, 2), n) * min_rho;
}

void TildeSystem::validate(const TildePoint& p) const {
  base_.validate(p.x);
  if (p.level) {
    if (*p.level < 0 || *p.level > n_max_) throw DomainError("level outside 0..n_max");
    if (!in_level_set(p.x, static_cast<std::size_t>(*p.level)))
      throw DomainError(p.to_string() + ": point is not in X_" + std::to_string(*p.level));
  }
}

TildePoint TildeSystem::forward(const TildePoint& p) const {
  validate(p);
  if (p.truncated) throw DomainError("the truncation marker has no image");
  if (!p.level) {
    const std::size_t n = level_of(p.x);
    if (n > static_cast<std::size_t>(n_max_)) return TildePoint::truncation(p.x);
    return TildePoint::tagged(p.x, static_cast<int>(n));
  }
  if (*p.level > 0) return TildePoint::tagged(p.x, *p.level - 1);
  return TildePoint::base(base_.forward(p.x));
}

std::vector<TildePoint> TildeSystem::preimages(const TildePoint& p) const {
  validate(p);
  std::vector<TildePoint> out;
  if (p.truncated) {
    // the marker is reached only from the base copy of a tower taller than n_max
    if (level_of(p.x) > static_cast<std::size_t>(n_max_)) out.push_back(TildePoint::base(p.x));
    return out;
  }
  if (!p.level) {
    for (auto& y : base_.preimages(p.x)) out.push_back(TildePoint::tagged(std::move(y), 0));
    return out;
  }
  const std::size_t n = level_of(p.x);
  const auto lvl = static_cast<std::size_t>(*p.level);
  if (lvl == n) {
    out.push_back(TildePoint::base(p.x));
  } else if (lvl == static_cast<std::size_t>(n_max_)) {
    out.push_back(TildePoint::truncation(p.x));
  } else {
    out.push_back(TildePoint::tagged(p.x, *p.level + 1));
  }
  return out;
}

Weight TildeSystem::point_density(const TildePoint& p) const {
  if (p.truncated) throw DomainError("the truncation marker carries no weight");
  return p.level ? density(p.x, *p.level) : Weight::one();
}

Weight TildeSystem::cocycle(const TildePoint& p, const TildePoint& q) const {
  validate(p);
  validate(q);
  return base_.cocycle(p.x, q.x) * point_density(q) / point_density(p);
}

Weight TildeSystem::step_cocycle(const TildePoint& p) const { return cocycle(p, forward(p)); }

ReturnResult<SymbolicPoint> TildeSystem::retract_to_level_set(const SymbolicPoint& x, std::size_t n,
                                                              std::size_t budget) const {
  base_.validate(x);
  return first_iterate_in(
      base_, [&](const SymbolicPoint& y) { return in_level_set(y, n); }, x, ReturnMode::retraction, budget);
}

}  // namespace rntopo
