#include "rntopo/topography.hpp"

namespace rntopo {

namespace {

mpz_class low_bits_value(const SymbolicPoint& x, std::size_t t) {
  mpz_class v = 0;
  for (std::size_t i = t; i-- > 0;) {
    v <<= 1;
    if (x.at(i)) v += 1;
  }
  return v;
}

std::string back_label(const std::string& status) {
  if (status == "finite") return "back orbits finite";
  return "back " + status;
}

}  // namespace

OscillationWitness odometer_oscillation(const GeneratorSystem& system, const SymbolicPoint& x, int direction,
                                        const Weight& high, const Weight& low, std::size_t max_bits) {
  if (system.kind() != GeneratorSystem::Kind::odometer)
    throw std::invalid_argument("oscillation witnesses are defined for the odometer");
  if (direction != 1 && direction != -1) throw std::invalid_argument("direction must be +1 or -1");
  system.validate(x);
  OscillationWitness w;
  for (std::size_t t = 1; t <= max_bits && !w.found(); ++t) {
    const mpz_class low_t = low_bits_value(x, t);
    const mpz_class top = mpz_class(1) << static_cast<mp_bitcnt_t>(t);
    std::vector<mpz_class> steps;
    if (direction > 0) {
      steps = {top - low_t, top - 1 - low_t};  // clear, resp. fill, the low t coordinates
    } else {
      steps = {-low_t, -low_t - 1};
    }
    for (const auto& j : steps) {
      if (sgn(j) == 0) continue;
      const Weight rho = system.cocycle(x, odometer_power(x, j));
      if (!w.high && rho > high) {
        w.high = rho;
        w.high_step = j;
      }
      if (!w.low && rho < low) {
        w.low = rho;
        w.low_step = j;
      }
    }
    w.bits_used = t;
  }
  return w;
}

std::size_t calibrate_oscillation_bits(const GeneratorSystem& system, std::uint64_t seed, std::size_t pilots,
                                       const Weight& high, const Weight& low, std::size_t window) {
  std::size_t needed = 1;
  for (std::size_t i = 0; i < pilots; ++i) {
    LazyPoint sample(system.measure(), mix_seed(seed, i));
    const SymbolicPoint x = cylinder_representative(system, sample, window);
    const OscillationWitness w = odometer_oscillation(system, x, 1, high, low, window);
    if (!w.found()) throw BudgetError("pilot point without oscillation witness inside the window", window);
    needed = std::max(needed, w.bits_used);
  }
  return 2 * needed;
}

ClassifyReport classify(const GeneratorSystem& system, const SymbolicPoint& x, const ClassifyOptions& options) {
  system.validate(x);
  ClassifyReport rep;
  rep.system = system.type_name();
  rep.point = x.to_string();
  const Weight big = Weight::power(Weight(2), 5), small = Weight::power(Weight(2), -5);
  const bool odometer = system.kind() == GeneratorSystem::Kind::odometer;

  // forward end: the ray itself plus the heaviest backward probe hanging off each iterate
  rep.trace = forward_trace(system, x, options.trace_length);
  SymbolicPoint cur = x;
  for (std::size_t j = 0; j <= options.trace_length; ++j) {
    const auto probe = probe_end(system, cur, StepDirection::backward, odometer ? 0 : options.probe_depth);
    rep.forward_side_weights.push_back(rep.trace.rho[j] * probe.tail_sup[0]);
    if (j < options.trace_length) cur = system.forward(cur);
  }
  const std::size_t half = options.trace_length / 2;
  Weight ray_hi = rep.trace.rho[half], ray_lo = rep.trace.rho[half], side_hi;
  for (std::size_t j = half; j <= options.trace_length; ++j) {
    ray_hi = max(ray_hi, rep.trace.rho[j]);
    ray_lo = min(ray_lo, rep.trace.rho[j]);
    side_hi = max(side_hi, rep.forward_side_weights[j]);
  }
  if (odometer) {
    rep.forward_oscillation = odometer_oscillation(system, x, 1, big, small, options.oscillation_bits);
    if (rep.forward_oscillation->found()) {
      ray_hi = max(ray_hi, *rep.forward_oscillation->high);
      ray_lo = min(ray_lo, *rep.forward_oscillation->low);
    }
  }
  if (ray_hi > big && ray_lo < small) {
    rep.forward_status = "oscillating";
  } else {
    rep.forward_status = side_hi >= Weight::one() ? "nonvanishing" : "vanishing";
  }

  // back ends
  const auto back_cert = system.back_orbit_certificate(x);
  if (back_cert && back_cert->is_finite()) {
    rep.back_status = "finite";
  } else if (odometer) {
    rep.back_oscillation = odometer_oscillation(system, x, -1, big, small, options.oscillation_bits);
    rep.back_status = rep.back_oscillation->found() ? "oscillating" : "nonvanishing";
  }
  for (std::size_t n = 0; n <= options.back_depth && !odometer; ++n)
    rep.back_tail.push_back(back_tail_sup(system, x, n, options.back_depth, options.vertex_budget).value);
  if (rep.back_status.empty()) {
    if (auto decay = system.back_level_decay()) {
      rep.back_status = decay->exact ? "vanishing" : "decay";
    } else {
      const auto& last = rep.back_tail.back();
      rep.back_status = !last ? "finite" : (*last < small ? "vanishing" : "nonvanishing");
    }
  }

  const auto core = rn_core_truncated(system, x, options.core_radius, options.threshold, options.core_probe_depth,
                                      options.vertex_budget);
  rep.core_vertices = core.entries.size();
  rep.core_in = core.in_core_count();
  rep.core_status = core.all_in_core() ? "full" : core.all_excluded() ? "empty" : "partial";

  if (rep.forward_status == "oscillating" && rep.back_status == "oscillating") {
    rep.summary = "two-sided oscillation";
  } else {
    rep.summary = "forward " + rep.forward_status + " / " + back_label(rep.back_status);
  }
  rep.summary += " / core " + rep.core_status;
  return rep;
}

}  // namespace rntopo
