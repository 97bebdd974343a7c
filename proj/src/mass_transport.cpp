#include "rntopo/mass_transport.hpp"

#include "rntopo/topography.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <thread>

namespace rntopo {

std::string TransportKernel::name() const {
  std::string base;
  switch (mode) {
    case Mode::zero: base = "zero"; break;
    case Mode::forward_indicator: base = "forward-indicator"; break;
    case Mode::inverse_mass: base = "inverse-mass"; break;
    case Mode::forward_band: base = "forward-band"; break;
  }
  return opposite_convention ? base + "+opposite" : base;
}

TransportKernel TransportKernel::parse(const std::string& name, std::size_t horizon) {
  std::string base = name;
  bool opposite = false;
  if (const auto pos = base.find("+opposite"); pos != std::string::npos && pos + 9 == base.size()) {
    base.resize(pos);
    opposite = true;
  }
  TransportKernel k;
  if (base == "zero") k = zero();
  else if (base == "forward-indicator") k = forward_indicator();
  else if (base == "inverse-mass") k = inverse_mass(horizon);
  else if (base == "forward-band") k = forward_band(horizon);
  else throw std::invalid_argument("unknown kernel '" + name + "'");
  k.opposite_convention = opposite;
  return k;
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("RNTOPO_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

double MTPEstimate::discrepancy_in_se() const {
  const double diff = std::fabs(sent_mean - received_mean);
  const double se = std::sqrt(sent_se * sent_se + received_se * received_se);
  if (se == 0) return diff == 0 ? 0 : std::numeric_limits<double>::infinity();
  return diff / se;
}

std::size_t dependency_window(const GeneratorSystem& system, const TransportKernel& kernel, LazyPoint& sample) {
  const std::size_t r = kernel.horizon;
  switch (system.kind()) {
    case GeneratorSystem::Kind::shift:
    case GeneratorSystem::Kind::free_boundary:
      return r + 2;
    case GeneratorSystem::Kind::least_deletion: {
      // P(f^j x) is fixed by the position of the (j+1)-th one
      const std::size_t ones = kernel.mode == TransportKernel::Mode::inverse_mass ? r + 1 : 1;
      std::size_t pos = 0;
      for (std::size_t i = 0; i < ones; ++i) pos = sample.find(1, i ? pos + 1 : 0);
      return pos + 2;
    }
    case GeneratorSystem::Kind::odometer: {
      // x +- j for |j| <= r: the carry stops at a 0, the borrow at a 1
      std::size_t bits = 1;
      while ((std::size_t{1} << bits) <= r + 1) ++bits;
      bits += 1;
      return std::max(sample.find(0, bits), sample.find(1, bits)) + 2;
    }
  }
  return r + 2;
}

namespace {

// 1 / P(y); nullopt when no certificate exists.
std::optional<Weight> inverse_back_mass(const GeneratorSystem& system, const SymbolicPoint& y) {
  const auto cert = system.back_orbit_certificate(y);
  if (!cert) return std::nullopt;
  return cert->total.reciprocal();
}

struct SampleValues {
  Weight sent, received;
};

std::optional<SampleValues> evaluate_sample(const GeneratorSystem& system, const TransportKernel& kernel,
                                            const SymbolicPoint& x, std::size_t budget) {
  using Mode = TransportKernel::Mode;
  SampleValues out;
  if (kernel.mode == Mode::zero) return out;
  const std::size_t jmin = kernel.mode == Mode::inverse_mass ? 0 : 1;

  // kernel value at (source, target = f^j(source)); nullopt when uncertifiable
  auto value = [&](const SymbolicPoint& target, std::size_t j) -> std::optional<Weight> {
    switch (kernel.mode) {
      case Mode::forward_indicator: return Weight(j == 1 ? 1 : 0);
      case Mode::forward_band: return Weight(1);
      case Mode::inverse_mass: return inverse_back_mass(system, target);
      case Mode::zero: break;
    }
    return Weight();
  };

  SymbolicPoint y = x;
  Weight rho = Weight::one();
  for (std::size_t j = 0; j <= kernel.horizon; ++j) {
    if (j >= jmin) {
      auto h = value(y, j);
      if (!h) return std::nullopt;
      out.sent += kernel.opposite_convention ? *h * rho : *h;
    }
    if (j == kernel.horizon) break;
    rho *= system.step_cocycle(y);
    y = system.forward(y);
  }

  // every source y in f^{-j}(x) sends the same value to x, so only level masses matter;
  // under the opposite convention the rho factors cancel and counts remain
  std::vector<std::optional<Weight>> level_value(kernel.horizon + 1);
  bool any = false;
  for (std::size_t j = jmin; j <= kernel.horizon; ++j) {
    level_value[j] = value(x, j);
    if (!level_value[j]) return std::nullopt;
    any = any || !level_value[j]->is_zero();
  }
  if (!any) return out;
  bool exhausted = false;
  const bool done = detail::walk_back_levels(system, x, kernel.horizon, budget, exhausted,
                                             [&](std::size_t j, const auto& items) {
                                               if (j < jmin) return;
                                               Weight level;
                                               for (const auto& it : items)
                                                 level += kernel.opposite_convention ? Weight::one() : it.weight;
                                               out.received += *level_value[j] * level;
                                             });
  if (!done) return std::nullopt;
  return out;
}

struct SideStats {
  long double sum = 0, sum_sq = 0;
  double lo = std::numeric_limits<double>::infinity(), hi = -std::numeric_limits<double>::infinity();
  std::size_t below_one = 0, equal_one = 0, above_one = 0;

  void add(const Weight& w) {
    const double v = w.to_double();
    sum += v;
    sum_sq += static_cast<long double>(v) * v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    const auto c = w <=> Weight::one();
    (c < 0 ? below_one : c == 0 ? equal_one : above_one) += 1;
  }
  void merge(const SideStats& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
    lo = std::min(lo, o.lo);
    hi = std::max(hi, o.hi);
    below_one += o.below_one;
    equal_one += o.equal_one;
    above_one += o.above_one;
  }
  // mean and standard error of the mean; exactly (v, 0) when every sample equals v
  std::pair<double, double> moments(std::size_t n) const {
    if (n == 0) return {0, 0};
    if (lo == hi) return {lo, 0};
    const long double mean = sum / n;
    if (n < 2) return {static_cast<double>(mean), 0};
    const long double var = std::max<long double>(0, (sum_sq - n * mean * mean) / (n - 1));
    return {static_cast<double>(mean), static_cast<double>(std::sqrt(var / n))};
  }
};

struct ChunkStats {
  SideStats sent, received;
  std::size_t used = 0, excluded = 0;
};

ChunkStats run_estimator(const GeneratorSystem& system, const TransportKernel& kernel, std::size_t samples,
                         std::uint64_t seed, const EstimatorOptions& options) {
  const std::size_t chunk = std::max<std::size_t>(options.chunk_size, 1);
  const std::size_t chunks = (samples + chunk - 1) / chunk;
  std::vector<ChunkStats> results(chunks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t c; (c = next.fetch_add(1)) < chunks;) {
      try {
        ChunkStats& st = results[c];
        for (std::size_t i = c * chunk; i < std::min(samples, (c + 1) * chunk); ++i) {
          LazyPoint sample(system.measure(), mix_seed(seed, i));
          const SymbolicPoint x =
              cylinder_representative(system, sample, dependency_window(system, kernel, sample));
          const auto v = evaluate_sample(system, kernel, x, options.vertex_budget);
          if (!v) {
            ++st.excluded;
            continue;
          }
          ++st.used;
          st.sent.add(v->sent);
          st.received.add(v->received);
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads ? options.threads : default_thread_count(),
                                                           static_cast<unsigned>(std::max<std::size_t>(chunks, 1))));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  ChunkStats total;
  for (const auto& r : results) {  // fixed reduction order
    total.sent.merge(r.sent);
    total.received.merge(r.received);
    total.used += r.used;
    total.excluded += r.excluded;
  }
  return total;
}

void check_horizon(const GeneratorSystem& system, const TransportKernel& kernel, const EstimatorOptions& options) {
  if (kernel.horizon > options.max_horizon)
    throw BudgetError("kernel horizon " + std::to_string(kernel.horizon) + " exceeds the maximum " +
                          std::to_string(options.max_horizon),
                      kernel.horizon);
  if (kernel.mode != TransportKernel::Mode::forward_indicator && kernel.mode != TransportKernel::Mode::forward_band)
    return;
  std::size_t branching = 0;
  if (system.kind() == GeneratorSystem::Kind::shift) branching = static_cast<std::size_t>(system.alphabet().size);
  if (system.kind() == GeneratorSystem::Kind::free_boundary)
    branching = static_cast<std::size_t>(system.alphabet().size - 1);
  long double tree = 1;
  for (std::size_t j = 0; j < kernel.horizon; ++j) tree *= branching ? branching : 1;
  if (branching && tree > static_cast<long double>(options.vertex_budget))
    throw BudgetError("backward tree of depth " + std::to_string(kernel.horizon) + " exceeds the vertex budget",
                      options.vertex_budget);
}

MTPEstimate make_estimate(const GeneratorSystem& system, const TransportKernel& kernel, std::uint64_t seed,
                          const EstimatorOptions& options, const ChunkStats& st) {
  MTPEstimate e;
  e.system = system.type_name();
  e.kernel = kernel.name();
  std::tie(e.sent_mean, e.sent_se) = st.sent.moments(st.used);
  std::tie(e.received_mean, e.received_se) = st.received.moments(st.used);
  e.samples = st.used;
  e.excluded = st.excluded;
  e.seed = seed;
  e.horizon = kernel.horizon;
  e.chunk_size = options.chunk_size;
  if (st.excluded) e.notes.push_back(std::to_string(st.excluded) + " samples excluded: no mass certificate or budget");
  return e;
}

}  // namespace

MTPEstimate estimate_mtp(const GeneratorSystem& system, const TransportKernel& kernel, std::size_t samples,
                         std::uint64_t seed, const EstimatorOptions& options) {
  check_horizon(system, kernel, options);
  return make_estimate(system, kernel, seed, options, run_estimator(system, kernel, samples, seed, options));
}

MTPEstimate verify_preimage_unit(const GeneratorSystem& system, std::size_t samples, std::uint64_t seed,
                                 const EstimatorOptions& options) {
  MTPEstimate e = estimate_mtp(system, TransportKernel::forward_indicator(), samples, seed, options);
  e.notes.push_back("received side = integral of rho^x(f^-1(x))");
  return e;
}

MTPEstimate verify_inverse_mass_sum(const GeneratorSystem& system, std::size_t samples, std::size_t horizon,
                                    std::uint64_t seed, const EstimatorOptions& options) {
  MTPEstimate e = estimate_mtp(system, TransportKernel::inverse_mass(horizon), samples, seed, options);
  e.notes.push_back("sent side = E[sum_{n<=horizon} 1/P(f^n x)]");
  return e;
}

BalanceSummary backward_balance_check(const GeneratorSystem& system, std::size_t samples, std::uint64_t seed,
                                      const EstimatorOptions& options) {
  const TransportKernel kernel = TransportKernel::forward_indicator();
  check_horizon(system, kernel, options);
  const ChunkStats st = run_estimator(system, kernel, samples, seed, options);
  BalanceSummary b;
  b.system = system.type_name();
  std::tie(b.mean, b.standard_error) = st.received.moments(st.used);
  b.samples = st.used;
  b.seed = seed;
  if (st.used) {
    const double n = static_cast<double>(st.used);
    b.fraction_below_one = static_cast<double>(st.received.below_one) / n;
    b.fraction_equal_one = static_cast<double>(st.received.equal_one) / n;
    b.fraction_above_one = static_cast<double>(st.received.above_one) / n;
  }
  const bool near_one = std::fabs(b.mean - 1) <= 3 * b.standard_error || (b.standard_error == 0 && b.mean == 1);
  const bool degenerate = st.received.equal_one == st.used;
  const bool two_sided = st.received.below_one > 0 && st.received.above_one > 0;
  b.consistent = near_one && (degenerate || two_sided);
  return b;
}

}  // namespace rntopo
