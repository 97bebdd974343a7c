#pragma once

#include "rntopo/system.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rntopo {

/// Built-in transport kernels.  All are supported on forward pairs: h(x, y) can be
/// nonzero only when y = f^j(x) with j <= horizon, and the value depends on the target,
/// on j, and (for the opposite convention) on rho^x(y).
struct TransportKernel {
  enum class Mode { zero, forward_indicator, inverse_mass, forward_band };
  Mode mode = Mode::zero;
  std::size_t horizon = 0;
  /// g(x, y) = h(x, y) * rho^x(y): the other mass-orientation convention.
  bool opposite_convention = false;

  static TransportKernel zero() { return {Mode::zero, 0, false}; }
  /// h(x, y) = 1 iff y = f(x).
  static TransportKernel forward_indicator() { return {Mode::forward_indicator, 1, false}; }
  /// h(x, y) = 1 / P(y) for y = f^j(x), 0 <= j <= horizon.
  static TransportKernel inverse_mass(std::size_t horizon) { return {Mode::inverse_mass, horizon, false}; }
  /// h(x, y) = 1 for y = f^j(x), 1 <= j <= horizon.
  static TransportKernel forward_band(std::size_t horizon) { return {Mode::forward_band, horizon, false}; }
  TransportKernel opposite() const { return {mode, horizon, !opposite_convention}; }

  std::string name() const;
  static TransportKernel parse(const std::string& name, std::size_t horizon);
};

struct EstimatorOptions {
  unsigned threads = 0;           // 0: default_thread_count()
  std::size_t chunk_size = 1024;  // part of the determinism contract
  std::size_t vertex_budget = 1u << 20;  // per-sample backward enumeration
  std::size_t max_horizon = 64;
};

/// RNTOPO_THREADS if set, else the hardware concurrency.
unsigned default_thread_count();

struct MTPEstimate {
  std::string system;
  std::string kernel;
  double sent_mean = 0, sent_se = 0;
  double received_mean = 0, received_se = 0;
  std::size_t samples = 0;   // used in the means
  std::size_t excluded = 0;  // samples whose certificates were unavailable
  std::uint64_t seed = 0;
  std::size_t horizon = 0;
  std::size_t chunk_size = 0;
  std::vector<std::string> notes;

  /// |sent - received| in units of the combined standard error (inf if that is 0 and
  /// the means differ, 0 if both agree).
  double discrepancy_in_se() const;
};

/// Samples x from the system's measure and evaluates, at the same x,
///   sent(x)     = sum over y of h(x, y)
///   received(x) = sum over y of h(y, x) rho^x(y).
/// Sample i uses seed mix_seed(seed, i); chunks are reduced in index order.
MTPEstimate estimate_mtp(const GeneratorSystem& system, const TransportKernel& kernel, std::size_t samples,
                         std::uint64_t seed, const EstimatorOptions& options = {});

/// Received side of the forward indicator: the integral of rho^x(f^{-1}(x)).
MTPEstimate verify_preimage_unit(const GeneratorSystem& system, std::size_t samples, std::uint64_t seed,
                                 const EstimatorOptions& options = {});

/// Sent side of the inverse-mass kernel: E[ sum_{n <= horizon} 1 / P(f^n x) ].
MTPEstimate verify_inverse_mass_sum(const GeneratorSystem& system, std::size_t samples, std::size_t horizon,
                                    std::uint64_t seed, const EstimatorOptions& options = {});

struct BalanceSummary {
  std::string system;
  double mean = 0, standard_error = 0;
  double fraction_below_one = 0, fraction_equal_one = 0, fraction_above_one = 0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  /// mean within 3 SE of 1 and either degenerate at 1 or with mass on both sides.
  bool consistent = false;
};

/// Distribution of rho^x(f^{-1}(x)) under the system's measure.
BalanceSummary backward_balance_check(const GeneratorSystem& system, std::size_t samples, std::uint64_t seed,
                                      const EstimatorOptions& options = {});

/// Number of leading coordinates of a sample that determine every quantity the
/// estimator evaluates with this kernel.
std::size_t dependency_window(const GeneratorSystem& system, const TransportKernel& kernel, LazyPoint& sample);

}  // namespace rntopo
