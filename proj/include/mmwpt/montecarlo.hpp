#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mmwpt/analysis.hpp"
#include "mmwpt/bae.hpp"
#include "mmwpt/patterns.hpp"
#include "mmwpt/rng.hpp"

namespace mmwpt {

struct McConfig {
  std::uint64_t trials = 100000;
  double r_max = 0.0;        // 0 selects default_r_max()
  double r_min_field = 0.0;  // 0 for coverage runs, 1 m for mean-energy runs
  std::uint64_t seed = 1;
  AntennaPattern antenna = gaussian_from_beamwidth(0.2617993877991494);
  BaeModel bae_assoc = PerfectAlignment{};
  ChannelParams chan{};
  NetworkParams net{};
  EhModel eh = NonlinearEh{};
  bool disable_fading = false;  // forces h = 1 everywhere
  unsigned workers = 0;         // 0 = hardware concurrency

  void validate() const;
};

/// Trials are grouped in fixed blocks; block b draws from substream(seed, b), so
/// every result is independent of the worker count.
inline constexpr std::uint64_t kTrialBlock = 4096;

struct McEstimate {
  double mean = 0.0;
  double ci_halfwidth = 0.0;  // 95%
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::uint64_t trials = 0;
};

struct FieldPoint {
  double r = 0.0;
  bool los = false;
};

/// E{G(u) G(u')} for independent uniform angles.
double mean_gain_product(const AntennaPattern& pattern);

/// Smallest radius (>= 4 r0) whose closed-form tail bound on the mean field
/// energy is below rel_tail of the mean total energy.
double default_r_max(const McConfig& cfg, double rel_tail = 1e-4);

/// Nakagami-m power gain: Gamma(m, 1/m), unit mean.
double sample_fading(int m, Rng& rng);

/// Points of one field realization on the annulus [r_min_field, r_max].
std::vector<FieldPoint> sample_field(const McConfig& cfg, Rng& rng);

/// One draw of the total RF energy at the typical receiver.
double simulate_rf(const McConfig& cfg, Rng& rng);

/// All per-trial RF draws, in trial order.
std::vector<double> simulate_rf_trials(const McConfig& cfg);

McEstimate wilson_interval(std::uint64_t successes, std::uint64_t n);
McEstimate normal_interval(std::span<const double> values);

/// Fraction of trials with eh_dc(eps_RF) > eps_th, Wilson 95% interval.
McEstimate estimate_coverage(const McConfig& cfg, double eps_th);
/// One simulation shared by a whole threshold grid.
std::vector<McEstimate> estimate_coverage_curve(const McConfig& cfg, std::span<const double> eps_th);

/// Mean of eps_RF (linear rectifier) or eh_dc(eps_RF) (nonlinear).
McEstimate estimate_mean_energy(const McConfig& cfg);

/// Mean of eps_DC 1{eps_DC > eps_min}, the comparator of avg_dc_energy.
McEstimate estimate_thresholded_mean(const McConfig& cfg, double eps_min);

/// 1 - E{G(a) G(b)} / G(0)^2 for a, b drawn from the serving-link error law.
McEstimate estimate_rel(const McConfig& cfg);

}  // namespace mmwpt
