#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <span>
#include <vector>

#include "mmwpt/bae.hpp"
#include "mmwpt/patterns.hpp"
#include "mmwpt/rng.hpp"
#include "mmwpt/specfun.hpp"

namespace mmwpt {

/// Continuous piece of a gain law on [lo, hi]. When `sqrt_log_at_hi` is set the
/// density is regular(x) / sqrt(ln(hi / x)), an integrable spike at hi; otherwise
/// the density is regular(x).
struct GainSegment {
  double lo = 0.0;
  double hi = 0.0;
  bool sqrt_log_at_hi = false;
  std::function<double(double)> regular;

  double density(double x) const;
};

struct GainAtom {
  double location = 0.0;
  double mass = 0.0;
};

/// Which construction produced a distribution. Laws with a known closed form
/// for their moments are dispatched to it.
enum class GainLaw {
  Generic,
  Perfect,
  SingleExact,
  CascadedExact,
  CascadedApproxGaussian,  // mainlobe-only law for the associated link
  CascadedApproxUniform,   // three-part law for unassociated links
};

/// Mixed law of a normalized gain: density segments plus point atoms. Segments
/// may sum to less than one for the approximate constructions.
struct GainDistribution {
  std::vector<GainSegment> segments;
  std::vector<GainAtom> atoms;
  GainLaw law = GainLaw::Generic;
  GaussianPattern pattern{};
  double sigma = 0.0;  // Gaussian error scale when relevant
  double p0 = 1.0;     // mainlobe-hit probability of one side

  double density(double x) const;
  /// E{phi(X)} over segments and atoms (missing mass contributes nothing).
  double expect(const std::function<double(double)>& phi,
                specfun::Tolerance tol = {1e-14, 1e-11}) const;
  double total_mass() const;
  double continuous_mass() const;
  /// P(X <= x), counting atoms at x.
  double cdf(double x) const;
  /// P(X <= x_i) for an increasing grid, one quadrature per cell.
  std::vector<double> cdf(std::span<const double> grid) const;
};

GainDistribution perfect_gain();
GainDistribution single_gain_pdf(const GaussianPattern& pattern, const BaeModel& model);
GainDistribution cascaded_pdf_exact(const GaussianPattern& pattern, const BaeModel& model);
GainDistribution cascaded_pdf_approx(const GaussianPattern& pattern, const BaeModel& model);

/// Product of two independent normalized gains at BAE draws from `model`.
double sample_cascaded(const GaussianPattern& pattern, const BaeModel& model, Rng& rng);

/// E{X^z}. Closed forms are used for the approximate laws; everything else is
/// atoms plus quadrature. Throws std::domain_error for z <= 0.
double gain_moment(const GainDistribution& dist, double z);
/// Same quantity, always by atoms plus quadrature.
double gain_moment_quadrature(const GainDistribution& dist, double z);

/// Closed-form moment of the three-part uniform-error cascaded law.
double uniform_cascaded_moment(const GaussianPattern& pattern, double z);
/// Closed-form moment of the mainlobe-only Gaussian-error law.
double gaussian_cascaded_moment(const GaussianPattern& pattern, double sigma, double z);

/// E{(X/hi)^z ; lo < X <= hi} over the density segments of the three-part
/// uniform law (atoms excluded), in closed form. Requires g^2 <= lo < hi <= 1.
long double uniform_cascaded_partial_moment(const GaussianPattern& pattern, double z, double lo,
                                            double hi);
/// Continuous mass of the three-part uniform law on (lo, hi].
double uniform_cascaded_partial_mass(const GaussianPattern& pattern, double lo, double hi);

/// E{h^z} for h ~ Gamma(m, 1/m).
double fading_moment(int m, double z);

/// Kolmogorov-Smirnov distance between sorted samples and `dist`, with the
/// exact CDF evaluated at every `stride`-th order statistic (and on both sides
/// of every atom).
double ks_distance(std::span<const double> sorted_samples, const GainDistribution& dist,
                   std::size_t stride = 200);

/// Memoized chi_z = E{Omega^z} E{h^z} for LOS and NLOS fading orders.
class MomentTable {
 public:
  MomentTable(GainDistribution dist, int m_l, int m_n);

  double chi_l(double z) const;
  double chi_n(double z) const;
  double gain(double z) const;
  const GainDistribution& distribution() const { return dist_; }

 private:
  GainDistribution dist_;
  int m_l_;
  int m_n_;
  mutable std::mutex mu_;
  mutable std::map<double, double> cache_;
};

}  // namespace mmwpt
