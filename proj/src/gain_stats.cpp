#include "mmwpt/gain_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mmwpt/specfun.hpp"

namespace mmwpt {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr specfun::Tolerance kMomentTol{1e-14, 1e-11};

// Shape of a single-side mainlobe density k y^(w-1) / sqrt(-ln y).
struct MainlobeShape {
  double k = 0.0;
  double w = 0.0;  // exponent offset; 0 for uniform error
  double p0 = 0.0;
};

MainlobeShape mainlobe_shape(const GaussianPattern& p, const BaeModel& model) {
  MainlobeShape s;
  if (std::holds_alternative<UniformBae>(model)) {
    s.k = 1.0 / (2.0 * kPi * std::sqrt(p.eta));
    s.w = 0.0;
  } else if (const auto* tg = std::get_if<TruncatedGaussianBae>(&model)) {
    const double sig = tg->sigma;
    s.k = 1.0 / (std::sqrt(2.0 * kPi * p.eta) * sig * specfun::erf(kPi / (std::sqrt(2.0) * sig)));
    s.w = 1.0 / (2.0 * p.eta * sig * sig);
  } else {
    throw std::invalid_argument("mainlobe_shape: perfect alignment has no mainlobe density");
  }
  s.p0 = mainlobe_prob(model, p.theta0);
  return s;
}

double sigma_of(const BaeModel& model) {
  if (const auto* tg = std::get_if<TruncatedGaussianBae>(&model)) return tg->sigma;
  return 0.0;
}

// int_a^b phi(x) f(x) dx over one segment, with [a, b] inside [lo, hi].
double integrate_segment(const GainSegment& seg, const std::function<double(double)>& phi, double a,
                         double b, specfun::Tolerance tol = kMomentTol) {
  if (!(b > a)) return 0.0;
  if (!seg.sqrt_log_at_hi) {
    auto f = [&](double x) { return phi(x) * seg.regular(x); };
    return specfun::integrate(f, a, b, tol).value;
  }
  // x = hi exp(-u^2) removes the 1/sqrt(ln(hi/x)) spike: dx / sqrt(ln(hi/x)) = -2 x du.
  const double ua = std::sqrt(std::log(seg.hi / b));
  const double ub = std::sqrt(std::log(seg.hi / a));
  auto f = [&](double u) {
    const double x = seg.hi * std::exp(-u * u);
    return 2.0 * x * phi(x) * seg.regular(x);
  };
  return specfun::integrate(f, ua, ub, tol).value;
}

double segment_mass(const GainSegment& seg, double a, double b) {
  return integrate_segment(seg, [](double) { return 1.0; }, a, b);
}

}  // namespace

double GainSegment::density(double x) const {
  if (x < lo || x > hi) return 0.0;
  if (!sqrt_log_at_hi) return regular(x);
  if (x >= hi) return std::numeric_limits<double>::infinity();
  return regular(x) / std::sqrt(std::log(hi / x));
}

double GainDistribution::density(double x) const {
  double d = 0.0;
  for (const auto& s : segments) {
    // Adjacent segments share an endpoint; the upper one owns it.
    if (x >= s.lo && (x < s.hi || (x == s.hi && s.hi == 1.0))) d += s.density(x);
  }
  return d;
}

double GainDistribution::expect(const std::function<double(double)>& phi, specfun::Tolerance tol) const {
  long double r = 0.0L;
  for (const auto& a : atoms) r += a.mass * phi(a.location);
  for (const auto& s : segments) r += integrate_segment(s, phi, s.lo, s.hi, tol);
  return static_cast<double>(r);
}

double GainDistribution::continuous_mass() const {
  double m = 0.0;
  for (const auto& s : segments) m += segment_mass(s, s.lo, s.hi);
  return m;
}

double GainDistribution::total_mass() const {
  double m = continuous_mass();
  for (const auto& a : atoms) m += a.mass;
  return m;
}

double GainDistribution::cdf(double x) const {
  double c = 0.0;
  for (const auto& a : atoms) {
    if (a.location <= x) c += a.mass;
  }
  for (const auto& s : segments) c += segment_mass(s, s.lo, std::min(x, s.hi));
  return c;
}

std::vector<double> GainDistribution::cdf(std::span<const double> grid) const {
  std::vector<double> out;
  out.reserve(grid.size());
  if (grid.empty()) return out;
  long double acc = cdf(grid[0]);
  out.push_back(static_cast<double>(acc));
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double a = grid[i - 1];
    const double b = grid[i];
    if (b < a) throw std::invalid_argument("GainDistribution::cdf: grid must be non-decreasing");
    for (const auto& at : atoms) {
      if (at.location > a && at.location <= b) acc += at.mass;
    }
    for (const auto& s : segments) {
      const double lo = std::max(a, s.lo);
      const double hi = std::min(b, s.hi);
      if (hi > lo) acc += segment_mass(s, lo, hi);
    }
    out.push_back(static_cast<double>(acc));
  }
  return out;
}

GainDistribution perfect_gain() {
  GainDistribution d;
  d.atoms.push_back({1.0, 1.0});
  d.law = GainLaw::Perfect;
  return d;
}

GainDistribution single_gain_pdf(const GaussianPattern& pattern, const BaeModel& model) {
  if (std::holds_alternative<PerfectAlignment>(model)) {
    GainDistribution d = perfect_gain();
    d.pattern = pattern;
    return d;
  }
  const MainlobeShape s = mainlobe_shape(pattern, model);
  GainDistribution d;
  d.law = GainLaw::SingleExact;
  d.pattern = pattern;
  d.sigma = sigma_of(model);
  d.p0 = s.p0;
  const double k = s.k;
  const double w = s.w;
  d.segments.push_back({pattern.g, 1.0, true, [k, w](double y) { return k * std::pow(y, w - 1.0); }});
  if (s.p0 < 1.0) d.atoms.push_back({pattern.g, 1.0 - s.p0});
  return d;
}

GainDistribution cascaded_pdf_exact(const GaussianPattern& pattern, const BaeModel& model) {
  if (std::holds_alternative<PerfectAlignment>(model)) {
    GainDistribution d = perfect_gain();
    d.pattern = pattern;
    return d;
  }
  const MainlobeShape s = mainlobe_shape(pattern, model);
  const double g = pattern.g;
  const double lng = std::log(g);
  const double k = s.k;
  const double w = s.w;
  const double q = 1.0 - s.p0;
  GainDistribution d;
  d.law = GainLaw::CascadedExact;
  d.pattern = pattern;
  d.sigma = sigma_of(model);
  d.p0 = s.p0;
  // Both gains in the mainlobe and the product above g.
  d.segments.push_back({g, 1.0, false, [k, w](double x) { return k * k * kPi * std::pow(x, w - 1.0); }});
  // Below g: both gains in the mainlobe (arctan part) or exactly one in the
  // sidelobe (spike at g).
  const double gw = std::pow(g, -w);
  d.segments.push_back({g * g, g, true, [=](double x) {
                          const double lg = std::log(g / x);  // > 0
                          const double num = std::log(x) - 2.0 * lng;
                          const double den = 2.0 * std::sqrt(-lng * lg);
                          const double xw = std::pow(x, w - 1.0);
                          return 2.0 * k * k * xw * std::atan2(num, den) * std::sqrt(lg) +
                                 2.0 * q * k * gw * xw;
                        }});
  if (q > 0.0) d.atoms.push_back({g * g, q * q});
  return d;
}

GainDistribution cascaded_pdf_approx(const GaussianPattern& pattern, const BaeModel& model) {
  GainDistribution d;
  d.pattern = pattern;
  if (std::holds_alternative<PerfectAlignment>(model)) {
    d = perfect_gain();
    d.pattern = pattern;
    return d;
  }
  const double g = pattern.g;
  if (const auto* tg = std::get_if<TruncatedGaussianBae>(&model)) {
    const double sig = tg->sigma;
    const double w = 1.0 / (2.0 * pattern.eta * sig * sig);
    const double e = specfun::erf(kPi / (std::sqrt(2.0) * sig));
    const double c = w / (e * e);
    d.law = GainLaw::CascadedApproxGaussian;
    d.sigma = sig;
    d.p0 = mainlobe_prob(model, pattern.theta0);
    d.segments.push_back({g, 1.0, false, [c, w](double x) { return c * std::pow(x, w - 1.0); }});
    return d;
  }
  const double p0 = mainlobe_prob(model, pattern.theta0);
  const double q = 1.0 - p0;
  const double a = 1.0 / (4.0 * kPi * pattern.eta);
  const double b = q / (kPi * std::sqrt(pattern.eta));
  d.law = GainLaw::CascadedApproxUniform;
  d.p0 = p0;
  d.segments.push_back({g, 1.0, false, [a](double x) { return a / x; }});
  d.segments.push_back({g * g, g, true, [b](double x) { return b / x; }});
  if (q > 0.0) d.atoms.push_back({g * g, q * q});
  return d;
}

double sample_cascaded(const GaussianPattern& pattern, const BaeModel& model, Rng& rng) {
  const double a = sample_bae(model, rng);
  const double b = sample_bae(model, rng);
  return normalized_gain(pattern, a) * normalized_gain(pattern, b);
}

double uniform_cascaded_moment(const GaussianPattern& p, double z) {
  if (!(z > 0.0)) throw std::domain_error("uniform_cascaded_moment: z must be positive");
  const double q = 1.0 - p.theta0 / kPi;
  const double lng = std::log(p.g);
  const double gz = std::exp(z * lng);
  return q / (kPi * std::sqrt(p.eta)) * gz * std::sqrt(kPi) * specfun::erf(std::sqrt(-z * lng)) /
             std::sqrt(z) +
         -std::expm1(z * lng) / (4.0 * kPi * p.eta * z) + q * q * gz * gz;
}

double gaussian_cascaded_moment(const GaussianPattern& p, double sigma, double z) {
  if (!(z >= 0.0)) throw std::domain_error("gaussian_cascaded_moment: z must be non-negative");
  if (sigma == 0.0) return 1.0;
  const double w = 1.0 / (2.0 * p.eta * sigma * sigma);
  const double e = specfun::erf(kPi / (std::sqrt(2.0) * sigma));
  return w / (w + z) * -std::expm1((w + z) * std::log(p.g)) / (e * e);
}

long double uniform_cascaded_partial_moment(const GaussianPattern& p, double z, double lo, double hi) {
  const double g = p.g;
  if (!(lo >= g * g * (1.0 - 1e-12) && hi > lo && hi <= 1.0)) {
    throw std::domain_error("uniform_cascaded_partial_moment: need g^2 <= lo < hi <= 1");
  }
  if (!(z > 0.0)) throw std::domain_error("uniform_cascaded_partial_moment: z must be positive");
  const long double zl = z;
  long double r = 0.0L;
  if (hi > g) {
    const double a = std::max(lo, g);
    r += -std::expm1l(zl * std::log(static_cast<long double>(a) / hi)) / (4.0L * kPi * p.eta * zl);
  }
  if (lo < g) {
    const double q = 1.0 - p.theta0 / kPi;
    const double b = std::min(hi, g);
    const long double v_lo = std::log(static_cast<long double>(g) / lo);
    const long double v_b = std::log(static_cast<long double>(g) / b);
    const long double x_lo = std::sqrt(zl * v_lo);
    const long double x_b = std::sqrt(zl * v_b);
    // erf difference, switched to erfc when both arguments sit in the tail.
    const long double diff =
        x_b > 1.0L ? std::erfc(x_b) - std::erfc(x_lo) : std::erf(x_lo) - std::erf(x_b);
    const long double scale = std::exp(zl * std::log(static_cast<long double>(g) / hi));
    r += q / (kPi * std::sqrt(p.eta)) * scale * std::sqrt(static_cast<long double>(kPi) / zl) * diff;
  }
  return r;
}

double uniform_cascaded_partial_mass(const GaussianPattern& p, double lo, double hi) {
  const double g = p.g;
  double r = 0.0;
  if (hi > g) r += std::log(hi / std::max(lo, g)) / (4.0 * kPi * p.eta);
  if (lo < g) {
    const double q = 1.0 - p.theta0 / kPi;
    const double v_lo = std::log(g / lo);
    const double v_b = std::log(g / std::min(hi, g));
    r += q / (kPi * std::sqrt(p.eta)) * 2.0 * (std::sqrt(v_lo) - std::sqrt(v_b));
  }
  return r;
}

double gain_moment_quadrature(const GainDistribution& dist, double z) {
  if (!(z > 0.0)) throw std::domain_error("gain_moment: z must be positive");
  long double m = 0.0L;
  for (const auto& a : dist.atoms) m += a.mass * std::pow(a.location, z);
  for (const auto& s : dist.segments) {
    m += integrate_segment(s, [z](double x) { return std::pow(x, z); }, s.lo, s.hi);
  }
  return static_cast<double>(m);
}

double gain_moment(const GainDistribution& dist, double z) {
  if (!(z > 0.0)) throw std::domain_error("gain_moment: z must be positive");
  switch (dist.law) {
    case GainLaw::Perfect:
      return 1.0;
    case GainLaw::CascadedApproxUniform:
      return uniform_cascaded_moment(dist.pattern, z);
    case GainLaw::CascadedApproxGaussian:
      return gaussian_cascaded_moment(dist.pattern, dist.sigma, z);
    default:
      return gain_moment_quadrature(dist, z);
  }
}

double fading_moment(int m, double z) {
  if (m < 1) throw std::domain_error("fading_moment: m must be >= 1");
  if (!(z > 0.0)) throw std::domain_error("fading_moment: z must be positive");
  return std::exp(std::lgamma(m + z) - std::lgamma(static_cast<double>(m)) - z * std::log(static_cast<double>(m)));
}

double ks_distance(std::span<const double> xs, const GainDistribution& dist, std::size_t stride) {
  const std::size_t n = xs.size();
  if (n == 0) throw std::invalid_argument("ks_distance: no samples");
  stride = std::max<std::size_t>(stride, 1);
  std::vector<double> grid;
  for (std::size_t i = stride - 1; i < n; i += stride) grid.push_back(xs[i]);
  grid.push_back(xs[n - 1]);
  for (const auto& a : dist.atoms) grid.push_back(a.location);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  const std::vector<double> f = dist.cdf(grid);
  double d = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    double atom = 0.0;
    for (const auto& a : dist.atoms) {
      if (a.location == x) atom += a.mass;
    }
    const auto le = std::upper_bound(xs.begin(), xs.end(), x) - xs.begin();
    const auto lt = std::lower_bound(xs.begin(), xs.end(), x) - xs.begin();
    d = std::max(d, std::abs(static_cast<double>(le) / n - f[i]));
    d = std::max(d, std::abs(static_cast<double>(lt) / n - (f[i] - atom)));
  }
  return d;
}

MomentTable::MomentTable(GainDistribution dist, int m_l, int m_n)
    : dist_(std::move(dist)), m_l_(m_l), m_n_(m_n) {}

double MomentTable::gain(double z) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = cache_.find(z);
  if (it != cache_.end()) return it->second;
  // E{Omega^0} is the mass of the law, which the z > 0 routines cannot return.
  const double v = z == 0.0 ? dist_.total_mass() : gain_moment(dist_, z);
  cache_.emplace(z, v);
  return v;
}

double MomentTable::chi_l(double z) const { return z == 0.0 ? gain(0.0) : gain(z) * fading_moment(m_l_, z); }
double MomentTable::chi_n(double z) const { return z == 0.0 ? gain(0.0) : gain(z) * fading_moment(m_n_, z); }

}  // namespace mmwpt
