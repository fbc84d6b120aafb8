#include "mmwpt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmwpt/errors.hpp"
#include "mmwpt/gain_stats.hpp"

namespace mmwpt {

namespace {

constexpr double kPi = std::numbers::pi;

double erf_norm(double sigma) { return specfun::erf(kPi / (std::sqrt(2.0) * sigma)); }

}  // namespace

void ChannelParams::validate() const {
  if (!(alpha_l > 0.0 && alpha_n > alpha_l)) throw std::domain_error("channel: need alpha_n > alpha_l > 0");
  if (!(alpha_n > 2.0)) throw std::domain_error("channel: alpha_n must exceed 2");
  if (!(c_n > 0.0 && c_l >= c_n)) throw std::domain_error("channel: need c_l >= c_n > 0");
  if (m_l < 1 || m_n < 1) throw std::domain_error("channel: fading orders must be >= 1");
  if (!(beta > 0.0)) throw std::domain_error("channel: beta must be positive");
}

void NetworkParams::validate() const {
  if (!(lambda_t >= 0.0)) throw std::domain_error("network: lambda_t must be non-negative");
  if (!(r0 > 0.0)) throw std::domain_error("network: r0 must be positive");
  if (!(pt > 0.0)) throw std::domain_error("network: pt must be positive");
}

double CoverageSpec::gamma_constant() const {
  const double k = k_order;
  return k * std::exp(-std::lgamma(k + 1.0) / k);
}

void CoverageSpec::validate() const {
  if (k_order < 1) throw std::domain_error("coverage spec: k_order must be >= 1");
  if (!(band_x_min > 0.0 && band_x_min < 1.0)) throw std::domain_error("coverage spec: band_x_min must be in (0, 1)");
}

void SeriesDiagnostics::merge(const SeriesDiagnostics& o) {
  max_terms = std::max(max_terms, o.max_terms);
  worst_last_term = std::max(worst_last_term, o.worst_last_term);
  converged = converged && o.converged;
}

double eh_dc(const EhModel& eh, double x) {
  if (!(x >= 0.0)) throw std::domain_error("eh_dc: RF power must be non-negative");
  if (const auto* lin = std::get_if<LinearEh>(&eh)) return lin->zeta * x;
  const auto& n = std::get<NonlinearEh>(eh);
  return n.pm * -std::expm1(-n.pa * x) / (1.0 + std::exp(-n.pa * (x - n.pb)));
}

std::optional<double> invert_threshold(const EhModel& eh, double eps_th) {
  if (!(eps_th >= 0.0)) throw std::domain_error("invert_threshold: threshold must be non-negative");
  if (const auto* lin = std::get_if<LinearEh>(&eh)) return eps_th / lin->zeta;
  const auto& n = std::get<NonlinearEh>(eh);
  if (eps_th >= n.pm) return std::nullopt;
  // ln((pm - e) / (pm + e E)) = ln(1 - e (1 + E) / (pm + e E)), kept accurate for small e.
  const double big = std::exp(n.pa * n.pb);
  return -std::log1p(-eps_th * (1.0 + big) / (n.pm + eps_th * big)) / n.pa;
}

double laplace_e0(double a, const NetworkParams& net, const ChannelParams& chan,
                  const GaussianPattern& pattern, double sigma) {
  if (!(a >= 0.0)) throw std::domain_error("laplace_e0: a must be non-negative");
  if (!(sigma >= 0.0)) throw std::domain_error("laplace_e0: sigma must be non-negative");
  const double m = chan.m_l;
  const double gamma = a * net.pt * pattern.gm * pattern.gm * chan.c_l * std::pow(net.r0, -chan.alpha_l) / m;
  if (sigma == 0.0) return std::exp(-m * std::log1p(gamma));
  if (a == 0.0) return 1.0;
  const double w = 1.0 / (2.0 * pattern.eta * sigma * sigma);
  const double e2 = erf_norm(sigma) * erf_norm(sigma);
  const double g = pattern.g;
  auto big_f = [&](double x) { return std::pow(x, w) * specfun::hyp2f1_euler(m, w, gamma * x); };
  const double mainlobe = (big_f(1.0) - big_f(g)) / e2;
  // Mass the mainlobe-only law does not carry sees no energy.
  const double deficit = 1.0 + std::expm1(w * std::log(g)) / e2;
  return mainlobe + deficit;
}

double shadowed_field_integral(double c, double alpha, int m, double beta,
                               const GaussianPattern& pattern, const CoverageSpec& spec,
                               SeriesDiagnostics* diag) {
  const double g = pattern.g;
  const double g2 = g * g;
  const double q = 1.0 - pattern.theta0 / kPi;
  const double atom_mass = q * q;
  const double total_mass = uniform_cascaded_partial_mass(pattern, g2, 1.0) + atom_mass;
  if (c == 0.0) return 0.0;

  // E{H[beta (c X h)^(1/alpha) | (2,1),(0,1/alpha)]} is split over bands
  // (s b^-1, s]. Inside a band X = x s with x^(1/alpha) in [x_min, 1], and the
  // shifted-argument expansion around s runs in powers of (1 - x^(1/alpha)).
  // The fading average sits inside each H term; the binomial q-sum is exact.
  const double ratio = std::pow(spec.band_x_min, alpha);
  const double inv_alpha = 1.0 / alpha;
  long double expected_h = 0.0L;
  SeriesDiagnostics local;

  auto h_bar = [&](int t, double s) {
    specfun::FoxHSpec fs{t + 2.0, inv_alpha, beta * std::pow(c * s, inv_alpha)};
    return specfun::fox_h_20_02_faded_normalized(fs, m);
  };

  for (double hi = 1.0; hi > g2 * (1.0 + 1e-12);) {
    const double lo = std::max(hi * ratio, g2);
    specfun::StagnationSeries series(spec.series);
    std::vector<long double> moments;  // E{(X/hi)^((q+2)/alpha); band}
    for (int t = 0; !series.done(); ++t) {
      moments.push_back(uniform_cascaded_partial_moment(pattern, (t + 2.0) * inv_alpha, lo, hi));
      long double s_t = 0.0L;
      for (int k = 0; k <= t; ++k) {
        const long double term = specfun::binomial(t, k) * moments[k];
        s_t += (k % 2 == 0) ? term : -term;
      }
      // H_t / t! = (t + 1) * H_t / Gamma(t + 2).
      const double term = static_cast<double>((t + 1) * s_t) * h_bar(t, hi);
      series.add(term);
    }
    const auto r = series.result();
    expected_h += r.value;
    local.max_terms = std::max(local.max_terms, r.terms);
    local.worst_last_term = std::max(local.worst_last_term, std::abs(r.last_term));
    local.converged = local.converged && r.converged;
    hi = lo;
  }
  // The atom is its own pivot: only the t = 0 term survives.
  if (atom_mass > 0.0) expected_h += atom_mass * h_bar(0, g2);

  if (diag) diag->merge(local);
  if (!local.converged) {
    throw NumericalError("shifted-argument series reached " + std::to_string(spec.series.max_terms) +
                             " terms without converging (last term " +
                             std::to_string(local.worst_last_term) + ")",
                         static_cast<double>(expected_h), local.worst_last_term);
  }
  return static_cast<double>((total_mass - expected_h / alpha) / (static_cast<long double>(beta) * beta));
}

double laplace_field(double a, const NetworkParams& net, const ChannelParams& chan,
                     const GaussianPattern& pattern, bool los, const CoverageSpec& spec,
                     SeriesDiagnostics* diag) {
  if (!(a >= 0.0)) throw std::domain_error("laplace_field: a must be non-negative");
  if (a == 0.0 || net.lambda_t == 0.0) return 1.0;
  const double gm2 = pattern.gm * pattern.gm;
  if (los) {
    const double c = a * net.pt * gm2 * chan.c_l;
    const double j = shadowed_field_integral(c, chan.alpha_l, chan.m_l, chan.beta, pattern, spec, diag);
    return std::exp(-2.0 * kPi * net.lambda_t * j);
  }
  const double alpha = chan.alpha_n;
  const double c = a * net.pt * gm2 * chan.c_n;
  const double z = 2.0 / alpha;
  const double chi = uniform_cascaded_moment(pattern, z) * fading_moment(chan.m_n, z);
  const double l1 = 0.5 * std::pow(c, z) * chi * std::tgamma(1.0 - z);
  const double l2 = shadowed_field_integral(c, alpha, chan.m_n, chan.beta, pattern, spec, diag);
  return std::exp(-2.0 * kPi * net.lambda_t * (l1 - l2));
}

double coverage_from_rf_threshold(double rf_threshold, const CoverageSpec& spec,
                                  const NetworkParams& net, const ChannelParams& chan,
                                  const GaussianPattern& pattern, double sigma) {
  spec.validate();
  if (!(rf_threshold >= 0.0)) throw std::domain_error("coverage: threshold must be non-negative");
  if (rf_threshold == 0.0) return 1.0;
  const int big_k = spec.k_order;
  const double a_unit = spec.gamma_constant() / rf_threshold;
  // Alternating binomial sum; Kahan-compensated in long double.
  long double sum = 1.0L;
  long double comp = 0.0L;
  for (int k = 1; k <= big_k; ++k) {
    const double a = a_unit * k;
    const double l = laplace_e0(a, net, chan, pattern, sigma) * laplace_field(a, net, chan, pattern, true, spec) *
                     laplace_field(a, net, chan, pattern, false, spec);
    const long double term = ((k % 2 == 0) ? 1.0L : -1.0L) * specfun::binomial(big_k, k) * l;
    const long double y = term - comp;
    const long double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  double p = static_cast<double>(sum);
  if (p < 0.0 || p > 1.0) {
    if (p < -1e-6 || p > 1.0 + 1e-6) {
      std::cerr << "warning: coverage sum " << p << " outside [0,1] beyond roundoff; clamping\n";
    }
    p = std::clamp(p, 0.0, 1.0);
  }
  return p;
}

double energy_coverage(double eps_th, const CoverageSpec& spec, const NetworkParams& net,
                       const ChannelParams& chan, const GaussianPattern& pattern, double sigma,
                       const EhModel& eh) {
  const auto rf = invert_threshold(eh, eps_th);
  if (!rf) return 0.0;
  return coverage_from_rf_threshold(*rf, spec, net, chan, pattern, sigma);
}

AvgRfEnergy avg_rf_energy(const NetworkParams& net, const ChannelParams& chan,
                          const GaussianPattern& pattern, double sigma) {
  if (!(chan.alpha_n > 2.0)) throw std::domain_error("avg_rf_energy: alpha_n must exceed 2");
  if (!(sigma >= 0.0)) throw std::domain_error("avg_rf_energy: sigma must be non-negative");
  const double peak = net.pt * pattern.gm * pattern.gm;
  AvgRfEnergy e;
  e.serving = peak * chan.c_l * std::pow(net.r0, -chan.alpha_l) * gaussian_cascaded_moment(pattern, sigma, 1.0);
  const double chi1 = uniform_cascaded_moment(pattern, 1.0);  // E{h} = 1
  const double field = 2.0 * kPi * net.lambda_t * peak * chi1;
  e.los = field * chan.c_l * specfun::far_field_moment(chan.alpha_l, chan.beta);
  e.nlos = field * chan.c_n * (1.0 / (chan.alpha_n - 2.0) - specfun::far_field_moment(chan.alpha_n, chan.beta));
  return e;
}

double rel(const GaussianPattern& pattern, double sigma) {
  if (!(sigma >= 0.0)) throw std::domain_error("rel: sigma must be non-negative");
  if (sigma == 0.0) return 0.0;
  return 1.0 - gaussian_cascaded_moment(pattern, sigma, 1.0);
}

double avg_dc_energy(double eps_min, const CoverageSpec& spec, const NetworkParams& net,
                     const ChannelParams& chan, const GaussianPattern& pattern, double sigma,
                     const EhModel& eh, specfun::Tolerance tol) {
  if (!(eps_min >= 0.0)) throw std::domain_error("avg_dc_energy: eps_min must be non-negative");
  auto p = [&](double eps) { return energy_coverage(eps, spec, net, chan, pattern, sigma, eh); };
  const double head = eps_min * p(eps_min);
  if (const auto* n = std::get_if<NonlinearEh>(&eh)) {
    if (eps_min >= n->pm) throw std::domain_error("avg_dc_energy: eps_min must be below pm");
    // The curve falls over many decades, so integrate in log(eps) with a
    // breakpoint per decade; below 1e-12 pm the linear piece is negligible
    // but still added.
    const double lo = std::max(eps_min, 1e-12 * n->pm);
    double body = eps_min < lo ? specfun::integrate(p, eps_min, lo, tol).value : 0.0;
    std::vector<double> pts{std::log(lo)};
    for (double d = std::ceil(std::log10(lo)); std::pow(10.0, d) < n->pm; d += 1.0) {
      const double u = d * std::log(10.0);
      if (u > pts.back()) pts.push_back(u);
    }
    pts.push_back(std::log(n->pm));
    auto f = [&](double u) {
      const double eps = std::exp(u);
      return p(eps) * eps;
    };
    body += specfun::integrate(f, std::span<const double>(pts), tol).value;
    return head + body;
  }
  // Linear rectifier: the coverage curve has no saturation point.
  const double scale = std::get<LinearEh>(eh).zeta * avg_rf_energy(net, chan, pattern, sigma).total();
  return head + specfun::integrate_to_infinity(p, eps_min, scale, tol).value;
}

}  // namespace mmwpt
