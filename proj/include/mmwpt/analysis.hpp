#pragma once

#include <optional>
#include <variant>

#include "mmwpt/patterns.hpp"
#include "mmwpt/specfun.hpp"

namespace mmwpt {

/// Propagation parameters. Defaults are the reference 28 GHz scenario.
struct ChannelParams {
  double alpha_l = 2.1;
  double alpha_n = 2.92;
  double c_l = 7.244359600749906e-07;  // 10^(-6.14)
  double c_n = 6.30957344480193e-08;  // 10^(-7.2)
  int m_l = 3;
  int m_n = 2;
  double beta = 0.0071;  // LOS probability exp(-beta r), 1/m

  void validate() const;
};

struct NetworkParams {
  double lambda_t = 5e-4;  // transmitters per m^2
  double r0 = 50.0;        // serving distance, m
  double pt = 10.0;        // transmit power, W

  void validate() const;
};

/// Saturating rectifier: pm (1 - e^{-pa x}) / (1 + e^{-pa (x - pb)}).
struct NonlinearEh {
  double pm = 0.01;
  double pa = 1500.0;
  double pb = 0.0022;
};

struct LinearEh {
  double zeta = 1.0;
};

using EhModel = std::variant<NonlinearEh, LinearEh>;

struct CoverageSpec {
  int k_order = 5;
  specfun::SeriesOptions series{};
  specfun::Tolerance quad{1e-10, 1e-8};
  // Each gain band spans [s x_min^alpha, s], so the shifted-argument expansion
  // runs in powers of at most 1 - x_min.
  double band_x_min = 0.8;

  /// A = K (K!)^(-1/K).
  double gamma_constant() const;
  void validate() const;
};

/// DC output of the rectifier for RF input x >= 0.
double eh_dc(const EhModel& eh, double rf_power);

/// RF level whose DC output equals eps_th, or nullopt when eps_th is at or above
/// the saturation power (coverage is then zero). Throws std::domain_error for
/// eps_th < 0.
std::optional<double> invert_threshold(const EhModel& eh, double eps_th);

/// E{exp(-a eps_0)} for the serving link with Gaussian error sigma. Mass
/// missing from the mainlobe-only gain law is treated as zero gain.
double laplace_e0(double a, const NetworkParams& net, const ChannelParams& chan,
                  const GaussianPattern& pattern, double sigma);

/// Convergence report of the shifted-argument series used by laplace_field.
struct SeriesDiagnostics {
  int max_terms = 0;
  double worst_last_term = 0.0;
  bool converged = true;

  void merge(const SeriesDiagnostics& other);
};

/// E{exp(-a eps_L)} (los) or E{exp(-a eps_N)} for the unassociated field.
/// Throws NumericalError if a series hits its term cap without converging.
double laplace_field(double a, const NetworkParams& net, const ChannelParams& chan,
                     const GaussianPattern& pattern, bool los, const CoverageSpec& spec = {},
                     SeriesDiagnostics* diag = nullptr);

/// int_0^inf E{1 - exp(-c r^-alpha omega)} e^{-beta r} r dr for omega = X h with X
/// from the three-part uniform-error law and h ~ Gamma(m, 1/m).
double shadowed_field_integral(double c, double alpha, int m, double beta,
                               const GaussianPattern& pattern, const CoverageSpec& spec = {},
                               SeriesDiagnostics* diag = nullptr);

/// P(eps_RF > rf_threshold) through the order-K Gamma approximation.
double coverage_from_rf_threshold(double rf_threshold, const CoverageSpec& spec,
                                  const NetworkParams& net, const ChannelParams& chan,
                                  const GaussianPattern& pattern, double sigma);

/// P(eps_DC > eps_th). Zero when eps_th is unreachable.
double energy_coverage(double eps_th, const CoverageSpec& spec, const NetworkParams& net,
                       const ChannelParams& chan, const GaussianPattern& pattern, double sigma,
                       const EhModel& eh = NonlinearEh{});

struct AvgRfEnergy {
  double serving = 0.0;
  double los = 0.0;
  double nlos = 0.0;
  double total() const { return serving + los + nlos; }
};

/// Mean RF energy with the far-field (r >= 1 m) convention for the field.
AvgRfEnergy avg_rf_energy(const NetworkParams& net, const ChannelParams& chan,
                          const GaussianPattern& pattern, double sigma);

/// Relative loss of mean serving-link energy against perfect alignment.
double rel(const GaussianPattern& pattern, double sigma);

/// eps_min P(eps_min) + int_{eps_min}^{pm} P(eps) d eps.
double avg_dc_energy(double eps_min, const CoverageSpec& spec, const NetworkParams& net,
                     const ChannelParams& chan, const GaussianPattern& pattern, double sigma,
                     const EhModel& eh = NonlinearEh{},
                     specfun::Tolerance tol = {1e-15, 1e-4});

}  // namespace mmwpt
