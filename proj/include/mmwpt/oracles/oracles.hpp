#pragma once

// Independent reference evaluations used by the tests and the self-test. None
// of these share code paths with the library routines they check.

#include <complex>

#include "mmwpt/analysis.hpp"
#include "mmwpt/patterns.hpp"

namespace mmwpt::oracles {

/// Complex log-gamma (Lanczos, g = 7, with reflection for Re z < 1/2).
std::complex<double> lgamma_complex(std::complex<double> z);

/// H_{0,2}^{2,0}[z | (rho,1),(0,1/alpha)] by its Mellin-Barnes integral along
/// Re s = c, integrand Gamma(rho + s) Gamma(s / alpha) z^(-s).
double fox_h_mellin_barnes(double rho, double alpha, double z, double c = 1.0);

/// 2F1(a, b; c; x) by its power series in long double; requires |x| < 1.
double hyp2f1_series(double a, double b, double c, double x);

/// 2F1(a, b; 1 + b; -z) for z >= 0, through the Pfaff transform to argument
/// z / (1 + z) followed by the power series.
double hyp2f1_pfaff(double a, double b, double z);

/// Whittaker W_{kappa,mu}(x) from Kummer's U, valid for non-integer 2 mu.
double whittaker_w(double kappa, double mu, double x);

/// int_1^inf r^(1-alpha) e^(-beta r) dr through the Whittaker form.
double far_field_whittaker(double alpha, double beta);

/// Same integral as beta^(alpha-2) Gamma(2 - alpha, beta), with the upper
/// incomplete gamma continued to negative order by recurrence.
double far_field_incomplete_gamma(double alpha, double beta);

/// Laplace transform of the field term by direct quadrature over r and the
/// gain law (no series). Mirrors laplace_field's conventions.
double laplace_field_quadrature(double a, const NetworkParams& net, const ChannelParams& chan,
                                const GaussianPattern& pattern, bool los);

/// Serving-link Laplace transform by 2D quadrature over the mainlobe-only gain
/// law and the Gamma fading density.
double laplace_e0_quadrature(double a, const NetworkParams& net, const ChannelParams& chan,
                             const GaussianPattern& pattern, double sigma);


}  // namespace mmwpt::oracles
