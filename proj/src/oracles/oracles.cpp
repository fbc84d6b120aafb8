#include "mmwpt/oracles/oracles.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/hypergeometric_1F1.hpp>

namespace mmwpt::oracles {

namespace {

constexpr double kPi = std::numbers::pi;

// Boost's tanh-sinh rule; deliberately not the library's Gauss-Kronrod driver.
template <class F>
double quad(F f, double a, double b, double tol = 1e-12) {
  static thread_local boost::math::quadrature::tanh_sinh<double> rule;
  return rule.integrate(f, a, b, tol);
}

template <class F>
double quad_pieces(F f, const std::vector<double>& pts, double tol = 1e-12) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) s += quad(f, pts[i], pts[i + 1], tol);
  return s;
}

// E{phi(X)} over the three-part uniform-error cascaded law, with each piece
// mapped to a smooth integrand.
template <class Phi>
double uniform_law_expect(const GaussianPattern& p, Phi phi) {
  const double g = p.g;
  const double big_g = -std::log(g);
  const double q = 1.0 - p.theta0 / kPi;
  // [g, 1]: density 1/(4 pi eta x); x = e^v.
  const double a = quad([&](double v) { return phi(std::exp(v)); }, -big_g, 0.0) / (4.0 * kPi * p.eta);
  // [g^2, g): density b / (x sqrt(ln(g/x))); x = g e^{-u^2}.
  const double b = q / (kPi * std::sqrt(p.eta));
  const double c = quad([&](double u) { return 2.0 * b * phi(g * std::exp(-u * u)); }, 0.0, std::sqrt(big_g));
  return a + c + q * q * phi(g * g);
}

}  // namespace

std::complex<double> lgamma_complex(std::complex<double> z) {
  static constexpr std::array<double, 9> kCoef = {
      0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
      771.32342877765313,   -176.61502916214059,   12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  if (z.real() < 0.5) {
    // Reflection: Gamma(z) Gamma(1 - z) = pi / sin(pi z).
    return std::log(kPi) - std::log(std::sin(kPi * z)) - lgamma_complex(1.0 - z);
  }
  z -= 1.0;
  std::complex<double> x = kCoef[0];
  for (int i = 1; i < 9; ++i) x += kCoef[i] / (z + static_cast<double>(i));
  const std::complex<double> t = z + 7.5;
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

double fox_h_mellin_barnes(double rho, double alpha, double z, double c) {
  if (!(z > 0.0)) throw std::domain_error("fox_h_mellin_barnes: z must be positive");
  const double lz = std::log(z);
  auto f = [&](double tau) {
    const std::complex<double> s(c, tau);
    return std::exp(lgamma_complex(rho + s) + lgamma_complex(s / alpha) - s * lz).real();
  };
  // |integrand| decays like exp(-pi tau (1 + 1/alpha) / 2) times a power.
  const double rate = 0.5 * kPi * (1.0 + 1.0 / alpha);
  const double t_end = (60.0 + (rho + c) * std::log(rho + c + 50.0)) / rate;
  std::vector<double> pts;
  for (double t = 0.0; t < t_end; t += 2.0) pts.push_back(t);
  pts.push_back(t_end);
  return quad_pieces(f, pts, 1e-13) / kPi;
}

double hyp2f1_series(double a, double b, double c, double x) {
  if (!(std::abs(x) < 1.0)) throw std::domain_error("hyp2f1_series: requires |x| < 1");
  long double term = 1.0L;
  long double sum = 1.0L;
  for (int n = 0; n < 2000000; ++n) {
    term *= (static_cast<long double>(a) + n) * (static_cast<long double>(b) + n) /
            ((static_cast<long double>(c) + n) * (n + 1.0L)) * x;
    sum += term;
    if (std::abs(term) < 1e-22L * std::abs(sum) && n > 5) break;
  }
  return static_cast<double>(sum);
}

double hyp2f1_pfaff(double a, double b, double z) {
  if (!(z >= 0.0)) throw std::domain_error("hyp2f1_pfaff: requires z >= 0");
  // 2F1(a, b; c; -z) = (1 + z)^(-a) 2F1(a, c - b; c; z / (1 + z)), c = 1 + b.
  return std::pow(1.0 + z, -a) * hyp2f1_series(a, 1.0, 1.0 + b, z / (1.0 + z));
}

double whittaker_w(double kappa, double mu, double x) {
  using boost::math::hypergeometric_1F1;
  using boost::math::tgamma;
  const double a = mu - kappa + 0.5;
  const double b = 1.0 + 2.0 * mu;
  if (b == std::round(b)) throw std::domain_error("whittaker_w: integer 2 mu is not supported");
  // Kummer U(a, b, x) from two M functions.
  const double u = tgamma(1.0 - b) / tgamma(a - b + 1.0) * hypergeometric_1F1(a, b, x) +
                   tgamma(b - 1.0) / tgamma(a) * std::pow(x, 1.0 - b) * hypergeometric_1F1(a - b + 1.0, 2.0 - b, x);
  return std::exp(-0.5 * x) * std::pow(x, mu + 0.5) * u;
}

double far_field_whittaker(double alpha, double beta) {
  const double kappa = -(alpha - 1.0) / 2.0;
  const double mu = (2.0 - alpha) / 2.0;
  return std::pow(beta, (alpha - 1.0) / 2.0 - 1.0) * std::exp(-beta / 2.0) * whittaker_w(kappa, mu, beta);
}

double far_field_incomplete_gamma(double alpha, double beta) {
  double a = 2.0 - alpha;
  // Lift the order until it is positive, then recur back down:
  // Gamma(a, x) = (Gamma(a + 1, x) - x^a e^{-x}) / a.
  std::vector<double> orders;
  while (a <= 0.0) {
    orders.push_back(a);
    a += 1.0;
  }
  double g = boost::math::tgamma(a, beta);
  for (auto it = orders.rbegin(); it != orders.rend(); ++it) {
    g = (g - std::pow(beta, *it) * std::exp(-beta)) / *it;
  }
  return std::pow(beta, alpha - 2.0) * g;
}

double laplace_field_quadrature(double a, const NetworkParams& net, const ChannelParams& chan,
                                const GaussianPattern& pattern, bool los) {
  if (a == 0.0 || net.lambda_t == 0.0) return 1.0;
  const double alpha = los ? chan.alpha_l : chan.alpha_n;
  const double m = los ? chan.m_l : chan.m_n;
  const double c = a * net.pt * pattern.gm * pattern.gm * (los ? chan.c_l : chan.c_n);
  const double beta = chan.beta;
  // r = e^s over the whole half line.
  auto f = [&](double s) {
    const double r = std::exp(s);
    const double k = c * std::pow(r, -alpha) / m;
    const double e = uniform_law_expect(pattern, [&](double x) { return -std::expm1(-m * std::log1p(k * x)); });
    const double w = los ? std::exp(-beta * r) : -std::expm1(-beta * r);
    return e * w * r * r;
  };
  const double s_lo = std::log(1e-6);
  const double s_hi = los ? std::log(4000.0 / beta) : std::log(1e3) + 45.0 / (alpha - 2.0);
  std::vector<double> pts;
  for (double s = s_lo; s < s_hi; s += 1.5) pts.push_back(s);
  pts.push_back(s_hi);
  const double integral = quad_pieces(f, pts, 1e-11);
  return std::exp(-2.0 * kPi * net.lambda_t * integral);
}

double laplace_e0_quadrature(double a, const NetworkParams& net, const ChannelParams& chan,
                             const GaussianPattern& pattern, double sigma) {
  const double m = chan.m_l;
  const double s0 = a * net.pt * pattern.gm * pattern.gm * chan.c_l * std::pow(net.r0, -chan.alpha_l);
  const double lgm = std::lgamma(m);
  // E_h{exp(-s h)} by quadrature over the Gamma(m, 1/m) density.
  auto fading_laplace = [&](double s) {
    auto f = [&](double h) {
      if (h <= 0.0) return 0.0;
      return std::exp(-s * h + m * std::log(m) + (m - 1.0) * std::log(h) - m * h - lgm);
    };
    return quad(f, 0.0, 4.0, 1e-13) + quad(f, 4.0, 60.0, 1e-13);
  };
  if (sigma == 0.0) return fading_laplace(s0);
  const double w = 1.0 / (2.0 * pattern.eta * sigma * sigma);
  const double e = std::erf(kPi / (std::sqrt(2.0) * sigma));
  const double big_g = -std::log(pattern.g);
  // x = e^{-v / w} turns w x^{w-1} dx into e^{-v} dv on [0, w G].
  auto f = [&](double v) { return std::exp(-v) * fading_laplace(s0 * std::exp(-v / w)); };
  const double upper = w * big_g;
  std::vector<double> pts{0.0};
  for (double v = 2.0; v < upper; v *= 2.0) pts.push_back(v);
  pts.push_back(upper);
  const double mainlobe = quad_pieces(f, pts, 1e-12) / (e * e);
  const double mass = -std::expm1(-upper) / (e * e);
  return mainlobe + (1.0 - mass);
}

}  // namespace mmwpt::oracles
