#include "mmwpt/bae.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "mmwpt/specfun.hpp"

namespace mmwpt {

namespace {
constexpr double kPi = std::numbers::pi;
}

BaeModel gaussian_bae(double sigma) {
  if (!(sigma >= 0.0)) throw std::domain_error("gaussian_bae: sigma must be non-negative");
  if (sigma == 0.0) return PerfectAlignment{};
  return TruncatedGaussianBae{sigma};
}

double bae_pdf(const BaeModel& model, double psi) {
  if (std::holds_alternative<PerfectAlignment>(model)) {
    throw std::logic_error("bae_pdf: perfect alignment is a point mass and has no density");
  }
  if (!(psi >= -kPi && psi < kPi)) throw std::domain_error("bae_pdf: psi must lie in [-pi, pi)");
  if (std::holds_alternative<UniformBae>(model)) return 1.0 / (2.0 * kPi);
  const double s = std::get<TruncatedGaussianBae>(model).sigma;
  const double norm = std::sqrt(2.0 * kPi) * s * specfun::erf(kPi / (std::sqrt(2.0) * s));
  return std::exp(-psi * psi / (2.0 * s * s)) / norm;
}

double mainlobe_prob(const BaeModel& model, double theta0) {
  if (std::holds_alternative<PerfectAlignment>(model)) return 1.0;
  if (std::holds_alternative<UniformBae>(model)) return theta0 / kPi;
  const double s = std::get<TruncatedGaussianBae>(model).sigma;
  return specfun::erf(theta0 / (std::sqrt(2.0) * s)) / specfun::erf(kPi / (std::sqrt(2.0) * s));
}

double sample_bae(const BaeModel& model, Rng& rng) {
  if (std::holds_alternative<PerfectAlignment>(model)) return 0.0;
  if (std::holds_alternative<UniformBae>(model)) {
    return std::uniform_real_distribution<double>(-kPi, kPi)(rng);
  }
  const double s = std::get<TruncatedGaussianBae>(model).sigma;
  std::normal_distribution<double> normal(0.0, s);
  for (;;) {
    const double x = normal(rng);
    if (x >= -kPi && x < kPi) return x;
  }
}

}  // namespace mmwpt
