#include "mmwpt/patterns.hpp"

#include <cmath>
#include <iostream>
#include <numbers>
#include <stdexcept>

namespace mmwpt {

namespace {

constexpr double kPi = std::numbers::pi;
// Mainlobe half-width over half-power half-width.
constexpr double kWidthRatio = 2.6;
// Sidelobe level in decades below the peak.
constexpr double kSidelobeDecades = 2.028;

void check_angle(double theta) {
  if (!(theta >= -kPi && theta < kPi)) {
    throw std::domain_error("antenna gain: angle must lie in [-pi, pi)");
  }
}

}  // namespace

double gaussian_sidelobe_level() { return std::pow(10.0, -kSidelobeDecades); }

GaussianPattern gaussian_from_beamwidth(double theta0) {
  if (!(theta0 > 0.0)) throw std::domain_error("gaussian_from_beamwidth: theta0 must be positive");
  if (theta0 < kPi / 24.0 - 1e-12 || theta0 > kPi / 6.0 + 1e-12) {
    std::cerr << "warning: theta0=" << theta0 << " rad is outside the calibrated range [pi/24, pi/6]\n";
  }
  GaussianPattern p;
  p.theta0 = theta0;
  p.theta3db = theta0 / kWidthRatio;
  p.eta = 0.3 * std::log(10.0) / (p.theta3db * p.theta3db);
  p.gm = kPi * std::pow(10.0, kSidelobeDecades) / (42.6443 * theta0 + kPi);
  p.gs = p.gm * std::exp(-p.eta * theta0 * theta0);
  p.g = p.gs / p.gm;
  return p;
}

FlatTopPattern flat_top_matching(const GaussianPattern& g) { return {g.gm, g.gs, g.theta3db}; }

UlaPattern ula_matching(double theta0) {
  if (!(theta0 > 0.0)) throw std::domain_error("ula_matching: theta0 must be positive");
  const int na = static_cast<int>(std::lround(5.64 / theta0));
  if (na < 2) throw std::domain_error("ula_matching: theta0 too wide for a two-element array");
  return {na};
}

double wrap_angle(double theta) {
  double r = std::fmod(theta + kPi, 2.0 * kPi);
  if (r < 0.0) r += 2.0 * kPi;
  r -= kPi;
  return r >= kPi ? -kPi : r;
}

double gain(const GaussianPattern& p, double theta) {
  check_angle(theta);
  if (std::abs(theta) <= p.theta0) return p.gm * std::exp(-p.eta * theta * theta);
  return p.gs;
}

double gain(const FlatTopPattern& p, double theta) {
  check_angle(theta);
  return std::abs(theta) <= p.theta3db ? p.gm : p.gs;
}

double gain(const UlaPattern& p, double theta) {
  check_angle(theta);
  const double n = p.na;
  const double den = std::sin(0.5 * theta);
  if (std::abs(den) < 1e-8) {
    // sin(n x)/sin(x) -> n (1 - (n^2 - 1) x^2 / 6) near x = 0.
    const double x = 0.5 * theta;
    const double ratio = n * (1.0 - (n * n - 1.0) * x * x / 6.0);
    return ratio * ratio / n;
  }
  const double num = std::sin(0.5 * n * theta);
  return num * num / (n * den * den);
}

double gain(const AntennaPattern& pattern, double theta) {
  return std::visit([theta](const auto& p) { return gain(p, theta); }, pattern);
}

double peak_gain(const AntennaPattern& pattern) {
  return std::visit([](const auto& p) { return gain(p, 0.0); }, pattern);
}

double normalized_gain(const GaussianPattern& p, double theta) { return gain(p, theta) / p.gm; }

}  // namespace mmwpt
