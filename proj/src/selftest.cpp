#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

#include <boost/math/special_functions/erf.hpp>

#include "mmwpt/experiment.hpp"
#include "mmwpt/gain_stats.hpp"
#include "mmwpt/oracles/oracles.hpp"
#include "mmwpt/specfun.hpp"

namespace mmwpt {

namespace {

constexpr double kPi = std::numbers::pi;

void add(SelftestReport& r, std::string name, double value, double reference, double tol, bool relative) {
  const double dev = std::abs(value - reference);
  const double bound = relative ? tol * std::abs(reference) : tol;
  r.checks.push_back({std::move(name), value, reference, tol, relative, std::isfinite(value) && dev <= bound});
}

}  // namespace

bool SelftestReport::all_passed() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

void SelftestReport::print(std::ostream& os) const {
  for (const auto& c : checks) {
    os << (c.pass ? "[PASS] " : "[FAIL] ") << std::left << std::setw(44) << c.name << " value=" << fmt(c.value)
       << " reference=" << fmt(c.reference) << " tol=" << fmt(c.tolerance) << (c.relative ? " (rel)" : " (abs)")
       << "\n";
  }
  os << (all_passed() ? "selftest: all checks passed" : "selftest: FAILED") << "\n";
}

SelftestReport selftest() {
  SelftestReport r;

  const struct {
    const char* label;
    double theta0, theta3db, eta, gm;
  } table[] = {{"pi/24", kPi / 24, 0.0503, 272.5250, 38.4103},
               {"pi/12", kPi / 12, 0.1007, 68.1313, 23.4227},
               {"pi/6", kPi / 6, 0.2014, 17.0328, 13.1559}};
  for (const auto& row : table) {
    const GaussianPattern p = gaussian_from_beamwidth(row.theta0);
    const std::string s = std::string("beam ") + row.label;
    add(r, s + " theta3db", p.theta3db, row.theta3db, 1e-3, false);
    add(r, s + " eta", p.eta, row.eta, 1e-3, false);
    add(r, s + " gm", p.gm, row.gm, 1e-3, false);
  }

  for (double th : {kPi / 24, kPi / 6}) {
    const std::string s = th < 0.2 ? "pi/24" : "pi/6";
    add(r, "mainlobe prob sigma=theta0/3 " + s, mainlobe_prob(TruncatedGaussianBae{th / 3}, th), 0.9973, 3e-4, false);
    add(r, "mainlobe prob sigma=theta0/2 " + s, mainlobe_prob(TruncatedGaussianBae{th / 2}, th), 0.9545, 3e-4, false);
  }

  for (double x : {0.1, 0.7, 1.5, 3.0}) {
    add(r, "erf(" + fmt(x) + ") vs boost", specfun::erf(x), boost::math::erf(x), 1e-15, false);
  }
  add(r, "gamma(0.5)", specfun::gamma(0.5), std::sqrt(kPi), 1e-14, true);
  add(r, "gamma(6)", specfun::gamma(6.0), 120.0, 1e-14, true);
  add(r, "binomial(20,7)", specfun::binomial(20, 7), 77520.0, 0.0, false);

  for (auto [rho, alpha, z] : {std::tuple{2.0, 2.1, 0.5}, std::tuple{2.0, 2.92, 1.5}, std::tuple{5.0, 2.92, 0.2}}) {
    const double v = specfun::fox_h_20_02({rho, 1.0 / alpha, z});
    add(r, "fox H rho=" + fmt(rho) + " alpha=" + fmt(alpha) + " z=" + fmt(z), v,
        oracles::fox_h_mellin_barnes(rho, alpha, z), 1e-8, true);
  }
  {
    const auto s = specfun::fox_h_shifted_series(0.8, {2.0, 1.0 / 2.92, 0.5});
    add(r, "shifted H series x=0.8 y=0.5", s.value, specfun::fox_h_20_02({2.0, 1.0 / 2.92, 0.4}), 1e-6, true);
  }

  add(r, "2F1(3,0.96;1.96;-5)", specfun::hyp2f1_euler(3.0, 0.96, 5.0), oracles::hyp2f1_pfaff(3.0, 0.96, 5.0), 1e-9,
      true);
  add(r, "2F1(1,1;2;-1)", specfun::hyp2f1_euler(1.0, 1.0, 1.0), std::log(2.0), 1e-9, true);

  for (double alpha : {1.5, 2.1, 2.92}) {
    add(r, "far-field moment alpha=" + fmt(alpha), specfun::far_field_moment(alpha, 0.5),
        oracles::far_field_whittaker(alpha, 0.5), 1e-8, true);
  }

  {
    const GaussianPattern p = gaussian_from_beamwidth(kPi / 12);
    for (double z : {0.5, 2.0 / 2.92}) {
      const auto approx = cascaded_pdf_approx(p, UniformBae{});
      add(r, "uniform-error gain moment z=" + fmt(z), uniform_cascaded_moment(p, z),
          gain_moment_quadrature(approx, z), 1e-9, true);
    }
    add(r, "cascaded exact mass uniform", cascaded_pdf_exact(p, UniformBae{}).total_mass(), 1.0, 1e-6, false);
    add(r, "cascaded exact mass sigma=theta0/3", cascaded_pdf_exact(p, TruncatedGaussianBae{p.theta0 / 3}).total_mass(),
        1.0, 1e-6, false);
    add(r, "single exact mass sigma=theta0/2", single_gain_pdf(p, TruncatedGaussianBae{p.theta0 / 2}).total_mass(),
        1.0, 1e-6, false);

    const NetworkParams net;
    const ChannelParams chan;
    const CoverageSpec spec;
    const double rf = *invert_threshold(NonlinearEh{}, dbm_to_watts(-40.0));
    const double a = spec.gamma_constant() / rf;
    add(r, "field Laplace LOS vs quadrature", laplace_field(a, net, chan, p, true, spec),
        oracles::laplace_field_quadrature(a, net, chan, p, true), 1e-4, true);
    add(r, "field Laplace NLOS vs quadrature", laplace_field(a, net, chan, p, false, spec),
        oracles::laplace_field_quadrature(a, net, chan, p, false), 1e-4, true);
    add(r, "serving Laplace vs quadrature", laplace_e0(a, net, chan, p, p.theta0 / 4),
        oracles::laplace_e0_quadrature(a, net, chan, p, p.theta0 / 4), 1e-8, true);
  }
  return r;
}

}  // namespace mmwpt
