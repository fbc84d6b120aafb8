#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "mmwpt/analysis.hpp"
#include "mmwpt/errors.hpp"
#include "mmwpt/gain_stats.hpp"
#include "mmwpt/oracles/oracles.hpp"
#include "mmwpt/specfun.hpp"

using namespace mmwpt;

namespace {

constexpr double kPi = std::numbers::pi;

double dbm(double d) { return 1e-3 * std::pow(10.0, d / 10.0); }

const GaussianPattern& beam() {
  static const GaussianPattern p = gaussian_from_beamwidth(kPi / 12);
  return p;
}

double serving_mean(const NetworkParams& net, const ChannelParams& ch, const GaussianPattern& p) {
  return net.pt * p.gm * p.gm * ch.c_l * std::pow(net.r0, -ch.alpha_l);
}

}  // namespace

TEST(Params, ValidationRejectsInconsistentChannels) {
  ChannelParams c;
  EXPECT_NO_THROW(c.validate());
  c.alpha_n = 2.0;
  c.alpha_l = 1.9;
  EXPECT_THROW(c.validate(), std::domain_error);
  ChannelParams d;
  d.alpha_l = 3.0;
  EXPECT_THROW(d.validate(), std::domain_error);
  NetworkParams n;
  n.r0 = 0.0;
  EXPECT_THROW(n.validate(), std::domain_error);
  CoverageSpec s;
  s.k_order = 0;
  EXPECT_THROW(s.validate(), std::domain_error);
}

TEST(Rectifier, NonlinearCurve) {
  const NonlinearEh eh;
  EXPECT_EQ(eh_dc(eh, 0.0), 0.0);
  EXPECT_NEAR(eh_dc(eh, 1.0), eh.pm, 1e-9);
  EXPECT_NEAR(eh_dc(eh, 0.0022), 0.01 * (1.0 - std::exp(-3.3)) / 2.0, 1e-15);
  EXPECT_NEAR(eh_dc(eh, 0.0022), 4.816e-3, 1e-6);
  EXPECT_THROW(eh_dc(eh, -1e-9), std::domain_error);
  EXPECT_DOUBLE_EQ(eh_dc(LinearEh{0.5}, 2e-3), 1e-3);
}

TEST(Rectifier, ThresholdInversion) {
  const NonlinearEh eh;
  EXPECT_EQ(*invert_threshold(eh, 0.0), 0.0);
  EXPECT_NEAR(*invert_threshold(eh, 1e-3), 0.945e-3, 0.001e-3);
  EXPECT_FALSE(invert_threshold(eh, eh.pm).has_value());
  EXPECT_FALSE(invert_threshold(eh, 0.5).has_value());
  for (double e : {1e-9, 1e-7, 1e-5, 1e-3, 9.9e-3}) {
    const double rf = *invert_threshold(eh, e);
    EXPECT_NEAR(eh_dc(eh, rf), e, 1e-12 * e) << e;
  }
  EXPECT_NEAR(*invert_threshold(eh, dbm(-40.0)), 1.873931e-7, 1e-12);
}

TEST(CoverageSpec, GammaConstant) {
  EXPECT_NEAR(CoverageSpec{}.gamma_constant(), 5.0 / std::pow(120.0, 0.2), 1e-14);
  CoverageSpec one;
  one.k_order = 1;
  EXPECT_DOUBLE_EQ(one.gamma_constant(), 1.0);
}

TEST(ServingLaplace, Limits) {
  const NetworkParams net;
  const ChannelParams ch;
  EXPECT_EQ(laplace_e0(0.0, net, ch, beam(), 0.0), 1.0);
  EXPECT_EQ(laplace_e0(0.0, net, ch, beam(), 0.05), 1.0);
  const double a = ch.m_l / serving_mean(net, ch, beam());
  EXPECT_NEAR(laplace_e0(a, net, ch, beam(), 0.0), std::pow(2.0, -ch.m_l), 1e-15);
}

TEST(ServingLaplace, MatchesDoubleQuadrature) {
  const NetworkParams net;
  const ChannelParams ch;
  const double sigma = beam().theta0 / 4;
  for (double a : {1e3, 1e5, 1e7}) {
    const double want = oracles::laplace_e0_quadrature(a, net, ch, beam(), sigma);
    EXPECT_NEAR(laplace_e0(a, net, ch, beam(), sigma), want, 1e-6 * want) << a;
  }
}

TEST(ServingLaplace, DecreasingAndBounded) {
  const NetworkParams net;
  const ChannelParams ch;
  for (double sigma : {0.0, beam().theta0 / 3, beam().theta0}) {
    double prev = 1.0;
    for (double a = 1e2; a < 1e9; a *= 3.0) {
      const double v = laplace_e0(a, net, ch, beam(), sigma);
      EXPECT_GT(v, 0.0);
      EXPECT_LE(v, prev);
      prev = v;
    }
  }
}

TEST(FieldLaplace, Trivial) {
  NetworkParams empty;
  empty.lambda_t = 0.0;
  const ChannelParams ch;
  EXPECT_EQ(laplace_field(1e6, empty, ch, beam(), true), 1.0);
  EXPECT_EQ(laplace_field(1e6, empty, ch, beam(), false), 1.0);
  EXPECT_EQ(laplace_field(0.0, NetworkParams{}, ch, beam(), true), 1.0);
}

TEST(FieldLaplace, SeriesMatchesQuadratureOnDefaultSweep) {
  const ChannelParams ch;
  const CoverageSpec spec;
  for (double th : {kPi / 24, kPi / 12, kPi / 6}) {
    const auto p = gaussian_from_beamwidth(th);
    for (double lambda : {1e-4, 5e-4}) {
      NetworkParams net;
      net.lambda_t = lambda;
      for (double d : {-50.0, -40.0, -30.0, -20.0}) {
        const double rf = *invert_threshold(NonlinearEh{}, dbm(d));
        for (int k = 1; k <= spec.k_order; k += 2) {
          const double a = spec.gamma_constant() * k / rf;
          for (bool los : {true, false}) {
            SeriesDiagnostics diag;
            const double v = laplace_field(a, net, ch, p, los, spec, &diag);
            const double want = oracles::laplace_field_quadrature(a, net, ch, p, los);
            EXPECT_NEAR(v, want, 1e-4 * want)
                << "theta0=" << th << " lambda=" << lambda << " dbm=" << d << " k=" << k << " los=" << los;
            EXPECT_TRUE(diag.converged);
            EXPECT_LE(diag.max_terms, spec.series.max_terms);
          }
        }
      }
    }
  }
}

TEST(FieldLaplace, NonConvergenceIsReported) {
  CoverageSpec spec;
  spec.series.max_terms = 2;
  const ChannelParams ch;
  const double rf = *invert_threshold(NonlinearEh{}, dbm(-40.0));
  EXPECT_THROW(laplace_field(spec.gamma_constant() / rf, NetworkParams{}, ch, beam(), true, spec), NumericalError);
}

TEST(FieldLaplace, DecreasingInArgument) {
  const NetworkParams net;
  const ChannelParams ch;
  for (bool los : {true, false}) {
    double prev = 1.0;
    for (double a = 1e3; a < 1e9; a *= 4.0) {
      const double v = laplace_field(a, net, ch, beam(), los);
      EXPECT_GT(v, 0.0);
      EXPECT_LE(v, prev * (1.0 + 1e-12));
      prev = v;
    }
  }
}

TEST(Coverage, SaturationAndSmallThreshold) {
  const CoverageSpec spec;
  const NetworkParams net;
  const ChannelParams ch;
  EXPECT_EQ(energy_coverage(0.01, spec, net, ch, beam(), 0.0), 0.0);
  EXPECT_EQ(energy_coverage(0.2, spec, net, ch, beam(), 0.02), 0.0);
  EXPECT_NEAR(energy_coverage(1e-14, spec, net, ch, beam(), 0.0), 1.0, 1e-9);
  EXPECT_NEAR(energy_coverage(1e-14, spec, net, ch, beam(), beam().theta0 / 4), 1.0, 1e-6);
}

TEST(Coverage, PerfectAlignmentMatchesServingClosedForm) {
  // With no field, the sum over k of the serving transform at sigma = 0 is
  // written out directly from the (1 + gamma)^-m form.
  const CoverageSpec spec;
  NetworkParams net;
  net.lambda_t = 0.0;
  const ChannelParams ch;
  for (double d : {-45.0, -40.0, -35.0}) {
    const double rf = *invert_threshold(NonlinearEh{}, dbm(d));
    const double s = serving_mean(net, ch, beam());
    double sum = 0.0;
    for (int k = 0; k <= spec.k_order; ++k) {
      const double gamma = spec.gamma_constant() * k / rf * s / ch.m_l;
      sum += (k % 2 ? -1.0 : 1.0) * specfun::binomial(spec.k_order, k) * std::pow(1.0 + gamma, -ch.m_l);
    }
    EXPECT_NEAR(energy_coverage(dbm(d), spec, net, ch, beam(), 0.0), sum, 1e-12) << d;
  }
}

TEST(Coverage, NonIncreasingInThresholdAndSigma) {
  const CoverageSpec spec;
  const NetworkParams net;
  const ChannelParams ch;
  const std::vector<double> sig{0.0, 0.25, 1.0 / 3.0, 0.5, 1.0};
  const std::vector<double> thr{-50.0, -45.0, -40.0, -35.0, -30.0, -25.0, -20.0};
  std::vector<std::vector<double>> v(sig.size(), std::vector<double>(thr.size()));
  for (std::size_t i = 0; i < sig.size(); ++i) {
    for (std::size_t j = 0; j < thr.size(); ++j) {
      v[i][j] = energy_coverage(dbm(thr[j]), spec, net, ch, beam(), sig[i] * beam().theta0);
      EXPECT_GE(v[i][j], 0.0);
      EXPECT_LE(v[i][j], 1.0);
      if (j) EXPECT_LE(v[i][j], v[i][j - 1] + 1e-9);
      if (i) EXPECT_LE(v[i][j], v[i - 1][j] + 1e-9);
    }
  }
}

TEST(AverageRf, ServingOnlyLimit) {
  NetworkParams net;
  net.lambda_t = 0.0;
  const ChannelParams ch;
  const auto e = avg_rf_energy(net, ch, beam(), 0.0);
  EXPECT_NEAR(e.total(), serving_mean(net, ch, beam()), 1e-15 * e.total());
  EXPECT_EQ(e.los, 0.0);
  EXPECT_EQ(e.nlos, 0.0);
}

TEST(AverageRf, ContinuousAtPerfectAlignment) {
  const NetworkParams net;
  const ChannelParams ch;
  const double a = avg_rf_energy(net, ch, beam(), 0.0).serving;
  const double b = avg_rf_energy(net, ch, beam(), 1e-6).serving;
  EXPECT_NEAR(b, a, 1e-6 * a);
}

TEST(AverageRf, FieldTermsFromMoments) {
  NetworkParams net;
  net.lambda_t = 1e-4;
  const ChannelParams ch;
  const auto e = avg_rf_energy(net, ch, beam(), beam().theta0 / 4);
  const double chi = gain_moment(cascaded_pdf_approx(beam(), UniformBae{}), 1.0);
  const double k = 2.0 * kPi * net.lambda_t * net.pt * beam().gm * beam().gm * chi;
  EXPECT_NEAR(e.los, k * ch.c_l * oracles::far_field_whittaker(ch.alpha_l, ch.beta), 1e-8 * e.los);
  EXPECT_NEAR(e.nlos,
              k * ch.c_n * (1.0 / (ch.alpha_n - 2.0) - oracles::far_field_whittaker(ch.alpha_n, ch.beta)),
              1e-8 * e.nlos);
  EXPECT_NEAR(e.serving, serving_mean(net, ch, beam()) * (1.0 - rel(beam(), beam().theta0 / 4)), 1e-12 * e.serving);
}

TEST(AverageRf, DivergentNlosIsRejected) {
  ChannelParams ch;
  ch.alpha_l = 1.8;
  ch.alpha_n = 2.0;
  EXPECT_THROW(avg_rf_energy(NetworkParams{}, ch, beam(), 0.0), std::domain_error);
}

TEST(Rel, Limits) {
  EXPECT_EQ(rel(beam(), 0.0), 0.0);
  const auto p24 = gaussian_from_beamwidth(kPi / 24);
  const double v = rel(p24, 4.0 * p24.theta0);
  EXPECT_LT(v, 1.0);
  EXPECT_GT(v, 0.9);
  EXPECT_THROW(rel(beam(), -0.1), std::domain_error);
}

TEST(Rel, EqualsOneMinusMeanUnderApproximateLaw) {
  for (double r : {0.1, 0.25, 0.5, 1.0, 2.0}) {
    const double s = r * beam().theta0;
    const double q = gain_moment_quadrature(cascaded_pdf_approx(beam(), TruncatedGaussianBae{s}), 1.0);
    EXPECT_NEAR(rel(beam(), s), 1.0 - q, 1e-8) << r;
  }
}

TEST(Rel, MonotoneInSigmaAndOrderedInBeamwidth) {
  const auto a = gaussian_from_beamwidth(kPi / 24);
  const auto b = gaussian_from_beamwidth(kPi / 12);
  const auto c = gaussian_from_beamwidth(kPi / 6);
  double prev = 0.0;
  for (int i = 1; i <= 20; ++i) {
    const double s = 0.02 * i;
    const double v = rel(b, s);
    EXPECT_GT(v, prev);
    prev = v;
    EXPECT_GT(rel(a, s), rel(b, s));
    EXPECT_GT(rel(b, s), rel(c, s));
  }
}

TEST(AverageDc, BoundsAndLinearCase) {
  const CoverageSpec spec;
  const NetworkParams net;
  const ChannelParams ch;
  const NonlinearEh eh;
  const double eps_min = 1e-6;
  const double v = avg_dc_energy(eps_min, spec, net, ch, beam(), 0.0, eh);
  EXPECT_LE(v, eh.pm);
  EXPECT_GE(v, eps_min * energy_coverage(eps_min, spec, net, ch, beam(), 0.0, eh));
  EXPECT_THROW(avg_dc_energy(-1.0, spec, net, ch, beam(), 0.0), std::domain_error);
}
