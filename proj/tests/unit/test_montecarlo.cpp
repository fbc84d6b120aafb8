#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "mmwpt/montecarlo.hpp"

using namespace mmwpt;

namespace {

constexpr double kPi = std::numbers::pi;

double dbm(double d) { return 1e-3 * std::pow(10.0, d / 10.0); }

McConfig base(double lambda = 5e-4) {
  McConfig c;
  c.antenna = gaussian_from_beamwidth(kPi / 12);
  c.net.lambda_t = lambda;
  return c;
}

double serving_mean(const McConfig& c) {
  const double gm = peak_gain(c.antenna);
  return c.net.pt * gm * gm * c.chan.c_l * std::pow(c.net.r0, -c.chan.alpha_l);
}

}  // namespace

TEST(McConfig, Validation) {
  McConfig c = base();
  EXPECT_NO_THROW(c.validate());
  c.trials = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  McConfig d = base();
  d.r_max = 10.0;
  d.r_min_field = 20.0;
  EXPECT_THROW(d.validate(), std::invalid_argument);
}

TEST(Fading, GammaMoments) {
  for (int m : {1, 2, 3}) {
    Rng rng(40 + m);
    const int n = 1000000;
    double s1 = 0.0, s2 = 0.0, s4 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double h = sample_fading(m, rng);
      s1 += h;
      s2 += h * h;
      s4 += h * h * h * h;
    }
    const double m1 = s1 / n, m2 = s2 / n;
    EXPECT_LT(std::abs(m1 - 1.0), 3.0 * std::sqrt((m2 - m1 * m1) / n)) << m;
    EXPECT_LT(std::abs(m2 - (m + 1.0) / m), 3.0 * std::sqrt((s4 / n - m2 * m2) / n)) << m;
  }
}

TEST(SampleField, EmptyWithoutTransmitters) {
  McConfig c = base(0.0);
  c.r_max = 300.0;
  Rng rng(1);
  EXPECT_TRUE(sample_field(c, rng).empty());
}

TEST(SampleField, PoissonCountAndAnnulus) {
  McConfig c = base(5e-4);
  c.r_max = 200.0;
  c.r_min_field = 1.0;
  Rng rng(2);
  const int fields = 10000;
  double s = 0.0;
  for (int i = 0; i < fields; ++i) {
    const auto pts = sample_field(c, rng);
    s += pts.size();
    for (const auto& p : pts) {
      ASSERT_GE(p.r, 1.0);
      ASSERT_LE(p.r, 200.0);
    }
  }
  const double mean = c.net.lambda_t * kPi * (200.0 * 200.0 - 1.0);
  EXPECT_LT(std::abs(s / fields - mean), 3.0 * std::sqrt(mean / fields));
}

TEST(SampleField, LosFractionNearServingDistance) {
  McConfig c = base(5e-3);
  c.r_max = 60.0;
  Rng rng(3);
  int n = 0, los = 0;
  for (int i = 0; i < 20000; ++i) {
    for (const auto& p : sample_field(c, rng)) {
      if (p.r >= 49.0 && p.r <= 51.0) {
        ++n;
        los += p.los;
      }
    }
  }
  const double want = std::exp(-0.0071 * 50.0);
  EXPECT_NEAR(want, 0.701, 1e-3);
  EXPECT_LT(std::abs(double(los) / n - want), 3.0 * std::sqrt(want * (1.0 - want) / n) + 2e-3);
}

TEST(SimulateRf, DeterministicSingleLink) {
  McConfig c = base(0.0);
  c.disable_fading = true;
  Rng rng(4);
  EXPECT_DOUBLE_EQ(simulate_rf(c, rng), serving_mean(c));
}

TEST(SimulateRf, NonNegativeAndGainBounded) {
  McConfig c = base(0.0);
  c.disable_fading = true;
  c.bae_assoc = TruncatedGaussianBae{kPi / 24};
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    const double v = simulate_rf(c, rng);
    ASSERT_GE(v, 0.0);
    ASSERT_LE(v, serving_mean(c) * (1.0 + 1e-14));
  }
  McConfig f = base();
  f.r_max = 400.0;
  for (int i = 0; i < 2000; ++i) ASSERT_GE(simulate_rf(f, rng), 0.0);
}

TEST(SimulateRf, ReplayIsIndependentOfWorkerCount) {
  McConfig c = base();
  c.trials = 3 * kTrialBlock + 17;
  c.bae_assoc = TruncatedGaussianBae{0.05};
  c.workers = 1;
  const auto a = simulate_rf_trials(c);
  c.workers = 3;
  const auto b = simulate_rf_trials(c);
  ASSERT_EQ(a.size(), c.trials);
  EXPECT_EQ(a, b);
  c.seed = 2;
  EXPECT_NE(a, simulate_rf_trials(c));
}

TEST(Intervals, WilsonAndNormal) {
  const auto w = wilson_interval(0, 1000);
  EXPECT_EQ(w.mean, 0.0);
  EXPECT_GT(w.ci_hi, 0.0);
  EXPECT_GE(w.ci_halfwidth, 0.0);
  const auto h = wilson_interval(500, 1000);
  EXPECT_NEAR(h.ci_halfwidth, 1.96 * std::sqrt(0.25 / 1000), 2e-4);
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto n = normal_interval(v);
  EXPECT_DOUBLE_EQ(n.mean, 2.5);
  EXPECT_GT(n.ci_halfwidth, 0.0);
}

TEST(EstimateCoverage, Extremes) {
  McConfig c = base();
  c.trials = 2000;
  EXPECT_EQ(estimate_coverage(c, 0.0).mean, 1.0);
  EXPECT_EQ(estimate_coverage(c, 0.01).mean, 0.0);
  EXPECT_EQ(estimate_coverage(c, 0.5).mean, 0.0);
}

TEST(EstimateCoverage, CurveMatchesSinglePoints) {
  McConfig c = base();
  c.trials = 5000;
  const std::vector<double> eps{dbm(-45.0), dbm(-40.0), dbm(-35.0)};
  const auto curve = estimate_coverage_curve(c, eps);
  for (std::size_t i = 0; i < eps.size(); ++i) EXPECT_EQ(curve[i].mean, estimate_coverage(c, eps[i]).mean);
  EXPECT_GE(curve[0].mean, curve[1].mean);
  EXPECT_GE(curve[1].mean, curve[2].mean);
}

TEST(EstimateCoverage, DoublingFieldRadiusIsNegligible) {
  McConfig c = base();
  c.trials = 100000;
  const double r = default_r_max(c);
  c.r_max = r;
  const auto a = estimate_coverage(c, dbm(-40.0));
  c.r_max = 2.0 * r;
  const auto b = estimate_coverage(c, dbm(-40.0));
  EXPECT_LT(std::abs(a.mean - b.mean), 0.005);
}

TEST(EstimateMeanEnergy, ServingOnlyLink) {
  McConfig c = base(0.0);
  c.eh = LinearEh{1.0};
  c.trials = 4000;
  const auto a = estimate_mean_energy(c);
  EXPECT_LT(std::abs(a.mean - serving_mean(c)), a.ci_halfwidth * 1.5);
  c.trials = 64000;
  const auto b = estimate_mean_energy(c);
  EXPECT_NEAR(b.ci_halfwidth / a.ci_halfwidth, 0.25, 0.03);
  EXPECT_LT(std::abs(b.mean - serving_mean(c)), b.ci_halfwidth * 1.5);
}

TEST(EstimateMeanEnergy, MatchesClosedForm) {
  for (double sigma : {0.0, kPi / 48}) {
    McConfig c = base(1e-4);
    c.eh = LinearEh{1.0};
    c.r_min_field = 1.0;
    c.trials = 1000000;
    c.bae_assoc = gaussian_bae(sigma);
    const auto mc = estimate_mean_energy(c);
    const double want =
        avg_rf_energy(c.net, c.chan, std::get<GaussianPattern>(c.antenna), sigma).total();
    EXPECT_NEAR(mc.mean, want, 0.05 * want) << sigma;
  }
}

TEST(EstimateMeanEnergy, DecreasesWithAlignmentErrorAndDependsOnPattern) {
  const double th = kPi / 12;
  double prev = INFINITY;
  for (double r : {0.0, 0.25, 1.0 / 3.0, 0.5, 1.0}) {
    McConfig c = base(1e-4);
    c.eh = LinearEh{1.0};
    c.r_min_field = 1.0;
    c.trials = 200000;
    c.bae_assoc = gaussian_bae(r * th);
    const double m = estimate_mean_energy(c).mean;
    EXPECT_LT(m, prev) << r;
    prev = m;
  }
  McConfig g = base(1e-4);
  g.eh = LinearEh{1.0};
  g.r_min_field = 1.0;
  g.trials = 100000;
  McConfig u = g;
  u.antenna = ula_matching(th);
  const auto eg = estimate_mean_energy(g);
  const auto eu = estimate_mean_energy(u);
  EXPECT_GT(std::abs(eg.mean - eu.mean), eg.ci_halfwidth + eu.ci_halfwidth);
}

TEST(EstimateRel, PerfectAlignmentHasNoLoss) {
  McConfig c = base();
  c.trials = 1000;
  EXPECT_EQ(estimate_rel(c).mean, 0.0);
  c.bae_assoc = TruncatedGaussianBae{kPi / 24};
  c.trials = 200000;
  const auto r = estimate_rel(c);
  EXPECT_GT(r.mean, 0.0);
  EXPECT_LT(r.mean, 1.0);
}

TEST(RMax, HeuristicProperties) {
  McConfig c = base();
  const double r = default_r_max(c);
  EXPECT_GE(r, 4.0 * c.net.r0);
  McConfig sparse = base(1e-5);
  EXPECT_LE(default_r_max(sparse), r);
  McConfig empty = base(0.0);
  EXPECT_DOUBLE_EQ(default_r_max(empty), 4.0 * c.net.r0);
}
