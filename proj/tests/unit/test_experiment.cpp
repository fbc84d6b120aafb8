#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "mmwpt/experiment.hpp"
#include "mmwpt/specfun.hpp"

using namespace mmwpt;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

std::string config_error(const json& j) {
  try {
    ExperimentConfig::from_json(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::size_t column(const CsvTable& t, const std::string& name) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (t.columns[i] == name) return i;
  }
  throw std::out_of_range(name);
}

}  // namespace

TEST(Config, DefaultsAreTheReferenceParameters) {
  const ExperimentConfig c;
  EXPECT_EQ(c.net.lambda_t, 5e-4);
  EXPECT_EQ(c.net.r0, 50.0);
  EXPECT_EQ(c.net.pt, 10.0);
  EXPECT_EQ(c.chan.alpha_l, 2.1);
  EXPECT_EQ(c.chan.alpha_n, 2.92);
  EXPECT_NEAR(10.0 * std::log10(c.chan.c_l), -61.4, 1e-12);
  EXPECT_NEAR(10.0 * std::log10(c.chan.c_n), -72.0, 1e-12);
  EXPECT_EQ(c.chan.m_l, 3);
  EXPECT_EQ(c.chan.m_n, 2);
  EXPECT_EQ(c.chan.beta, 0.0071);
  EXPECT_EQ(c.nonlinear.pm, 0.01);
  EXPECT_EQ(c.nonlinear.pa, 1500.0);
  EXPECT_EQ(c.nonlinear.pb, 0.0022);
  EXPECT_EQ(c.coverage.k_order, 5);
  EXPECT_EQ(c.kappa, 0.25);
  EXPECT_DOUBLE_EQ(c.theta0, kPi / 12);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, RoundTripsThroughJson) {
  ExperimentConfig c;
  c.seed = 99;
  c.engine = Engine::Analytic;
  c.antennas = {AntennaKind::Ula};
  c.energy_axis = EnergyAxis::Lambda;
  const auto d = ExperimentConfig::from_json(c.to_json());
  EXPECT_EQ(d.to_json(), c.to_json());
  EXPECT_EQ(d.seed, 99u);
  EXPECT_EQ(d.engine, Engine::Analytic);
}

TEST(Config, PartialFileKeepsDefaults) {
  const auto c = ExperimentConfig::from_json(json::parse(R"({"network": {"lambda_t": 1e-4}})"));
  EXPECT_EQ(c.net.lambda_t, 1e-4);
  EXPECT_EQ(c.net.r0, 50.0);
}

TEST(Config, ErrorsNameTheKeyPath) {
  EXPECT_NE(config_error(json::parse(R"({"sweep": {"threshold_dbm": []}})")).find("sweep.threshold_dbm"),
            std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({"sweep": {"sigma_over_theta0": [0.5, 0.25]}})")).find("sweep.sigma_over_theta0"),
            std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({"network": {"lambda_t": "dense"}})")).find("network.lambda_t"),
            std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({"channel": {"alhpa_l": 2.0}})")).find("channel.alhpa_l"), std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({"engine": "fast"})")).find("engine"), std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({"montecarlo": {"trials": 0}})")).find("montecarlo.trials"),
            std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({"channel": {"alpha_n": 1.9}})")).find("channel"), std::string::npos);
}

TEST(Units, DbmConversionIsExact) {
  for (double d : {-50.0, -40.0, -7.5, 0.0, 20.0}) {
    const double w = dbm_to_watts(d);
    EXPECT_DOUBLE_EQ(w, 1e-3 * std::pow(10.0, d / 10.0));
    EXPECT_NEAR(watts_to_dbm(w), d, 1e-12);
    EXPECT_DOUBLE_EQ(watts_to_dbm(w), 10.0 * std::log10(w / 1e-3));
  }
}

TEST(Csv, NineSignificantDigits) {
  EXPECT_EQ(fmt(0.123456789123), "0.123456789");
  EXPECT_EQ(fmt(272.52501753), "272.525018");
  EXPECT_EQ(fmt(1.0), "1");
  EXPECT_EQ(fmt(-40.0), "-40");
}

TEST(Csv, WritesCommentHeaderThenRows) {
  CsvTable t;
  t.meta = {{"seed", "1"}};
  t.columns = {"a", "b"};
  t.rows = {{"1", "2"}};
  std::ostringstream os;
  t.write(os);
  EXPECT_EQ(os.str(), "# seed: 1\na,b\n1,2\n");
}

TEST(CoverageSweep, AnalyticRowsAndMetadata) {
  ExperimentConfig c;
  c.engine = Engine::Analytic;
  c.threshold_dbm = {-45.0, -40.0};
  c.sigma_over_theta0 = {0.0, 0.25};
  const auto t = run_coverage_sweep(c);
  EXPECT_EQ(t.columns, (std::vector<std::string>{"threshold_dbm", "engine", "antenna", "sigma", "p_ec", "ci"}));
  ASSERT_EQ(t.rows.size(), 4u);
  EXPECT_EQ(t.rows[0][1], "analytic");
  EXPECT_EQ(t.rows[0][2], "gaussian");
  std::set<std::string> keys;
  for (const auto& [k, v] : t.meta) keys.insert(k);
  for (const char* k : {"config", "seed", "git_describe", "tolerances"}) EXPECT_TRUE(keys.count(k)) << k;
  // The stored config reproduces the run.
  for (const auto& [k, v] : t.meta) {
    if (k == "config") EXPECT_EQ(ExperimentConfig::from_json(json::parse(v)).to_json(), c.to_json());
  }
}

TEST(CoverageSweep, BothEnginesShareTheGrid) {
  ExperimentConfig c;
  c.threshold_dbm = {-45.0, -40.0};
  c.sigma_over_theta0 = {0.0};
  c.antennas = {AntennaKind::Gaussian, AntennaKind::FlatTop};
  c.trials = 2000;
  const auto t = run_coverage_sweep(c);
  std::map<std::string, std::vector<std::string>> grid;
  for (const auto& r : t.rows) grid[r[1] + "/" + r[2]].push_back(r[0]);
  ASSERT_EQ(grid.size(), 3u);
  EXPECT_EQ(grid["analytic/gaussian"], grid["mc/gaussian"]);
  EXPECT_EQ(grid["mc/flattop"], grid["mc/gaussian"]);
  const auto again = run_coverage_sweep(c);
  EXPECT_EQ(again.rows, t.rows);
}

TEST(CoverageSweep, EmptyGridIsRejected) {
  ExperimentConfig c;
  c.threshold_dbm.clear();
  EXPECT_THROW(run_coverage_sweep(c), ConfigError);
}

TEST(EnergySweep, SixSystemsAndZeroLossAtPerfectAlignment) {
  ExperimentConfig c;
  c.engine = Engine::MonteCarlo;
  c.net.lambda_t = 1e-4;
  c.sigma_over_theta0 = {0.0, 0.5};
  c.trials = 3000;
  const auto t = run_energy_sweep(c);
  const auto ax = column(t, "axis_value");
  const auto rel = column(t, "rel");
  std::set<std::string> systems;
  for (const auto& r : t.rows) {
    systems.insert(r[column(t, "antenna")] + "/" + r[column(t, "eh_variant")]);
    if (r[ax] == "0") EXPECT_EQ(r[rel], "0") << r[column(t, "antenna")];
  }
  EXPECT_EQ(systems.size(), 6u);
}

TEST(EnergySweep, MeanEnergyGrowsWithDensity) {
  ExperimentConfig c;
  c.engine = Engine::Analytic;
  c.energy_axis = EnergyAxis::Lambda;
  c.eh_variants = {"linear"};
  const auto t = run_energy_sweep(c);
  ASSERT_EQ(t.rows.size(), c.lambda_grid.size());
  double prev = 0.0;
  for (const auto& r : t.rows) {
    const double v = std::stod(r[column(t, "mean_energy_w")]);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(EnergySweep, NonlinearMeanGrowsWithDensity) {
  ExperimentConfig c;
  c.engine = Engine::Analytic;
  c.energy_axis = EnergyAxis::Lambda;
  c.eh_variants = {"nonlinear"};
  c.eps_min = 1e-6;
  c.lambda_grid = {1e-5, 1e-4, 1e-3};
  const auto t = run_energy_sweep(c);
  double prev = 0.0;
  for (const auto& r : t.rows) {
    const double v = std::stod(r[column(t, "mean_energy_w")]);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(RelSweep, AnalyticRows) {
  ExperimentConfig c;
  c.engine = Engine::Analytic;
  const auto t = run_rel_sweep(c);
  EXPECT_EQ(t.rows.size(), c.theta0_list.size() * c.sigma_over_theta0.size());
  EXPECT_EQ(t.rows[0][column(t, "rel")], "0");
}

TEST(PdfCheck, DensitiesAndAtoms) {
  ExperimentConfig c;
  c.sigma_over_theta0 = {0.0, 0.25};
  const auto t = run_pdf_check(c, 50);
  std::size_t atoms = 0;
  for (const auto& r : t.rows) {
    EXPECT_GE(std::stod(r.back()), 0.0);
    atoms += r[column(t, "kind")] == "atom";
  }
  EXPECT_GT(atoms, 0u);
  EXPECT_GT(t.rows.size(), 6u * 50u);
}

TEST(Selftest, PassesCleanAndFailsUnderErfFault) {
  const auto clean = selftest();
  EXPECT_TRUE(clean.all_passed());
  bool has_table = false;
  for (const auto& ch : clean.checks) has_table |= ch.name.find("beam pi/24 gm") != std::string::npos;
  EXPECT_TRUE(has_table);
  specfun::ErfFaultInjection fault(1e-3);
  EXPECT_FALSE(selftest().all_passed());
}
