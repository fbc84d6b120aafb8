#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmwpt/analysis.hpp"
#include "mmwpt/montecarlo.hpp"

namespace mmwpt {

/// Config validation failure; the message starts with the offending key path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Engine { Analytic, MonteCarlo, Both };
enum class AntennaKind { Gaussian, FlatTop, Ula };
enum class EnergyAxis { Sigma, Lambda };

struct ExperimentConfig {
  std::string scenario = "default";
  double theta0 = 0.2617993877991494;  // pi/12
  std::vector<double> theta0_list{0.1308996938995747, 0.2617993877991494, 0.5235987755982988};
  std::vector<AntennaKind> antennas{AntennaKind::Gaussian, AntennaKind::FlatTop, AntennaKind::Ula};
  Engine engine = Engine::Both;
  double kappa = 0.25;  // element spacing over wavelength; recorded only

  NetworkParams net{};
  ChannelParams chan{};
  NonlinearEh nonlinear{};
  LinearEh linear{};
  std::vector<std::string> eh_variants{"linear", "nonlinear"};
  double eps_min = 0.0;  // W, lower limit of the average-DC integral

  CoverageSpec coverage{};

  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  double r_max = 0.0;
  unsigned workers = 0;

  std::vector<double> threshold_dbm{-50, -45, -40, -35, -30, -25, -20, -15, -10};
  std::vector<double> sigma_over_theta0{0.0, 0.25, 1.0 / 3.0, 0.5, 1.0};
  EnergyAxis energy_axis = EnergyAxis::Sigma;
  std::vector<double> lambda_grid{1e-5, 2e-5, 5e-5, 1e-4, 2e-4, 5e-4, 1e-3};
  double energy_sigma_over_theta0 = 0.0;  // fixed sigma for the lambda axis

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;
};

ExperimentConfig load_config(const std::string& path);

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

std::string to_string(Engine e);
std::string to_string(AntennaKind a);

AntennaPattern make_antenna(AntennaKind kind, double theta0);

/// Rows plus a block of "# key: value" comment lines written before them.
struct CsvTable {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void write(std::ostream& os) const;
};

/// Formats with 9 significant digits.
std::string fmt(double v);

CsvTable run_coverage_sweep(const ExperimentConfig& cfg);
CsvTable run_energy_sweep(const ExperimentConfig& cfg);
CsvTable run_rel_sweep(const ExperimentConfig& cfg);
CsvTable run_pdf_check(const ExperimentConfig& cfg, std::size_t grid_points = 400);

struct SelftestCheck {
  std::string name;
  double value = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;
  bool relative = false;
  bool pass = false;
};

struct SelftestReport {
  std::vector<SelftestCheck> checks;
  bool all_passed() const;
  void print(std::ostream& os) const;
};

/// Oracle suite: beam parameters, mainlobe probabilities, special-function dual
/// paths, gain-law normalization, series reconstruction.
SelftestReport selftest();

/// Build identification baked in at configure time.
std::string git_describe();

}  // namespace mmwpt
