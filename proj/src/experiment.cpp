#include "mmwpt/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <set>

#include "mmwpt/gain_stats.hpp"

#ifndef MMWPT_GIT_DESCRIBE
#define MMWPT_GIT_DESCRIBE "unknown"
#endif

namespace mmwpt {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

// Reads one JSON object, reporting failures with their dotted key path and
// rejecting keys it was never asked about.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where("") + ": expected an object");
  }

  template <class T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where(key) + ": " + e.what());
    }
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  ObjectReader child(const std::string& key) {
    seen_.insert(key);
    static const json kEmpty = json::object();
    return ObjectReader(j_.contains(key) ? j_.at(key) : kEmpty, where(key));
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw ConfigError(where(k) + ": unknown key");
    }
  }

  std::string where(const std::string& key) const {
    if (path_.empty()) return key;
    return key.empty() ? path_ : path_ + "." + key;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Engine parse_engine(const std::string& s, const std::string& path) {
  if (s == "analytic") return Engine::Analytic;
  if (s == "mc" || s == "montecarlo") return Engine::MonteCarlo;
  if (s == "both") return Engine::Both;
  throw ConfigError(path + ": engine must be analytic, mc or both (got '" + s + "')");
}

AntennaKind parse_antenna(const std::string& s, const std::string& path) {
  if (s == "gaussian") return AntennaKind::Gaussian;
  if (s == "flattop") return AntennaKind::FlatTop;
  if (s == "ula") return AntennaKind::Ula;
  throw ConfigError(path + ": antenna must be gaussian, flattop or ula (got '" + s + "')");
}

void check_grid(const std::vector<double>& g, const std::string& path) {
  if (g.empty()) throw ConfigError(path + ": grid must be non-empty");
  for (std::size_t i = 1; i < g.size(); ++i) {
    if (!(g[i] > g[i - 1])) throw ConfigError(path + ": grid must be strictly increasing");
  }
}

bool wants_analytic(Engine e) { return e != Engine::MonteCarlo; }
bool wants_mc(Engine e) { return e != Engine::Analytic; }

McConfig mc_config(const ExperimentConfig& cfg, AntennaKind kind, double theta0, double sigma) {
  McConfig mc;
  mc.trials = cfg.trials;
  mc.seed = cfg.seed;
  mc.r_max = cfg.r_max;
  mc.workers = cfg.workers;
  mc.antenna = make_antenna(kind, theta0);
  mc.bae_assoc = gaussian_bae(sigma);
  mc.chan = cfg.chan;
  mc.net = cfg.net;
  mc.eh = cfg.nonlinear;
  return mc;
}

void add_common_meta(CsvTable& t, const ExperimentConfig& cfg, const std::string& op) {
  t.meta.emplace_back("operation", op);
  t.meta.emplace_back("scenario", cfg.scenario);
  t.meta.emplace_back("git_describe", git_describe());
  t.meta.emplace_back("seed", std::to_string(cfg.seed));
  t.meta.emplace_back("trials", std::to_string(cfg.trials));
  std::ostringstream tol;
  tol << "series_tol=" << fmt(cfg.coverage.series.tol) << " series_window=" << cfg.coverage.series.window
      << " series_max_terms=" << cfg.coverage.series.max_terms << " quad_abs=" << fmt(cfg.coverage.quad.abs)
      << " quad_rel=" << fmt(cfg.coverage.quad.rel) << " band_x_min=" << fmt(cfg.coverage.band_x_min);
  t.meta.emplace_back("tolerances", tol.str());
  t.meta.emplace_back("config", cfg.to_json().dump());
}

std::string ci_cell(const McEstimate& e) { return fmt(e.ci_halfwidth); }

}  // namespace

double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
double watts_to_dbm(double w) { return 10.0 * std::log10(w / 1e-3); }

std::string to_string(Engine e) {
  switch (e) {
    case Engine::Analytic:
      return "analytic";
    case Engine::MonteCarlo:
      return "mc";
    default:
      return "both";
  }
}

std::string to_string(AntennaKind a) {
  switch (a) {
    case AntennaKind::Gaussian:
      return "gaussian";
    case AntennaKind::FlatTop:
      return "flattop";
    default:
      return "ula";
  }
}

AntennaPattern make_antenna(AntennaKind kind, double theta0) {
  switch (kind) {
    case AntennaKind::Gaussian:
      return gaussian_from_beamwidth(theta0);
    case AntennaKind::FlatTop:
      return flat_top_matching(gaussian_from_beamwidth(theta0));
    default:
      return ula_matching(theta0);
  }
}

std::string git_describe() { return MMWPT_GIT_DESCRIBE; }

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(9) << v;
  return os.str();
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  ObjectReader top(j, "");
  top.get("scenario", c.scenario);
  top.get("theta0", c.theta0);
  top.get("theta0_list", c.theta0_list);
  top.get("kappa", c.kappa);
  if (top.has("antennas")) {
    std::vector<std::string> names;
    top.get("antennas", names);
    c.antennas.clear();
    for (const auto& n : names) c.antennas.push_back(parse_antenna(n, "antennas"));
  }
  if (top.has("engine")) {
    std::string e;
    top.get("engine", e);
    c.engine = parse_engine(e, "engine");
  }

  auto net = top.child("network");
  net.get("lambda_t", c.net.lambda_t);
  net.get("r0", c.net.r0);
  net.get("pt", c.net.pt);
  net.finish();

  auto ch = top.child("channel");
  ch.get("alpha_l", c.chan.alpha_l);
  ch.get("alpha_n", c.chan.alpha_n);
  ch.get("c_l", c.chan.c_l);
  ch.get("c_n", c.chan.c_n);
  ch.get("m_l", c.chan.m_l);
  ch.get("m_n", c.chan.m_n);
  ch.get("beta", c.chan.beta);
  ch.finish();

  auto eh = top.child("eh");
  eh.get("pm", c.nonlinear.pm);
  eh.get("pa", c.nonlinear.pa);
  eh.get("pb", c.nonlinear.pb);
  eh.get("zeta", c.linear.zeta);
  eh.get("variants", c.eh_variants);
  eh.get("eps_min", c.eps_min);
  eh.finish();

  auto cov = top.child("coverage");
  cov.get("k_order", c.coverage.k_order);
  cov.get("series_tol", c.coverage.series.tol);
  cov.get("series_window", c.coverage.series.window);
  cov.get("series_max_terms", c.coverage.series.max_terms);
  cov.get("quad_abs", c.coverage.quad.abs);
  cov.get("quad_rel", c.coverage.quad.rel);
  cov.get("band_x_min", c.coverage.band_x_min);
  cov.finish();

  auto mc = top.child("montecarlo");
  mc.get("trials", c.trials);
  mc.get("seed", c.seed);
  mc.get("r_max", c.r_max);
  mc.get("workers", c.workers);
  mc.finish();

  auto sw = top.child("sweep");
  sw.get("threshold_dbm", c.threshold_dbm);
  sw.get("sigma_over_theta0", c.sigma_over_theta0);
  sw.get("lambda_t", c.lambda_grid);
  sw.get("energy_sigma_over_theta0", c.energy_sigma_over_theta0);
  if (sw.has("energy_axis")) {
    std::string axis;
    sw.get("energy_axis", axis);
    if (axis == "sigma") {
      c.energy_axis = EnergyAxis::Sigma;
    } else if (axis == "lambda_t") {
      c.energy_axis = EnergyAxis::Lambda;
    } else {
      throw ConfigError(sw.where("energy_axis") + ": must be sigma or lambda_t");
    }
  }
  sw.finish();

  top.finish();
  c.validate();
  return c;
}

json ExperimentConfig::to_json() const {
  json j;
  j["scenario"] = scenario;
  j["theta0"] = theta0;
  j["theta0_list"] = theta0_list;
  j["kappa"] = kappa;
  std::vector<std::string> ant;
  for (auto a : antennas) ant.push_back(to_string(a));
  j["antennas"] = ant;
  j["engine"] = to_string(engine);
  j["network"] = {{"lambda_t", net.lambda_t}, {"r0", net.r0}, {"pt", net.pt}};
  j["channel"] = {{"alpha_l", chan.alpha_l}, {"alpha_n", chan.alpha_n}, {"c_l", chan.c_l}, {"c_n", chan.c_n},
                  {"m_l", chan.m_l},         {"m_n", chan.m_n},         {"beta", chan.beta}};
  j["eh"] = {{"pm", nonlinear.pm},     {"pa", nonlinear.pa}, {"pb", nonlinear.pb},
             {"zeta", linear.zeta},    {"variants", eh_variants}, {"eps_min", eps_min}};
  j["coverage"] = {{"k_order", coverage.k_order},
                   {"series_tol", coverage.series.tol},
                   {"series_window", coverage.series.window},
                   {"series_max_terms", coverage.series.max_terms},
                   {"quad_abs", coverage.quad.abs},
                   {"quad_rel", coverage.quad.rel},
                   {"band_x_min", coverage.band_x_min}};
  j["montecarlo"] = {{"trials", trials}, {"seed", seed}, {"r_max", r_max}, {"workers", workers}};
  j["sweep"] = {{"threshold_dbm", threshold_dbm},
                {"sigma_over_theta0", sigma_over_theta0},
                {"energy_axis", energy_axis == EnergyAxis::Sigma ? "sigma" : "lambda_t"},
                {"lambda_t", lambda_grid},
                {"energy_sigma_over_theta0", energy_sigma_over_theta0}};
  return j;
}

void ExperimentConfig::validate() const {
  if (!(theta0 > 0.0 && theta0 < kPi)) throw ConfigError("theta0: must lie in (0, pi)");
  check_grid(theta0_list, "theta0_list");
  if (antennas.empty()) throw ConfigError("antennas: must be non-empty");
  check_grid(threshold_dbm, "sweep.threshold_dbm");
  check_grid(sigma_over_theta0, "sweep.sigma_over_theta0");
  if (sigma_over_theta0.front() < 0.0) throw ConfigError("sweep.sigma_over_theta0: must be non-negative");
  check_grid(lambda_grid, "sweep.lambda_t");
  if (lambda_grid.front() < 0.0) throw ConfigError("sweep.lambda_t: must be non-negative");
  if (energy_sigma_over_theta0 < 0.0) throw ConfigError("sweep.energy_sigma_over_theta0: must be non-negative");
  if (trials < 1) throw ConfigError("montecarlo.trials: must be >= 1");
  if (r_max < 0.0) throw ConfigError("montecarlo.r_max: must be non-negative");
  for (const auto& v : eh_variants) {
    if (v != "linear" && v != "nonlinear") throw ConfigError("eh.variants: entries must be linear or nonlinear");
  }
  if (!(nonlinear.pm > 0.0 && nonlinear.pa > 0.0 && nonlinear.pb > 0.0)) {
    throw ConfigError("eh: pm, pa and pb must be positive");
  }
  if (!(linear.zeta > 0.0 && linear.zeta <= 1.0)) throw ConfigError("eh.zeta: must lie in (0, 1]");
  if (!(eps_min >= 0.0 && eps_min < nonlinear.pm)) throw ConfigError("eh.eps_min: must lie in [0, pm)");
  try {
    net.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("network: ") + e.what());
  }
  try {
    chan.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("channel: ") + e.what());
  }
  try {
    coverage.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("coverage: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return ExperimentConfig::from_json(j);
}

void CsvTable::write(std::ostream& os) const {
  for (const auto& [k, v] : meta) os << "# " << k << ": " << v << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << "\n";
  }
}

CsvTable run_coverage_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  CsvTable t;
  add_common_meta(t, cfg, "coverage-sweep");
  t.meta.emplace_back("theta0", fmt(cfg.theta0));
  t.meta.emplace_back("convention", "field radius from 0 (coverage)");
  t.columns = {"threshold_dbm", "engine", "antenna", "sigma", "p_ec", "ci"};
  std::vector<double> eps_w;
  for (double d : cfg.threshold_dbm) eps_w.push_back(dbm_to_watts(d));

  for (AntennaKind kind : cfg.antennas) {
    for (double ratio : cfg.sigma_over_theta0) {
      const double sigma = ratio * cfg.theta0;
      if (wants_analytic(cfg.engine) && kind == AntennaKind::Gaussian) {
        const GaussianPattern p = gaussian_from_beamwidth(cfg.theta0);
        for (std::size_t i = 0; i < eps_w.size(); ++i) {
          const double pec = energy_coverage(eps_w[i], cfg.coverage, cfg.net, cfg.chan, p, sigma, cfg.nonlinear);
          t.rows.push_back({fmt(cfg.threshold_dbm[i]), "analytic", to_string(kind), fmt(sigma), fmt(pec), ""});
        }
      }
      if (wants_mc(cfg.engine)) {
        McConfig mc = mc_config(cfg, kind, cfg.theta0, sigma);
        mc.r_min_field = 0.0;
        if (mc.r_max == 0.0) mc.r_max = default_r_max(mc);
        t.meta.emplace_back("r_max." + to_string(kind) + ".sigma=" + fmt(sigma), fmt(mc.r_max));
        const auto est = estimate_coverage_curve(mc, eps_w);
        for (std::size_t i = 0; i < eps_w.size(); ++i) {
          t.rows.push_back({fmt(cfg.threshold_dbm[i]), "mc", to_string(kind), fmt(sigma), fmt(est[i].mean),
                            ci_cell(est[i])});
        }
      }
    }
  }
  return t;
}

CsvTable run_energy_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  CsvTable t;
  add_common_meta(t, cfg, "energy-sweep");
  const bool by_sigma = cfg.energy_axis == EnergyAxis::Sigma;
  t.meta.emplace_back("theta0", fmt(cfg.theta0));
  t.meta.emplace_back("axis", by_sigma ? "sigma" : "lambda_t");
  t.meta.emplace_back("convention", "field radius from 1 m (energy); analytic nonlinear rows integrate the coverage curve");
  t.columns = {"axis_value", "engine", "antenna", "eh_variant", "mean_energy_w", "ci", "rel"};

  std::vector<std::pair<double, double>> points;  // (sigma, lambda_t)
  if (by_sigma) {
    for (double r : cfg.sigma_over_theta0) points.emplace_back(r * cfg.theta0, cfg.net.lambda_t);
  } else {
    for (double l : cfg.lambda_grid) points.emplace_back(cfg.energy_sigma_over_theta0 * cfg.theta0, l);
  }

  for (AntennaKind kind : cfg.antennas) {
    for (const auto& [sigma, lambda] : points) {
      const double axis = by_sigma ? sigma : lambda;
      NetworkParams net = cfg.net;
      net.lambda_t = lambda;
      if (wants_analytic(cfg.engine) && kind == AntennaKind::Gaussian) {
        const GaussianPattern p = gaussian_from_beamwidth(cfg.theta0);
        const double r = rel(p, sigma);
        for (const auto& v : cfg.eh_variants) {
          double e = 0.0;
          if (v == "linear") {
            e = cfg.linear.zeta * avg_rf_energy(net, cfg.chan, p, sigma).total();
          } else {
            e = avg_dc_energy(cfg.eps_min, cfg.coverage, net, cfg.chan, p, sigma, cfg.nonlinear);
          }
          t.rows.push_back({fmt(axis), "analytic", to_string(kind), v, fmt(e), "", fmt(r)});
        }
      }
      if (wants_mc(cfg.engine)) {
        McConfig mc = mc_config(cfg, kind, cfg.theta0, sigma);
        mc.net = net;
        mc.r_min_field = 1.0;
        if (mc.r_max == 0.0) mc.r_max = default_r_max(mc);
        const std::vector<double> rf = simulate_rf_trials(mc);
        const McEstimate r = estimate_rel(mc);
        for (const auto& v : cfg.eh_variants) {
          std::vector<double> x(rf.size());
          for (std::size_t i = 0; i < rf.size(); ++i) {
            if (v == "linear") {
              x[i] = cfg.linear.zeta * rf[i];
            } else {
              const double dc = eh_dc(cfg.nonlinear, rf[i]);
              x[i] = dc > cfg.eps_min ? dc : 0.0;
            }
          }
          const McEstimate e = normal_interval(x);
          t.rows.push_back({fmt(axis), "mc", to_string(kind), v, fmt(e.mean), ci_cell(e), fmt(r.mean)});
        }
      }
    }
  }
  return t;
}

CsvTable run_rel_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  CsvTable t;
  add_common_meta(t, cfg, "rel-sweep");
  t.columns = {"theta0", "sigma", "engine", "antenna", "rel", "ci"};
  for (AntennaKind kind : cfg.antennas) {
    for (double th : cfg.theta0_list) {
      for (double ratio : cfg.sigma_over_theta0) {
        const double sigma = ratio * th;
        if (wants_analytic(cfg.engine) && kind == AntennaKind::Gaussian) {
          t.rows.push_back({fmt(th), fmt(sigma), "analytic", to_string(kind),
                            fmt(rel(gaussian_from_beamwidth(th), sigma)), ""});
        }
        if (wants_mc(cfg.engine)) {
          const McEstimate r = estimate_rel(mc_config(cfg, kind, th, sigma));
          t.rows.push_back({fmt(th), fmt(sigma), "mc", to_string(kind), fmt(r.mean), ci_cell(r)});
        }
      }
    }
  }
  return t;
}

CsvTable run_pdf_check(const ExperimentConfig& cfg, std::size_t grid_points) {
  cfg.validate();
  CsvTable t;
  add_common_meta(t, cfg, "pdf-check");
  t.meta.emplace_back("theta0", fmt(cfg.theta0));
  t.columns = {"law", "bae", "sigma", "kind", "omega", "value"};
  const GaussianPattern p = gaussian_from_beamwidth(cfg.theta0);
  const double g = p.g;

  struct Entry {
    std::string law;
    std::string bae;
    double sigma;
    GainDistribution dist;
  };
  std::vector<Entry> entries;
  auto add_model = [&](const BaeModel& m, const std::string& name, double sigma) {
    entries.push_back({"single_exact", name, sigma, single_gain_pdf(p, m)});
    entries.push_back({"cascaded_exact", name, sigma, cascaded_pdf_exact(p, m)});
    entries.push_back({"cascaded_approx", name, sigma, cascaded_pdf_approx(p, m)});
  };
  for (double ratio : cfg.sigma_over_theta0) {
    if (ratio > 0.0) add_model(TruncatedGaussianBae{ratio * cfg.theta0}, "gaussian", ratio * cfg.theta0);
  }
  add_model(UniformBae{}, "uniform", 0.0);

  // Log-spaced grid over [g^2, 1], nudged off the segment endpoints.
  std::vector<double> grid;
  const double lo = std::log(g * g);
  for (std::size_t i = 0; i < grid_points; ++i) {
    grid.push_back(std::exp(lo + (0.0 - lo) * (i + 0.5) / grid_points));
  }
  for (const auto& e : entries) {
    for (double x : grid) {
      t.rows.push_back({e.law, e.bae, fmt(e.sigma), "density", fmt(x), fmt(e.dist.density(x))});
    }
    for (const auto& a : e.dist.atoms) {
      t.rows.push_back({e.law, e.bae, fmt(e.sigma), "atom", fmt(a.location), fmt(a.mass)});
    }
  }
  return t;
}

}  // namespace mmwpt
