#include "mmwpt/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

#include "mmwpt/specfun.hpp"

namespace mmwpt {

namespace {

constexpr double kPi = std::numbers::pi;

double resolved_r_max(const McConfig& cfg) { return cfg.r_max > 0.0 ? cfg.r_max : default_r_max(cfg); }

// Calls fn(r, los) for each point of one realization.
template <class Fn>
void for_each_point(const McConfig& cfg, double r_max, Rng& rng, Fn&& fn) {
  const double lam = cfg.net.lambda_t;
  if (lam <= 0.0) return;
  const double r2_min = cfg.r_min_field * cfg.r_min_field;
  const double area = kPi * (r_max * r_max - r2_min);
  const auto n = std::poisson_distribution<std::uint64_t>(lam * area)(rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::uint64_t i = 0; i < n; ++i) {
    const double r = std::sqrt(r2_min + unit(rng) * (r_max * r_max - r2_min));
    const bool los = unit(rng) < std::exp(-cfg.chan.beta * r);
    fn(r, los);
  }
}

double fading(int m, bool disabled, Rng& rng) {
  if (disabled) return 1.0;
  return sample_fading(m, rng);
}

double rf_draw(const McConfig& cfg, double r_max, Rng& rng) {
  const auto& ch = cfg.chan;
  const auto& net = cfg.net;
  const double h0 = fading(ch.m_l, cfg.disable_fading, rng);
  const double g0 = gain(cfg.antenna, sample_bae(cfg.bae_assoc, rng)) *
                    gain(cfg.antenna, sample_bae(cfg.bae_assoc, rng));
  double e = net.pt * ch.c_l * std::pow(net.r0, -ch.alpha_l) * h0 * g0;
  const BaeModel unaligned = UniformBae{};
  for_each_point(cfg, r_max, rng, [&](double r, bool los) {
    const double gg = gain(cfg.antenna, sample_bae(unaligned, rng)) * gain(cfg.antenna, sample_bae(unaligned, rng));
    const double h = fading(los ? ch.m_l : ch.m_n, cfg.disable_fading, rng);
    const double pl = los ? ch.c_l * std::pow(r, -ch.alpha_l) : ch.c_n * std::pow(r, -ch.alpha_n);
    e += net.pt * pl * h * gg;
  });
  return e;
}

// Runs body(trial_index, rng) over all trials in fixed blocks, spread across
// workers. Block b always uses substream(seed, b).
template <class Body>
void run_blocks(const McConfig& cfg, Body&& body) {
  const std::uint64_t blocks = (cfg.trials + kTrialBlock - 1) / kTrialBlock;
  unsigned workers = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, blocks));
  auto run = [&](unsigned w) {
    for (std::uint64_t b = w; b < blocks; b += workers) {
      Rng rng = substream(cfg.seed, b);
      const std::uint64_t end = std::min(cfg.trials, (b + 1) * kTrialBlock);
      for (std::uint64_t i = b * kTrialBlock; i < end; ++i) body(i, rng);
    }
  };
  if (workers <= 1) {
    run(0);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
  for (auto& t : pool) t.join();
}

}  // namespace

void McConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("montecarlo: trials must be >= 1");
  if (r_max < 0.0) throw std::invalid_argument("montecarlo: r_max must be non-negative");
  if (r_min_field < 0.0) throw std::invalid_argument("montecarlo: r_min_field must be non-negative");
  if (r_max > 0.0 && r_max <= r_min_field) throw std::invalid_argument("montecarlo: r_max must exceed r_min_field");
  chan.validate();
  net.validate();
}

double mean_gain_product(const AntennaPattern& pattern) {
  auto f = [&](double t) { return gain(pattern, t); };
  std::vector<double> pts{-kPi};
  if (const auto* gp = std::get_if<GaussianPattern>(&pattern)) {
    pts.insert(pts.end(), {-gp->theta0, 0.0, gp->theta0});
  } else if (const auto* fp = std::get_if<FlatTopPattern>(&pattern)) {
    pts.insert(pts.end(), {-fp->theta3db, fp->theta3db});
  } else {
    const int na = std::get<UlaPattern>(pattern).na;
    for (int k = -na + 1; k < na; ++k) {
      const double t = 2.0 * kPi * k / na;
      if (t > -kPi && t < kPi) pts.push_back(t);
    }
  }
  pts.push_back(std::nextafter(kPi, 0.0));
  const double mean = specfun::integrate(f, std::span<const double>(pts), {1e-12, 1e-10}).value / (2.0 * kPi);
  return mean * mean;
}

double default_r_max(const McConfig& cfg, double rel_tail) {
  const auto& ch = cfg.chan;
  const auto& net = cfg.net;
  const double peak = peak_gain(cfg.antenna);
  const double serving = net.pt * peak * peak * ch.c_l * std::pow(net.r0, -ch.alpha_l);
  const double lo = std::max(4.0 * net.r0, cfg.r_min_field + 1.0);
  if (net.lambda_t <= 0.0) return lo;
  const double k = 2.0 * kPi * net.lambda_t * net.pt * mean_gain_product(cfg.antenna);
  // Field mean with the far-field lower limit; a lower bound on the total.
  const double field = k * (ch.c_l * specfun::far_field_moment(ch.alpha_l, ch.beta) +
                            ch.c_n * (1.0 / (ch.alpha_n - 2.0) - specfun::far_field_moment(ch.alpha_n, ch.beta)));
  const double target = rel_tail * (serving + field);
  // Tail bounds: int_R^inf r^(1-a) e^(-b r) dr <= R^(1-a) e^(-b R) / b and
  // int_R^inf r^(1-a) dr = R^(2-a) / (a - 2).
  auto tail = [&](double r) {
    return k * (ch.c_l * std::pow(r, 1.0 - ch.alpha_l) * std::exp(-ch.beta * r) / ch.beta +
                ch.c_n * std::pow(r, 2.0 - ch.alpha_n) / (ch.alpha_n - 2.0));
  };
  if (tail(lo) <= target) return lo;
  double a = lo;
  double b = 2.0 * lo;
  while (tail(b) > target) {
    a = b;
    b *= 2.0;
    if (b > 1e9) throw std::runtime_error("default_r_max: tail bound does not decay");
  }
  for (int i = 0; i < 100 && b - a > 1e-3 * a; ++i) {
    const double mid = 0.5 * (a + b);
    (tail(mid) > target ? a : b) = mid;
  }
  return b;
}

std::vector<FieldPoint> sample_field(const McConfig& cfg, Rng& rng) {
  std::vector<FieldPoint> pts;
  for_each_point(cfg, resolved_r_max(cfg), rng, [&](double r, bool los) { pts.push_back({r, los}); });
  return pts;
}

double simulate_rf(const McConfig& cfg, Rng& rng) { return rf_draw(cfg, resolved_r_max(cfg), rng); }

std::vector<double> simulate_rf_trials(const McConfig& cfg) {
  cfg.validate();
  const double r_max = resolved_r_max(cfg);
  std::vector<double> out(cfg.trials);
  run_blocks(cfg, [&](std::uint64_t i, Rng& rng) { out[i] = rf_draw(cfg, r_max, rng); });
  return out;
}

McEstimate wilson_interval(std::uint64_t successes, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("wilson_interval: no trials");
  const double z = 1.959963984540054;
  const double nn = static_cast<double>(n);
  const double p = successes / nn;
  const double denom = 1.0 + z * z / nn;
  const double center = (p + z * z / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / denom;
  McEstimate e;
  e.mean = p;
  e.ci_lo = std::max(0.0, center - half);
  e.ci_hi = std::min(1.0, center + half);
  e.ci_halfwidth = half;
  e.trials = n;
  return e;
}

McEstimate normal_interval(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("normal_interval: no values");
  long double s = 0.0L;
  for (double x : v) s += x;
  const long double mean = s / v.size();
  long double ss = 0.0L;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double var = v.size() > 1 ? static_cast<double>(ss / (v.size() - 1)) : 0.0;
  McEstimate e;
  e.mean = static_cast<double>(mean);
  e.ci_halfwidth = 1.959963984540054 * std::sqrt(var / v.size());
  e.ci_lo = e.mean - e.ci_halfwidth;
  e.ci_hi = e.mean + e.ci_halfwidth;
  e.trials = v.size();
  return e;
}

std::vector<McEstimate> estimate_coverage_curve(const McConfig& cfg, std::span<const double> eps_th) {
  std::vector<double> dc = simulate_rf_trials(cfg);
  for (double& x : dc) x = eh_dc(cfg.eh, x);
  std::sort(dc.begin(), dc.end());
  std::vector<McEstimate> out;
  for (double th : eps_th) {
    const auto above = dc.end() - std::upper_bound(dc.begin(), dc.end(), th);
    out.push_back(wilson_interval(static_cast<std::uint64_t>(above), dc.size()));
  }
  return out;
}

McEstimate estimate_coverage(const McConfig& cfg, double eps_th) {
  const double th[1] = {eps_th};
  return estimate_coverage_curve(cfg, th).front();
}

McEstimate estimate_mean_energy(const McConfig& cfg) {
  std::vector<double> v = simulate_rf_trials(cfg);
  for (double& x : v) x = eh_dc(cfg.eh, x);
  return normal_interval(v);
}

McEstimate estimate_thresholded_mean(const McConfig& cfg, double eps_min) {
  std::vector<double> v = simulate_rf_trials(cfg);
  for (double& x : v) {
    const double dc = eh_dc(cfg.eh, x);
    x = dc > eps_min ? dc : 0.0;
  }
  return normal_interval(v);
}

McEstimate estimate_rel(const McConfig& cfg) {
  cfg.validate();
  const double peak = peak_gain(cfg.antenna);
  std::vector<double> v(cfg.trials);
  run_blocks(cfg, [&](std::uint64_t i, Rng& rng) {
    const double a = sample_bae(cfg.bae_assoc, rng);
    const double b = sample_bae(cfg.bae_assoc, rng);
    v[i] = 1.0 - gain(cfg.antenna, a) * gain(cfg.antenna, b) / (peak * peak);
  });
  return normal_interval(v);
}

double sample_fading(int m, Rng& rng) { return std::gamma_distribution<double>(m, 1.0 / m)(rng); }

}  // namespace mmwpt
