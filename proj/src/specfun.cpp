#include "mmwpt/specfun.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mmwpt/errors.hpp"

namespace mmwpt::specfun {

namespace {

std::atomic<double> g_erf_offset{0.0};

struct Piece {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Piece& other) const { return error < other.error; }
};

// One 21-point Kronrod step with its embedded 10-point Gauss estimate. The rule
// is applied on [-1, 1] and rescaled here so the error estimate carries the
// interval length.
Piece kronrod_step(const Integrand& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double err = 0.0;
  auto g = [&](double x) { return f(mid + half * x); };
  const double r =
      boost::math::quadrature::gauss_kronrod<double, 21>::integrate(g, -1.0, 1.0, 0, 0.0, &err);
  if (!std::isfinite(r)) {
    throw NumericalError("integrand is not finite on [" + std::to_string(a) + ", " +
                             std::to_string(b) + "]",
                         r, std::numeric_limits<double>::infinity());
  }
  return {a, b, r * half, std::abs(err * half)};
}

}  // namespace

bool Tolerance::accepts(double value, double error) const {
  return error <= std::max(abs, rel * std::abs(value));
}

QuadResult integrate(const Integrand& f, std::span<const double> breakpoints, Tolerance tol,
                     int max_intervals) {
  if (breakpoints.size() < 2) throw std::invalid_argument("integrate: need at least two breakpoints");
  std::priority_queue<Piece> heap;
  long double value = 0.0L;
  long double error = 0.0L;
  std::vector<Piece> frozen;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i];
    const double b = breakpoints[i + 1];
    if (!(b > a)) {
      if (a == b) continue;
      throw std::invalid_argument("integrate: breakpoints must be increasing");
    }
    Piece p = kronrod_step(f, a, b);
    value += p.value;
    error += p.error;
    heap.push(p);
  }
  int intervals = static_cast<int>(heap.size());
  while (!tol.accepts(static_cast<double>(value), static_cast<double>(error)) && !heap.empty() &&
         intervals < max_intervals) {
    Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Interval is at the resolution of double; its error cannot shrink further.
      frozen.push_back(worst);
      continue;
    }
    Piece left = kronrod_step(f, worst.a, mid);
    Piece right = kronrod_step(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }
  // Re-sum from the pieces so the running updates do not accumulate cancellation.
  long double v = 0.0L;
  long double e = 0.0L;
  for (const auto& p : frozen) {
    v += p.value;
    e += p.error;
  }
  while (!heap.empty()) {
    v += heap.top().value;
    e += heap.top().error;
    heap.pop();
  }
  QuadResult res{static_cast<double>(v), static_cast<double>(e), intervals};
  if (!tol.accepts(res.value, res.error)) {
    throw NumericalError("adaptive quadrature did not reach tolerance (value " +
                             std::to_string(res.value) + ", error " + std::to_string(res.error) + ")",
                         res.value, res.error);
  }
  return res;
}

QuadResult integrate(const Integrand& f, double a, double b, Tolerance tol, int max_intervals) {
  if (a == b) return {};
  if (b < a) {
    QuadResult r = integrate(f, b, a, tol, max_intervals);
    r.value = -r.value;
    return r;
  }
  const double pts[2] = {a, b};
  return integrate(f, std::span<const double>(pts, 2), tol, max_intervals);
}

QuadResult integrate_to_infinity(const Integrand& f, double a, double scale, Tolerance tol,
                                 int max_intervals) {
  if (!(scale > 0.0)) throw std::invalid_argument("integrate_to_infinity: scale must be positive");
  auto g = [&](double t) {
    if (t >= 1.0) return 0.0;
    const double u = 1.0 - t;
    const double x = a + scale * t / u;
    const double v = f(x);
    return v == 0.0 ? 0.0 : v * scale / (u * u);
  };
  const double pts[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
  return integrate(g, std::span<const double>(pts, 5), tol, max_intervals);
}

double erf(double x) { return std::erf(x) + g_erf_offset.load(std::memory_order_relaxed); }

ErfFaultInjection::ErfFaultInjection(double offset)
    : previous_(g_erf_offset.exchange(offset)) {}

ErfFaultInjection::~ErfFaultInjection() { g_erf_offset.store(previous_); }

namespace {
bool is_pole(double x) { return x <= 0.0 && x == std::floor(x); }
}  // namespace

double gamma(double x) {
  if (is_pole(x)) throw std::domain_error("gamma: pole at non-positive integer");
  return std::tgamma(x);
}

double ln_gamma(double x) {
  if (is_pole(x)) throw std::domain_error("ln_gamma: pole at non-positive integer");
  return std::lgamma(x);
}

double binomial(int t, int q) {
  if (t < 0) throw std::domain_error("binomial: negative t");
  if (q < 0 || q > t) return 0.0;
  q = std::min(q, t - q);
  double r = 1.0;
  for (int i = 1; i <= q; ++i) r = r * (t - q + i) / i;
  return std::round(r);
}

double hyp2f1_euler(double a, double b, double z, Tolerance tol) {
  if (!(a > 0.0) || !(b > 0.0) || !(z >= -1.0)) {
    throw std::domain_error("hyp2f1_euler: requires a > 0, b > 0, z >= -1");
  }
  if (z == 0.0) return 1.0;
  // t = w^(1/b) turns b t^(b-1) dt into dw.
  const double inv_b = 1.0 / b;
  auto f = [=](double w) {
    const double t = std::pow(w, inv_b);
    return std::exp(-a * std::log1p(z * t));
  };
  return integrate(f, 0.0, 1.0, tol).value;
}

namespace {

void check_fox(const FoxHSpec& s) {
  if (!(s.z >= 0.0)) throw std::domain_error("fox_h_20_02: z must be non-negative");
  if (!(s.alpha_inv > 0.0)) throw std::domain_error("fox_h_20_02: alpha_inv must be positive");
  if (!(s.rho > 0.0)) throw std::domain_error("fox_h_20_02: rho must be positive");
}

// Integrates w(u) * Gamma(rho,1) density over (0, inf). The density is handled
// in log space and the range is split around its mode so large rho is cheap.
double gamma_expectation(double rho, const std::function<double(double)>& w, Tolerance tol) {
  const double lg = std::lgamma(rho);
  auto f = [&](double u) {
    if (u <= 0.0) return 0.0;
    const double wu = w(u);
    if (wu == 0.0) return 0.0;
    return wu * std::exp((rho - 1.0) * std::log(u) - u - lg);
  };
  const double mode = std::max(rho - 1.0, 0.0);
  const double sd = std::sqrt(rho);
  std::vector<double> pts{0.0};
  for (double k : {-8.0, -4.0, -2.0, 0.0, 2.0, 4.0, 8.0, 16.0}) {
    const double p = mode + k * sd;
    if (p > pts.back() + 1e-12) pts.push_back(p);
  }
  if (pts.size() < 3) pts.insert(pts.begin() + 1, 0.5 * pts.back());
  const double tail_start = pts.back();
  double body = integrate(f, std::span<const double>(pts), tol).value;
  double tail = integrate_to_infinity(f, tail_start, sd + 1.0, tol).value;
  return body + tail;
}

}  // namespace

double fox_h_20_02_normalized(const FoxHSpec& spec, Tolerance tol) {
  check_fox(spec);
  const double alpha = 1.0 / spec.alpha_inv;
  if (spec.z == 0.0) return alpha;
  const double za = std::pow(spec.z, alpha);
  auto w = [=](double u) { return std::exp(-za * std::pow(u, -alpha)); };
  return alpha * gamma_expectation(spec.rho, w, tol);
}

double fox_h_20_02(const FoxHSpec& spec, Tolerance tol) {
  return std::exp(std::lgamma(spec.rho)) * fox_h_20_02_normalized(spec, tol);
}

double fox_h_20_02_faded_normalized(const FoxHSpec& spec, int fading_m, Tolerance tol) {
  check_fox(spec);
  if (fading_m < 1) throw std::domain_error("fox_h_20_02_faded_normalized: fading order must be >= 1");
  const double alpha = 1.0 / spec.alpha_inv;
  if (spec.z == 0.0) return alpha;
  const double za = std::pow(spec.z, alpha);
  const double m = fading_m;
  auto w = [=](double u) { return std::exp(-m * std::log1p(za * std::pow(u, -alpha) / m)); };
  return alpha * gamma_expectation(spec.rho, w, tol);
}

bool StagnationSeries::add(double term) {
  if (done()) return true;
  // Kahan-Babuska summation in long double.
  const long double t = term;
  const long double s = sum_ + t;
  if (std::abs(sum_) >= std::abs(t)) {
    compensation_ += (sum_ - s) + t;
  } else {
    compensation_ += (t - s) + sum_;
  }
  sum_ = s;
  ++terms_;
  last_ = term;
  if (std::abs(term) < opts_.tol) {
    if (++quiet_run_ >= opts_.window) converged_ = true;
  } else {
    quiet_run_ = 0;
  }
  return done();
}

SeriesResult StagnationSeries::result() const {
  return {static_cast<double>(sum_ + compensation_), terms_, last_, converged_};
}

SeriesResult fox_h_shifted_series(double x, const FoxHSpec& spec, SeriesOptions opts) {
  if (!(x > 0.0 && x < 2.0)) throw std::domain_error("fox_h_shifted_series: x must lie in (0, 2)");
  StagnationSeries series(opts);
  const double d = 1.0 - x;
  const double pre = std::pow(x, spec.rho);
  for (int t = 0; !series.done(); ++t) {
    FoxHSpec st = spec;
    st.rho = spec.rho + t;
    // H_t / t! = Gamma(t + rho) / t! * (H_t / Gamma(t + rho)).
    const double ratio = std::exp(std::lgamma(st.rho) - std::lgamma(t + 1.0));
    const double dt = t == 0 ? 1.0 : std::pow(d, t);
    series.add(pre * dt * ratio * fox_h_20_02_normalized(st));
  }
  return series.result();
}

double far_field_moment(double alpha, double beta, Tolerance tol) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw std::domain_error("far_field_moment: alpha, beta must be positive");
  // r = e^s: int_0^inf exp((2 - alpha) s - beta e^s) ds. Beyond s_end the
  // integrand is below exp(-800) relative to its value at s = 0.
  const double s_end = std::log1p(800.0 / beta);
  auto f = [=](double s) { return std::exp((2.0 - alpha) * s - beta * std::exp(s)); };
  std::vector<double> pts;
  const int pieces = 16;
  for (int i = 0; i <= pieces; ++i) pts.push_back(s_end * i / pieces);
  return integrate(f, std::span<const double>(pts), tol).value;
}

}  // namespace mmwpt::specfun
