#pragma once

#include <functional>
#include <span>

namespace mmwpt::specfun {

/// Absolute/relative tolerance pair. A result is accepted when its error
/// estimate is at most max(abs, rel * |value|).
struct Tolerance {
  double abs = 1e-10;
  double rel = 1e-8;

  bool accepts(double value, double error) const;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive 21-point Gauss-Kronrod quadrature on [a, b].
/// Throws NumericalError when the tolerance is not met within max_intervals.
QuadResult integrate(const Integrand& f, double a, double b, Tolerance tol = {},
                     int max_intervals = 4000);

/// Same, over the consecutive pieces [p0,p1], [p1,p2], ... sharing one error budget.
QuadResult integrate(const Integrand& f, std::span<const double> breakpoints,
                     Tolerance tol = {}, int max_intervals = 4000);

/// Integral over [a, inf) through the map x = a + scale * t / (1 - t).
QuadResult integrate_to_infinity(const Integrand& f, double a, double scale,
                                 Tolerance tol = {}, int max_intervals = 4000);

// Elementary special functions. erf goes through a fault-injection hook used by
// the self-test to prove the oracle suite detects a perturbed primitive.
double erf(double x);
double gamma(double x);
double ln_gamma(double x);
double binomial(int t, int q);

/// Adds a constant offset to specfun::erf for the lifetime of the guard.
/// Test hook only; not thread-safe with respect to concurrent evaluations.
class ErfFaultInjection {
 public:
  explicit ErfFaultInjection(double offset);
  ~ErfFaultInjection();
  ErfFaultInjection(const ErfFaultInjection&) = delete;
  ErfFaultInjection& operator=(const ErfFaultInjection&) = delete;

 private:
  double previous_;
};

/// 2F1(a, b; 1 + b; -z) through the Euler-type integral
///   int_0^1 b (1 + z t)^(-a) t^(b-1) dt,   a > 0, b > 0, z >= -1,
/// with the t^(b-1) endpoint removed by t = w^(1/b).
double hyp2f1_euler(double a, double b, double z, Tolerance tol = {1e-15, 1e-12});

/// Parameters of H_{0,2}^{2,0}[z | (rho, 1), (0, alpha_inv)].
struct FoxHSpec {
  double rho = 2.0;
  double alpha_inv = 0.5;
  double z = 0.0;
};

/// H_{0,2}^{2,0}[z | (rho,1),(0,1/alpha)] = alpha * int_0^inf u^(rho-1) exp(-u - z^alpha u^(-alpha)) du.
double fox_h_20_02(const FoxHSpec& spec, Tolerance tol = {0.0, 1e-11});

/// H / Gamma(rho): the expectation of alpha * exp(-z^alpha u^(-alpha)) under
/// u ~ Gamma(rho, 1). Bounded by alpha, so it stays finite for large rho.
double fox_h_20_02_normalized(const FoxHSpec& spec, Tolerance tol = {1e-14, 1e-11});

/// E_h{ H[z h^(1/alpha)] } / Gamma(rho) for h ~ Gamma(m, 1/m). The fading
/// average is taken inside the kernel: E_h exp(-s h) = (1 + s/m)^(-m).
double fox_h_20_02_faded_normalized(const FoxHSpec& spec, int fading_m,
                                    Tolerance tol = {1e-14, 1e-11});

/// Truncation rule shared by every infinite series: stop once |term| < tol for
/// `window` consecutive terms, give up after max_terms.
struct SeriesOptions {
  double tol = 1e-10;
  int window = 3;
  int max_terms = 60;
};

struct SeriesResult {
  double value = 0.0;
  int terms = 0;
  double last_term = 0.0;
  bool converged = false;
};

class StagnationSeries {
 public:
  explicit StagnationSeries(SeriesOptions opts = {}) : opts_(opts) {}

  /// Adds a term. Returns true once the series should stop (converged or capped).
  bool add(double term);
  bool done() const { return converged_ || terms_ >= opts_.max_terms; }
  SeriesResult result() const;

 private:
  SeriesOptions opts_;
  long double sum_ = 0.0L;
  long double compensation_ = 0.0L;
  int terms_ = 0;
  int quiet_run_ = 0;
  double last_ = 0.0;
  bool converged_ = false;
};

/// Shifted-argument expansion of the H function:
///   H[x y | (rho,1),(0,1/a)] = x^rho sum_t (1 - x)^t / t! H[y | (t+rho,1),(0,1/a)].
/// `spec.z` holds y. Converges for 0 < x < 2.
SeriesResult fox_h_shifted_series(double x, const FoxHSpec& spec, SeriesOptions opts = {});

/// int_1^inf r^(1-alpha) exp(-beta r) dr by adaptive quadrature in log r.
double far_field_moment(double alpha, double beta, Tolerance tol = {0.0, 1e-12});

}  // namespace mmwpt::specfun
