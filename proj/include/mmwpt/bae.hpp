#pragma once

#include <variant>

#include "mmwpt/rng.hpp"

namespace mmwpt {

struct PerfectAlignment {};

/// Zero-mean Gaussian error truncated to [-pi, pi).
struct TruncatedGaussianBae {
  double sigma = 0.0;
};

/// Error uniform on [-pi, pi); used for links that are not beam-trained.
struct UniformBae {};

using BaeModel = std::variant<PerfectAlignment, TruncatedGaussianBae, UniformBae>;

/// TruncatedGaussian(sigma) for sigma > 0, Perfect for sigma == 0.
BaeModel gaussian_bae(double sigma);

/// Density on [-pi, pi). Throws std::logic_error for Perfect (pure atom) and
/// std::domain_error for psi outside the support.
double bae_pdf(const BaeModel& model, double psi);

/// Probability that |psi| <= theta0.
double mainlobe_prob(const BaeModel& model, double theta0);

/// One draw from the model's law.
double sample_bae(const BaeModel& model, Rng& rng);

}  // namespace mmwpt
