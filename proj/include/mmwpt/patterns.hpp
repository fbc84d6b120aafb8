#pragma once

#include <variant>

namespace mmwpt {

/// Gaussian mainlobe with a constant sidelobe floor.
struct GaussianPattern {
  double theta0 = 0.0;    // mainlobe half-width, rad
  double theta3db = 0.0;  // half-power half-width, rad
  double eta = 0.0;       // mainlobe decay, 1/rad^2
  double gm = 0.0;        // peak gain
  double gs = 0.0;        // sidelobe gain
  double g = 0.0;         // gs / gm
};

/// Two-level pattern: gm inside |theta| <= theta3db, gs elsewhere.
struct FlatTopPattern {
  double gm = 0.0;
  double gs = 0.0;
  double theta3db = 0.0;
};

/// Array factor of a uniform linear array with na elements.
struct UlaPattern {
  int na = 2;
};

using AntennaPattern = std::variant<GaussianPattern, FlatTopPattern, UlaPattern>;

/// Normalized sidelobe level of the Gaussian model, 10^-2.028.
double gaussian_sidelobe_level();

/// Builds the Gaussian model from its mainlobe half-width. Warns on stderr when
/// theta0 is outside [pi/24, pi/6]; throws std::domain_error if theta0 <= 0.
GaussianPattern gaussian_from_beamwidth(double theta0);

/// Flat-top model sharing the peak gain, sidelobe gain and 3 dB width of `g`.
FlatTopPattern flat_top_matching(const GaussianPattern& g);

/// ULA whose first-null half-width is closest to theta0: na = round(5.64/theta0).
UlaPattern ula_matching(double theta0);

/// Maps any angle into [-pi, pi).
double wrap_angle(double theta);

/// Linear gain at theta in [-pi, pi). Throws std::domain_error outside that range.
double gain(const AntennaPattern& pattern, double theta);
double gain(const GaussianPattern& p, double theta);
double gain(const FlatTopPattern& p, double theta);
double gain(const UlaPattern& p, double theta);

/// Boresight gain.
double peak_gain(const AntennaPattern& pattern);

/// gain / gm, in [g, 1].
double normalized_gain(const GaussianPattern& p, double theta);

}  // namespace mmwpt
