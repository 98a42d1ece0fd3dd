#pragma once

#include <array>
#include <optional>
#include <vector>

#include "qwalk/lattice.hpp"

namespace qwalk {

/// Selects one of the four eigenvalue branches of the stationary-measure
/// family plus the sign of the square root of q (both sign choices are
/// meaningful; the principal branch is snapped away from the negative real
/// axis so exact phase inputs land on a deterministic side of the cut).
struct StationaryBranch {
  int index = 1;       // 1..4
  int sqrt_sign = +1;  // applied to the principal sqrt(q)
  double c = 1.0;      // positive scale of the eigenvector
};

/// Eigenvector of the infinite-line evolution operator evaluated on a window,
/// with its measure and the geometric rate on each side.
struct EigenPacket {
  Complex lambda;
  Complex theta_s;  // Psi(x) = (-theta_s)^x Psi(0) on x>=1, theta_s^{|x|} (...) on x<=-1
  std::int64_t min_x = 0;
  std::vector<AmplitudePair> psi;
  MeasureProfile measure;
  double decay_rate_right = 0.0;  // mu(x+1)/mu(x) for x >= 1
  double decay_rate_left = 0.0;   // mu(x-1)/mu(x) for x <= -1

  AmplitudePair at(std::int64_t x) const;
};

/// Initial-state data for the limit measures: alpha = a e^{i phi1},
/// beta = b e^{i phi2} with a, b >= 0 and a^2 + b^2 = 1.
struct LimitMeasureSpec {
  PhasePair phases;
  double a = 1.0;
  double b = 0.0;
  double phi1 = 0.0;
  double phi2 = 0.0;

  LimitMeasureSpec() = default;
  LimitMeasureSpec(const PhasePair& ph, double a_, double b_, double p1, double p2);
  double phi12() const { return phi1 - phi2; }
};

/// Weak limit density C delta_0 + w(x) f_K(x; 1/sqrt2).
struct WeakLimitDensity {
  double delta_mass = 0.0;  // C
  double t2_plus = 0.0, t1_plus = 0.0;    // w numerator coefficients, x >= 0
  double t2_minus = 0.0, t1_minus = 0.0;  // x < 0
  double s1 = 0.0, s0 = 0.0;              // shared denominator s1 x^2 + s0

  /// Rational weight w(x) on (-1/sqrt2, 1/sqrt2).
  double w(double x) const;
  /// Konno kernel 1/(pi (1-x^2) sqrt(1-2x^2)); throws std::domain_error
  /// outside the open support.
  static double konno_kernel(double x);
  /// w(x) f_K(x); throws std::domain_error outside the support.
  double continuous_density(double x) const;
  /// Integral of w f_K over the support (singularity removed by
  /// x = sin(u)/sqrt2), absolute accuracy ~1e-10.
  double continuous_mass() const;
};

/// Closed-form measures --------------------------------------------------------

/// Eigenvector branch of the eigenvalue problem U^(s) Psi = lambda Psi with
/// Psi(0) = (c/sqrt2) [1, (r^- +- sqrt q)/2]; throws std::domain_error on a
/// singular branch (vanishing -r^- -+ sqrt q or numerator).
EigenPacket stationary_eigenpacket(const PhasePair& phases, const StationaryBranch& branch,
                                   std::int64_t window);

/// Closed-form stationary measure mu(x) = ||Psi(x)||^2 of the same branch.
double stationary_measure_closed_form(const PhasePair& phases, const StationaryBranch& branch,
                                      std::int64_t x);

/// Time-averaged limit measure at position x.
double time_averaged_limit_measure(const LimitMeasureSpec& spec, std::int64_t x);

/// C = sum_x time_averaged_limit_measure(x), summed in closed form.
double delta_mass_C(const LimitMeasureSpec& spec);

/// Full weak-limit data for the spec.
WeakLimitDensity weak_limit_density(const LimitMeasureSpec& spec);

/// Unit-circle singular points of the time-space generating function; empty
/// for the homogeneous walk.
std::vector<Complex> singular_points(const LimitMeasureSpec& spec);

/// |Lambda0(e^{i theta})| built from the closed forms of f0^(+-) on the unit
/// circle; the singular points are its zeros on the spectral-gap arcs.
double lambda0_magnitude(double theta, const PhasePair& phases);

/// xi(sigma) = 2 / ln(3 - 2 sqrt2 a(sigma)); +infinity at sigma = 0 and pi.
double localization_length(double sigma);

struct DefectSpectrum {
  std::array<Complex, 4> lambda;
  std::array<double, 4> rate;            // geometric ratio of each measure
  std::array<MeasureProfile, 4> measure; // on [-window, window], c = 1
  bool degenerate = false;               // sigma = +-pi/2
};

/// One-defect model: four eigenvalues and stationary measures.
DefectSpectrum defect_model_spectrum(const PhasePair& phases, std::int64_t window = 30);

}  // namespace qwalk
