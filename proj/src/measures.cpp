#include "qwalk/measures.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qwalk {

namespace {

// Values with a tiny imaginary (or real) part relative to their modulus are
// snapped onto the axis, so exact phase inputs like 3pi/2 land on a
// deterministic side of the sqrt branch cut.
Complex clean(Complex z, double snap = 1e-13) {
  const double m = std::abs(z);
  double re = z.real(), im = z.imag();
  if (m > 0.0) {
    if (std::abs(im) < snap * m) im = 0.0;
    if (std::abs(re) < snap * m) re = 0.0;
  }
  return {re, im};
}

Complex principal_sqrt(Complex z) { return std::sqrt(clean(z)); }

// p, q, r^(+-) of the stationary-measure family.
struct PqrData {
  Complex p, q, r_minus, r_plus;
};

PqrData pqr(const PhasePair& ph) {
  const Complex eip = std::polar(1.0, ph.sigma_plus);
  const Complex eim = std::polar(1.0, ph.sigma_minus);
  const Complex e2p = std::polar(1.0, -2.0 * ph.sigma_plus);
  const Complex e2m = std::polar(1.0, -2.0 * ph.sigma_minus);
  const Complex e2t = std::polar(1.0, -2.0 * ph.sigma_tilde());
  PqrData d;
  d.p = clean(eip * (e2m - e2p - 4.0 * e2t));
  d.q = clean(e2m + e2p - 6.0 * e2t);
  d.r_minus = clean(std::conj(eip) - std::conj(eim));
  d.r_plus = clean(std::conj(eip) + std::conj(eim));
  return d;
}

struct BranchData {
  Complex lambda;
  Complex alpha, beta;  // Psi(0)
  Complex theta_s;
  Complex sq;           // chosen sqrt(q)
  int pm;               // +1 for branches 1,2 / -1 for branches 3,4
};

BranchData resolve_branch(const PhasePair& ph, const StationaryBranch& br) {
  if (br.index < 1 || br.index > 4) throw std::invalid_argument("branch index must be 1..4");
  if (br.sqrt_sign != 1 && br.sqrt_sign != -1)
    throw std::invalid_argument("sqrt_sign must be +-1");
  if (!(br.c > 0.0)) throw std::invalid_argument("scale c must be positive");

  const PqrData d = pqr(ph);
  BranchData out;
  out.pm = (br.index <= 2) ? +1 : -1;
  out.sq = static_cast<double>(br.sqrt_sign) * principal_sqrt(d.q);
  const Complex pm = static_cast<double>(out.pm) * out.sq;
  const Complex den = -d.r_minus - pm;
  const Complex num = d.p + std::polar(1.0, ph.sigma_plus) * d.r_minus * pm;
  if (std::abs(den) < 1e-12 || std::abs(num) < 1e-12)
    throw std::domain_error("singular stationary branch: -r^- -+ sqrt(q) or its numerator vanishes");
  out.lambda = principal_sqrt(clean(num / (2.0 * den)));
  if (br.index == 2 || br.index == 4) out.lambda = -out.lambda;
  const Complex h = (d.r_minus + pm) / 2.0;
  out.alpha = br.c / kSqrt2;
  out.beta = (br.c / kSqrt2) * h;
  // theta_s from the alpha-based consistency relation; the three remaining
  // relations are equivalent on a valid branch (checked by the tests).
  out.theta_s = (1.0 - 2.0 * out.lambda * out.lambda - std::polar(1.0, ph.sigma_plus) * h) /
                (kSqrt2 * out.lambda);
  return out;
}

AmplitudePair psi_at(const BranchData& b, const PhasePair& ph, std::int64_t x) {
  if (x == 0) return {b.alpha, b.beta};
  if (x > 0) {
    const Complex f = std::pow(-b.theta_s, static_cast<double>(x));
    return {b.alpha * f, b.beta * f};
  }
  const Complex wdiff = std::polar(1.0, ph.sigma_plus) - std::polar(1.0, ph.sigma_minus);
  const Complex f = std::pow(b.theta_s, static_cast<double>(-x));
  return {(b.alpha + wdiff * b.beta) * f, b.beta * f};
}

}  // namespace

AmplitudePair EigenPacket::at(std::int64_t x) const {
  if (x < min_x || x >= min_x + static_cast<std::int64_t>(psi.size())) return {};
  return psi[static_cast<std::size_t>(x - min_x)];
}

EigenPacket stationary_eigenpacket(const PhasePair& phases, const StationaryBranch& branch,
                                   std::int64_t window) {
  if (window < 2) throw std::invalid_argument("window must be >= 2");
  const BranchData b = resolve_branch(phases, branch);
  EigenPacket pk;
  pk.lambda = b.lambda;
  pk.theta_s = b.theta_s;
  pk.min_x = -window;
  pk.psi.resize(static_cast<std::size_t>(2 * window + 1));
  std::vector<double> mu(pk.psi.size());
  for (std::int64_t x = -window; x <= window; ++x) {
    const AmplitudePair a = psi_at(b, phases, x);
    pk.psi[static_cast<std::size_t>(x + window)] = a;
    mu[static_cast<std::size_t>(x + window)] = std::norm(a.l) + std::norm(a.r);
  }
  pk.measure = MeasureProfile(-window, std::move(mu));
  const double r2 = std::norm(b.theta_s);
  pk.decay_rate_right = r2;
  pk.decay_rate_left = r2;
  return pk;
}

double stationary_measure_closed_form(const PhasePair& phases, const StationaryBranch& branch,
                                      std::int64_t x) {
  const BranchData b = resolve_branch(phases, branch);
  const PqrData d = pqr(phases);
  const double c2 = branch.c * branch.c;
  const double ratio = std::norm(b.theta_s);
  const Complex spm = static_cast<double>(b.pm) * b.sq;
  if (x >= 0) {
    const double braces = 4.0 + std::norm(d.r_minus) + std::norm(b.sq) +
                          2.0 * (std::conj(d.r_minus) * spm).real();
    return c2 / 8.0 * braces * std::pow(ratio, static_cast<double>(x));
  }
  const Complex wdiff = std::polar(1.0, phases.sigma_plus) - std::polar(1.0, phases.sigma_minus);
  const Complex rs = d.r_minus + spm;
  const double braces = std::norm(2.0 + wdiff * rs) + std::norm(rs);
  return c2 / 8.0 * braces * std::pow(ratio, static_cast<double>(-x));
}

LimitMeasureSpec::LimitMeasureSpec(const PhasePair& ph, double a_, double b_, double p1, double p2)
    : phases(ph), a(a_), b(b_), phi1(p1), phi2(p2) {
  if (a < 0.0 || b < 0.0 || std::abs(a * a + b * b - 1.0) > 1e-12)
    throw std::invalid_argument("initial state needs a, b >= 0 with a^2+b^2 = 1");
  if (!std::isfinite(p1) || !std::isfinite(p2))
    throw std::invalid_argument("initial phases must be finite");
}

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// phi^(+-)(sigma): cos phi = cos(sigma)/sqrt2, sin phi = +-sqrt(1 - cos^2(sigma)/2).
double phi_branch(double sigma, int sign) {
  const double c = std::cos(sigma) / kSqrt2;
  const double s = static_cast<double>(sign) * std::sqrt(std::max(0.0, 1.0 - c * c));
  return std::atan2(s, c);
}

struct TavgBranch {
  double t;            // t^(+-)(sigma)
  double a_s, b_s;     // cos t, cos(2 sigma + t)
  double zeta, kappa, gamma;
  double denom;        // 5 + cos 2sigma - 2 sqrt2 b_s - 2 sqrt2 a_s
  bool active;         // indicator a_s <= 1/sqrt2
};

TavgBranch tavg_branch(const LimitMeasureSpec& sp, int sign) {
  const double sigma = sp.phases.sigma();
  const double ph12 = sp.phi12();
  const double spp = sp.phases.sigma_plus, smm = sp.phases.sigma_minus;
  TavgBranch o;
  o.t = phi_branch(sigma, sign) - sigma;
  o.a_s = std::cos(o.t);
  o.b_s = std::cos(2.0 * sigma + o.t);
  o.active = o.a_s <= kInvSqrt2 + 1e-12;
  o.denom = 5.0 + std::cos(2.0 * sigma) - 2.0 * kSqrt2 * o.b_s - 2.0 * kSqrt2 * o.a_s;
  const double a = sp.a, b = sp.b;
  o.zeta = 2.0 - kSqrt2 * (a * a * o.b_s + b * b * o.a_s) -
           kSqrt2 * a * b * (std::cos(ph12 - spp - o.t) - std::cos(ph12 - smm + o.t));
  o.kappa = (2.0 - kSqrt2 * o.a_s) *
            (1.0 + 2.0 * a * a - 2.0 * kSqrt2 * a * a * o.b_s -
             2.0 * a * b * std::cos(ph12 - spp) + 2.0 * kSqrt2 * a * b * std::cos(ph12 - smm + o.t));
  o.gamma = (2.0 - kSqrt2 * o.a_s) *
            (1.0 + 2.0 * b * b - 2.0 * kSqrt2 * b * b * o.a_s +
             2.0 * a * b * std::cos(ph12 - spp) - 2.0 * kSqrt2 * a * b * std::cos(ph12 - spp - o.t));
  return o;
}

}  // namespace

double time_averaged_limit_measure(const LimitMeasureSpec& spec, std::int64_t x) {
  double total = 0.0;
  for (int sign : {+1, -1}) {
    const TavgBranch br = tavg_branch(spec, sign);
    if (!br.active) continue;
    const double pref = 2.0 * std::pow(1.0 - kSqrt2 * br.a_s, 2) /
                        (std::pow(3.0 - 2.0 * kSqrt2 * br.a_s, static_cast<double>(std::llabs(x)) + 2.0) *
                         br.denom);
    total += pref * (x == 0 ? br.zeta : (x > 0 ? br.kappa : br.gamma));
  }
  return total;
}

double delta_mass_C(const LimitMeasureSpec& spec) {
  double total = 0.0;
  for (int sign : {+1, -1}) {
    const TavgBranch br = tavg_branch(spec, sign);
    if (!br.active) continue;
    const double one_minus = 1.0 - kSqrt2 * br.a_s;
    if (one_minus * one_minus < 1e-24) continue;  // boundary a = 1/sqrt2: zero weight
    const double base = 3.0 - 2.0 * kSqrt2 * br.a_s;
    const double rho = 1.0 / base;
    if (!(rho < 1.0)) throw std::logic_error("divergent geometric ratio under active indicator");
    const double f = 2.0 * one_minus * one_minus / (base * base * br.denom);
    total += f * (br.zeta + (br.kappa + br.gamma) * rho / (1.0 - rho));
  }
  return total;
}

double WeakLimitDensity::w(double x) const {
  const double t2 = x >= 0.0 ? t2_plus : t2_minus;
  const double t1 = x >= 0.0 ? t1_plus : t1_minus;
  return (t2 * x * x * x + t1 * x * x) / (s1 * x * x + s0);
}

double WeakLimitDensity::konno_kernel(double x) {
  if (std::abs(x) >= kInvSqrt2) throw std::domain_error("Konno kernel support is |x| < 1/sqrt2");
  return 1.0 / (kPi * (1.0 - x * x) * std::sqrt(1.0 - 2.0 * x * x));
}

double WeakLimitDensity::continuous_density(double x) const { return w(x) * konno_kernel(x); }

double WeakLimitDensity::continuous_mass() const {
  // x = sin(u)/sqrt2 removes the endpoint singularity exactly:
  // integrand becomes w(sin u / sqrt2) / (pi sqrt2 (1 - sin^2(u)/2)).
  const int n = 512;  // composite Gauss-Legendre 8-point panels
  static const double gx[4] = {0.1834346424956498, 0.5255324099163290,
                               0.7966664774136267, 0.9602898564975363};
  static const double gw[4] = {0.3626837833783620, 0.3137066458778873,
                               0.2223810344533745, 0.1012285362903763};
  const double lo = -kPi / 2.0, hi = kPi / 2.0;
  const double hstep = (hi - lo) / n;
  double total = 0.0;
  for (int p = 0; p < n; ++p) {
    const double c = lo + (p + 0.5) * hstep;
    const double h = hstep / 2.0;
    for (int k = 0; k < 4; ++k) {
      for (int s : {-1, +1}) {
        const double u = c + s * h * gx[k];
        const double snu = std::sin(u);
        total += gw[k] * h * w(snu / kSqrt2) / (kPi * kSqrt2 * (1.0 - snu * snu / 2.0));
      }
    }
  }
  return total;
}

WeakLimitDensity weak_limit_density(const LimitMeasureSpec& spec) {
  const double sigma = spec.phases.sigma();
  const double ph12 = spec.phi12();
  const double spp = spec.phases.sigma_plus, smm = spec.phases.sigma_minus;
  const double a = spec.a, b = spec.b;
  WeakLimitDensity d;
  d.s1 = std::cos(sigma) * std::cos(sigma);
  d.s0 = std::sin(sigma) * std::sin(sigma);
  d.t2_plus = 1.0 - 2.0 * a * a - 2.0 * a * b * std::cos(ph12 - spp);
  d.t2_minus = d.t2_plus;  // printed form; normalization confirms it (see tests)
  d.t1_plus = 1.0 + 4.0 * a * a * d.s0 -
              2.0 * a * b * (std::cos(ph12 - spp) - std::cos(ph12 - smm));
  d.t1_minus = 1.0;
  d.delta_mass = delta_mass_C(spec);
  return d;
}

double lambda0_magnitude(double theta, const PhasePair& phases) {
  const double w = 2.0 * std::sin(theta) * std::sin(theta) - 1.0;
  const double sg = std::sin(theta) >= 0.0 ? 1.0 : -1.0;  // sgn(0) := +1
  const Complex eiphi = Complex(kSqrt2 * std::cos(theta), 0.0) +
                        Complex(0.0, sg) * std::sqrt(Complex(w, 0.0));
  const Complex fp = std::polar(1.0, theta + phases.sigma_plus) * eiphi;
  const Complex fm = std::polar(1.0, theta - phases.sigma_minus) * eiphi;
  const Complex l0 = 1.0 - std::polar(1.0, -phases.sigma_plus) * fp / kSqrt2 -
                     std::polar(1.0, phases.sigma_plus) * fm / kSqrt2 + fp * fm;
  return std::abs(l0);
}

std::vector<Complex> singular_points(const LimitMeasureSpec& spec) {
  const double sigma = spec.phases.sigma();
  std::vector<Complex> pts;
  for (int sign : {+1, -1}) {
    const double t = phi_branch(sigma, sign) - sigma;
    // Strict inequality: at cos t = 1/sqrt2 the candidate touches the band
    // edge with vanishing residue and is not a pole.
    if (std::cos(t) >= kInvSqrt2 - 1e-9) continue;
    const double den = std::sqrt(3.0 - 2.0 * kSqrt2 * std::cos(t));
    const Complex z(std::sin(t) / den, (kSqrt2 - std::cos(t)) / den);
    for (const Complex cand : {z, -z}) {
      bool dup = false;
      for (const Complex& q : pts) dup = dup || std::abs(q - cand) < 1e-9;
      if (!dup) pts.push_back(cand);
    }
  }
  return pts;
}

double localization_length(double sigma) {
  if (!(sigma > -kPi - 1e-12) || !(sigma <= kPi + 1e-12))
    throw std::invalid_argument("sigma must lie in (-pi, pi]");
  const double phi = std::acos(std::clamp(std::cos(sigma) / kSqrt2, -1.0, 1.0));
  const double a = std::cos(std::abs(phi) + std::abs(sigma));
  const double denom = std::log(3.0 - 2.0 * kSqrt2 * a);
  if (denom <= 1e-15) return std::numeric_limits<double>::infinity();
  return 2.0 / denom;
}

DefectSpectrum defect_model_spectrum(const PhasePair& phases, std::int64_t window) {
  const double sigma = phases.sigma();
  const double sn = std::sin(sigma), cs = std::cos(sigma);
  DefectSpectrum out;
  const Complex l1 = Complex(cs, sn + kSqrt2) / std::sqrt(3.0 + 2.0 * kSqrt2 * sn);
  const Complex l3 = Complex(cs, sn - kSqrt2) / std::sqrt(3.0 - 2.0 * kSqrt2 * sn);
  out.lambda = {l1, -l1, l3, -l3};
  out.degenerate = std::abs(std::abs(sn) - 1.0) < 1e-12;
  const double left_arg = (phases.sigma_plus + 3.0 * phases.sigma_minus) / 2.0;
  for (int j = 0; j < 4; ++j) {
    const double s = j < 2 ? 1.0 : -1.0;
    const double rate = 1.0 / (3.0 + s * 2.0 * kSqrt2 * sn);
    out.rate[j] = rate;
    std::vector<double> mu(static_cast<std::size_t>(2 * window + 1));
    for (std::int64_t x = -window; x <= window; ++x) {
      double v = 1.0;  // x = 0 row
      if (x >= 1)
        v = (2.0 + s * kSqrt2 * sn) * std::pow(rate, static_cast<double>(x));
      else if (x <= -1)
        v = (2.0 + s * kSqrt2 * std::sin(left_arg)) * std::pow(rate, static_cast<double>(-x));
      mu[static_cast<std::size_t>(x + window)] = v;
    }
    out.measure[j] = MeasureProfile(-window, std::move(mu));
  }
  return out;
}

}  // namespace qwalk
