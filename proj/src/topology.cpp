#include "qwalk/topology.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

#include "qwalk/spectral.hpp"

namespace qwalk {

CoinOperator coin_sqrt(const CoinOperator& coin) {
  if (unitarity_residual(coin) > 1e-10 || (coin - coin.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("coin_sqrt needs a Hermitian unitary coin");
  Eigen::SelfAdjointEigenSolver<CoinOperator> es(coin);
  CoinOperator out = CoinOperator::Zero();
  for (int i = 0; i < 2; ++i) {
    const Complex root = es.eigenvalues()(i) > 0.0 ? Complex(1.0, 0.0) : Complex(0.0, 1.0);
    out += root * es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  }
  return out;
}

namespace {

// R_{sigma, theta} rotation; the coin family satisfies U = R_{sigma,theta} tau3.
CoinOperator rotation(double sigma, double theta) {
  CoinOperator r;
  const Complex e = std::polar(1.0, sigma);
  r << std::cos(theta), -e * std::sin(theta), std::conj(e) * std::sin(theta), std::cos(theta);
  return r;
}

struct SiteParams {
  double sigma;
  double theta;
};

// Extract (sigma_x, theta_x) of a coin in the R tau3 family; only called for
// omega = 0 coins (the symmetry frames are defined for those).
SiteParams site_params(const CoinOperator& u) {
  const double ct = u(0, 0).real();
  if (std::abs(u(0, 0).imag()) > 1e-10 || std::abs(u(0, 0) + u(1, 1)) > 1e-10)
    throw std::invalid_argument("coin is outside the omega = 0 perturbative family");
  const double st = std::abs(u(0, 1));
  SiteParams p;
  p.theta = std::atan2(st, ct);
  p.sigma = st > 1e-14 ? std::arg(u(0, 1)) : 0.0;
  return p;
}

int ring_size(int n) { return 2 * n; }

int ring_index(int n, std::int64_t x, int comp) {
  const int sites = ring_size(n);
  std::int64_t r = (x + n) % sites;
  if (r < 0) r += sites;
  return static_cast<int>(2 * r + comp);
}

Eigen::MatrixXcd ring_blockdiag(const CoinField& field, int n,
                                CoinOperator (*xf)(const CoinOperator&)) {
  const int d = 2 * ring_size(n);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (std::int64_t x = -n; x <= n - 1; ++x) {
    const CoinOperator blk = xf(field.coin(x));
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) m(ring_index(n, x, a), ring_index(n, x, b)) = blk(a, b);
  }
  return m;
}

void ring_shifts(int n, Eigen::MatrixXcd& s_plus, Eigen::MatrixXcd& s_minus) {
  const int d = 2 * ring_size(n);
  s_plus = Eigen::MatrixXcd::Zero(d, d);
  s_minus = Eigen::MatrixXcd::Zero(d, d);
  for (std::int64_t x = -n; x <= n - 1; ++x) {
    s_plus(ring_index(n, x, 0), ring_index(n, x, 0)) = 1.0;
    s_plus(ring_index(n, x, 1), ring_index(n, x - 1, 1)) = 1.0;
    s_minus(ring_index(n, x, 0), ring_index(n, x + 1, 0)) = 1.0;
    s_minus(ring_index(n, x, 1), ring_index(n, x, 1)) = 1.0;
  }
}

Eigen::MatrixXcd ring_d_matrix(int n) {
  const int d = 2 * ring_size(n);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (std::int64_t x = -n; x <= n - 1; ++x) {
    m(ring_index(n, x, 0), ring_index(n, x, 0)) = std::polar(1.0, -kPi / 4.0);
    m(ring_index(n, x, 1), ring_index(n, x, 1)) = std::polar(1.0, kPi / 4.0);
  }
  return m;
}

CoinOperator identity_xf(const CoinOperator& u) { return u; }
CoinOperator half_rotation_xf(const CoinOperator& u) {
  const SiteParams p = site_params(u);
  return rotation(p.sigma, p.theta / 2.0);
}

}  // namespace

Eigen::MatrixXcd ring_walk_operator(const CoinField& field, int half_size) {
  Eigen::MatrixXcd sp, sm;
  ring_shifts(half_size, sp, sm);
  return sm * sp * ring_blockdiag(field, half_size, identity_xf);
}

SymmetryFrameOperator symmetry_frame_operator(const CoinField& field, int half_size, Frame frame) {
  if (half_size < 2) throw std::invalid_argument("frame half-size must be >= 2");
  SymmetryFrameOperator out;
  out.frame = frame;
  out.half_size = half_size;
  out.coin_half = coin_sqrt(field.coin(0));
  Eigen::MatrixXcd sp, sm;
  ring_shifts(half_size, sp, sm);
  const Eigen::MatrixXcd d = ring_d_matrix(half_size);
  const Eigen::MatrixXcd rh = ring_blockdiag(field, half_size, half_rotation_xf);
  // One-step operators with the time origin shifted into the symmetry frame;
  // the global phase is e^{-i phi} = i with chi = -phi = pi/2.
  if (frame == Frame::Prime)
    out.matrix = Complex(0.0, 1.0) * (rh * d * sm * sp * d * rh);
  else
    out.matrix = Complex(0.0, 1.0) * (sp * d * rh * rh * d * sm);
  return out;
}

SymmetryOperators symmetry_operators(int half_size, double sigma_prime) {
  SymmetryOperators sym;
  sym.sigma_prime = sigma_prime;
  const int d = 2 * ring_size(half_size);
  sym.gamma = Eigen::MatrixXcd::Zero(d, d);
  sym.ph_unitary = Eigen::MatrixXcd::Zero(d, d);
  const Complex e = std::polar(1.0, sigma_prime);
  for (std::int64_t x = -half_size; x <= half_size - 1; ++x) {
    sym.gamma(ring_index(half_size, x, 0), ring_index(half_size, x, 1)) = e;
    sym.gamma(ring_index(half_size, x, 1), ring_index(half_size, x, 0)) = std::conj(e);
    sym.ph_unitary(ring_index(half_size, x, 0), ring_index(half_size, x, 0)) = e;
    sym.ph_unitary(ring_index(half_size, x, 1), ring_index(half_size, x, 1)) = std::conj(e);
  }
  return sym;
}

double chiral_residual(const SymmetryFrameOperator& op, const SymmetryOperators& sym) {
  if (op.matrix.rows() != sym.gamma.rows())
    throw std::invalid_argument("operator/symmetry shape mismatch");
  const Eigen::MatrixXcd a = std::polar(1.0, sym.epsilon_gamma) * op.matrix;
  // Gamma = Gamma^-1 for the tau1-type blocks.
  return (sym.gamma * a * sym.gamma - a.adjoint()).cwiseAbs().maxCoeff();
}

double particle_hole_residual(const SymmetryFrameOperator& op, const SymmetryOperators& sym) {
  if (op.matrix.rows() != sym.ph_unitary.rows())
    throw std::invalid_argument("operator/symmetry shape mismatch");
  const Eigen::MatrixXcd a = std::polar(1.0, sym.epsilon_p) * op.matrix;
  // P psi = Mp conj(psi), so P A P^-1 = Mp conj(A) conj(Mp) as a matrix.
  const Eigen::MatrixXcd papinv = sym.ph_unitary * a.conjugate() * sym.ph_unitary.conjugate();
  return (papinv - a).cwiseAbs().maxCoeff();
}

int winding_number(double sigma0, double theta, Frame frame, int grid) {
  (void)sigma0;  // the V-transform removes sigma0 from the Bloch phase
  if (!(theta > -kPi && theta < kPi) || theta == 0.0)
    throw std::domain_error("winding number needs theta in (-pi, 0) or (0, pi)");
  if (grid < 16) throw std::invalid_argument("grid too small");
  const double st = std::sin(theta), ct = std::cos(theta);
  double acc = 0.0;
  double prev = 0.0;
  double first = 0.0;
  for (int i = 0; i <= grid; ++i) {
    const double k = 2.0 * kPi * static_cast<double>(i % grid) / grid;
    const double rk = std::sqrt(1.0 - std::cos(k) * std::cos(k) * ct * ct);
    if (rk < 1e-9) throw std::domain_error("gap closure: r_k vanished");
    const double phi = frame == Frame::Prime ? std::atan2(std::sin(k), std::cos(k) * st)
                                             : std::atan2(std::sin(k) * ct, st);
    if (i == 0) {
      first = phi;
      prev = phi;
      continue;
    }
    double d = (i == grid ? first : phi) - prev;
    while (d > kPi) d -= 2.0 * kPi;
    while (d < -kPi) d += 2.0 * kPi;
    acc += d;
    prev = i == grid ? first : phi;
  }
  const double nu = acc / (2.0 * kPi);
  const double rounded = std::round(nu);
  if (std::abs(nu - rounded) > 1e-6)
    throw std::runtime_error("winding accumulation did not land on an integer");
  return static_cast<int>(rounded);
}

std::pair<double, double> raw_topological_numbers(double sigma0, double theta) {
  const int np = winding_number(sigma0, theta, Frame::Prime);
  const int nd = winding_number(sigma0, theta, Frame::DoublePrime);
  return {(nd + np) / 2.0, (nd - np) / 2.0};
}

TopologyReport topological_numbers(const PhasePair& phases, int residual_half_size) {
  TopologyReport rep;
  const double diff = canonical_angle(phases.sigma_minus - phases.sigma_plus);
  const double ratio = diff / kPi;
  const double rounded = std::round(ratio);
  rep.symmetry_holds = std::abs(ratio - rounded) < 1e-9;

  const CoinField field = build_coin_field(
      phases.sigma_plus == phases.sigma_minus ? FieldKind::Homogeneous : FieldKind::TwoPhase,
      phases);
  const SymmetryOperators sym = symmetry_operators(residual_half_size, phases.sigma_plus);
  const SymmetryFrameOperator op =
      symmetry_frame_operator(field, residual_half_size, Frame::Prime);
  rep.chiral_resid = chiral_residual(op, sym);
  rep.ph_resid = particle_hole_residual(op, sym);

  // Right region: theta = pi/4 in the chiral basis of sigma' = sigma_+.
  rep.raw_right = raw_topological_numbers(phases.sigma_plus, kPi / 4.0);
  rep.nu_right = {static_cast<int>(std::lround(rep.raw_right.first + 0.5)),
                  static_cast<int>(std::lround(rep.raw_right.second + 0.5))};
  if (!rep.symmetry_holds) return rep;

  rep.n = static_cast<int>(rounded);
  // Keeping the same Gamma (sigma' = sigma_+) maps the left coin onto
  // theta = (-1)^n pi/4.
  const double theta_left = (rep.n % 2 == 0) ? kPi / 4.0 : -kPi / 4.0;
  rep.raw_left = raw_topological_numbers(phases.sigma_plus, theta_left);
  rep.nu_left = {static_cast<int>(std::lround(rep.raw_left.first + 0.5)),
                 static_cast<int>(std::lround(rep.raw_left.second + 0.5))};
  rep.predicted_states_minus_pi_half = std::abs(rep.nu_right.first - rep.nu_left.first);
  rep.predicted_states_plus_pi_half = std::abs(rep.nu_right.second - rep.nu_left.second);
  return rep;
}

CoinOperator perturbative_coin(double theta_x, double omega_x, double sigma_p) {
  if (!std::isfinite(theta_x) || theta_x < 0.0 || theta_x >= 2.0 * kPi)
    throw std::invalid_argument("theta outside [0, 2pi)");
  if (!std::isfinite(omega_x) || omega_x < 0.0 || omega_x >= 2.0 * kPi)
    throw std::invalid_argument("omega outside [0, 2pi)");
  CoinOperator u;
  const Complex eo = std::polar(1.0, omega_x);
  const Complex es = std::polar(1.0, sigma_p);
  u << eo * std::cos(theta_x), es * std::sin(theta_x),
       std::conj(es) * std::sin(theta_x), -std::conj(eo) * std::cos(theta_x);
  return u;
}

double perturbation_condition_residual(const CoinOperator& up, double sigma_prime) {
  CoinOperator gamma;
  const Complex e = std::polar(1.0, sigma_prime);
  gamma << 0.0, e, std::conj(e), 0.0;
  CoinOperator tau3;
  tau3 << 1.0, 0.0, 0.0, -1.0;
  const CoinOperator a = up * tau3;
  return (gamma * a * gamma - a.inverse()).cwiseAbs().maxCoeff();
}

namespace {

RobustnessTrial run_trial(const PhasePair& phases, int half_size, double range,
                          std::uint64_t trial_seed, const std::vector<Complex>& reference) {
  RobustnessTrial trial;
  trial.seed = trial_seed;
  std::mt19937_64 rng(trial_seed);
  std::uniform_real_distribution<double> dist(-range, range);
  std::map<std::int64_t, Perturbation> table;
  bool degenerate_theta = false;
  for (std::int64_t x = -half_size; x <= half_size - 1; ++x) {
    Perturbation p;
    p.theta = kPi / 4.0 + dist(rng);
    p.omega = 0.0;
    p.sigma_p = x >= 0 ? phases.sigma_plus : phases.sigma_minus;
    degenerate_theta =
        degenerate_theta || std::abs(p.theta) < 1e-9 || std::abs(p.theta - kPi) < 1e-9;
    table.emplace(x, p);
  }
  const CoinField field = build_coin_field(FieldKind::Perturbed, phases, &table);
  const PathOperator op(field, half_size);
  const SpectrumReport spec = diagonalize(op);

  double drift = 0.0;
  bool gap_closed = degenerate_theta;
  for (const Complex ref : reference) {
    double best = 2.0, second = 2.0;
    for (const EigenPair& p : spec.pairs) {
      const double d = std::abs(p.lambda - ref);
      if (d < best) {
        second = best;
        best = d;
      } else if (d < second) {
        second = d;
      }
    }
    drift = std::max(drift, best);
    // Another eigenvalue on top of the tracked one: tracking is ill-defined.
    gap_closed = gap_closed || (second - best) < 1e-6;
  }
  trial.max_drift = drift;
  trial.gap_closed = gap_closed;
  return trial;
}

}  // namespace

RobustnessReport robustness_experiment(const PhasePair& phases, int half_size,
                                       double delta_theta_range, std::uint64_t seed, int trials,
                                       int workers) {
  if (delta_theta_range < 0.0 || delta_theta_range > kPi / 4.0 + 1e-12)
    throw std::invalid_argument("delta theta range must lie in [0, pi/4]");
  if (trials < 0) throw std::invalid_argument("trials must be >= 0");

  RobustnessReport rep;
  // Reference run through the same perturbed-field path with delta = 0, so a
  // zero-width experiment reproduces it bit for bit.
  {
    std::map<std::int64_t, Perturbation> table;
    for (std::int64_t x = -half_size; x <= half_size - 1; ++x)
      table.emplace(x, Perturbation{kPi / 4.0, 0.0,
                                    x >= 0 ? phases.sigma_plus : phases.sigma_minus});
    const CoinField base = build_coin_field(FieldKind::Perturbed, phases, &table);
    const SpectrumReport clean = classify(PathOperator(base, half_size),
                                          diagonalize(PathOperator(base, half_size)));
    for (const EigenPair* p : clean.isolated()) rep.reference.push_back(p->lambda);
  }

  rep.trials.resize(static_cast<std::size_t>(trials));
  workers = std::max(1, std::min(workers, trials == 0 ? 1 : trials));
  auto work = [&](int w) {
    for (int t = w; t < trials; t += workers)
      rep.trials[static_cast<std::size_t>(t)] =
          run_trial(phases, half_size, delta_theta_range, seed + static_cast<std::uint64_t>(t),
                    rep.reference);
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (std::thread& th : pool) th.join();
  }
  for (const RobustnessTrial& t : rep.trials) {
    if (t.gap_closed)
      ++rep.gap_closures;
    else
      rep.max_drift = std::max(rep.max_drift, t.max_drift);
  }
  return rep;
}

}  // namespace qwalk
