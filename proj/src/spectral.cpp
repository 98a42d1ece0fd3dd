#include "qwalk/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qwalk {

PathOperator::PathOperator(const CoinField& field, int half_size)
    : n_(half_size), field_(field) {
  if (half_size < 2) throw std::invalid_argument("path half-size must be >= 2");
  const int d = dim();
  // Coin part: interior 2x2 blocks, unit-modulus boundary scalars. The
  // boundary phases keep the composite S*U unitary; a 1/sqrt2 there would
  // leak norm out of the end sites.
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(d, d);
  for (std::int64_t x = -n_ + 1; x <= n_ - 2; ++x) {
    const CoinOperator c = field.coin(x);
    u(index_l(x), index_l(x)) = c(0, 0);
    u(index_l(x), index_r(x)) = c(0, 1);
    u(index_r(x), index_l(x)) = c(1, 0);
    u(index_r(x), index_r(x)) = c(1, 1);
  }
  u(index_r(-n_), index_r(-n_)) = std::polar(1.0, -field.phases().sigma_minus);
  u(index_l(n_ - 1), index_l(n_ - 1)) = std::polar(1.0, field.phases().sigma_plus);
  // Shift with reflecting ends.
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(d, d);
  for (std::int64_t x = -n_ + 1; x <= n_ - 2; ++x) {
    s(index_l(x), index_l(x + 1)) = 1.0;
    s(index_r(x), index_r(x - 1)) = 1.0;
  }
  s(index_r(-n_), index_l(-n_ + 1)) = 1.0;
  s(index_l(n_ - 1), index_r(n_ - 2)) = 1.0;
  m_ = s * u;
}

int PathOperator::index_l(std::int64_t x) const {
  if (x < -n_ + 1 || x > n_ - 1) throw std::out_of_range("no |x,L> state at this position");
  return x == n_ - 1 ? dim() - 1 : static_cast<int>(1 + 2 * (x + n_ - 1));
}

int PathOperator::index_r(std::int64_t x) const {
  if (x < -n_ || x > n_ - 2) throw std::out_of_range("no |x,R> state at this position");
  return x == -n_ ? 0 : static_cast<int>(2 + 2 * (x + n_ - 1));
}

double PathOperator::site_weight(const Eigen::VectorXcd& v, std::int64_t x) const {
  double w = 0.0;
  if (x >= -n_ + 1 && x <= n_ - 1) w += std::norm(v(index_l(x)));
  if (x >= -n_ && x <= n_ - 2) w += std::norm(v(index_r(x)));
  return w;
}

namespace {

double arc_distance_to_interval(double psi, double lo, double hi) {
  if (psi >= lo && psi <= hi) return 0.0;
  auto circ = [](double d) {
    d = std::fmod(std::fabs(d), 2.0 * kPi);
    return std::min(d, 2.0 * kPi - d);
  };
  return std::min(circ(psi - lo), circ(psi - hi));
}

}  // namespace

double bulk_band_distance(Complex lambda) {
  if (std::abs(std::abs(lambda) - 1.0) > 1e-6)
    throw std::invalid_argument("band distance is defined for unit-modulus values");
  double psi = std::arg(lambda);
  if (psi < 0.0) psi += 2.0 * kPi;
  // cos(eps) = sin(k)/sqrt2 sweeps eps over [pi/4, 3pi/4]; the arcs
  // e^{i(+-eps + pi/2)} cover arguments [3pi/4, 5pi/4] and [-pi/4, pi/4].
  const double d1 = arc_distance_to_interval(psi, 3.0 * kPi / 4.0, 5.0 * kPi / 4.0);
  const double d2 = std::min(arc_distance_to_interval(psi, 0.0, kPi / 4.0),
                             arc_distance_to_interval(psi, 7.0 * kPi / 4.0, 2.0 * kPi));
  return std::min(d1, d2);
}

double default_band_tolerance(int half_size) {
  // ten bulk level spacings; the two band arcs have total length pi, shared
  // by all dim eigenvalues in the homogeneous limit
  return 10.0 * kPi / static_cast<double>(4 * half_size - 2);
}

SpectrumReport diagonalize(const PathOperator& op) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(op.matrix(), true);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("complex eigensolver failed to converge");
  SpectrumReport rep;
  rep.half_size = op.half_size();
  const int d = op.dim();
  rep.pairs.resize(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    EigenPair& p = rep.pairs[static_cast<std::size_t>(i)];
    p.lambda = solver.eigenvalues()(i);
    p.vector = solver.eigenvectors().col(i);
    const double resid = (op.matrix() * p.vector - p.lambda * p.vector).norm();
    if (resid > 1e-9) throw std::runtime_error("eigenpair residual above 1e-9");
  }
  std::sort(rep.pairs.begin(), rep.pairs.end(),
            [](const EigenPair& a, const EigenPair& b) {
              return std::arg(a.lambda) < std::arg(b.lambda);
            });
  return rep;
}

namespace {

DecayFit fit_decay_side(const PathOperator& op, const Eigen::VectorXcd& v, bool right_side) {
  // Geometric fit of the site weights in log space. The 5 sites nearest each
  // boundary are excluded; so are weights below 1e-12 of the peak, which sit
  // at the eigensolver noise floor.
  const int n = op.half_size();
  std::vector<double> xs, ys;
  double peak = 0.0;
  for (std::int64_t x = -n + 1; x <= n - 2; ++x) peak = std::max(peak, op.site_weight(v, x));
  const std::int64_t lo = right_side ? 0 : -n + 1 + 5;
  const std::int64_t hi = right_side ? n - 2 - 5 : -1;
  for (std::int64_t x = lo; x <= hi; ++x) {
    const double w = op.site_weight(v, x);
    if (w > peak * 1e-12) {
      xs.push_back(static_cast<double>(right_side ? x : -x));
      ys.push_back(std::log(w));
    }
  }
  DecayFit fit;
  if (xs.size() < 4) return fit;
  const double nn = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i]; sy += ys[i]; sxx += xs[i] * xs[i]; sxy += xs[i] * ys[i];
  }
  const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  const double icept = (sy - slope * sx) / nn;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (slope * xs[i] + icept);
    rss += r * r;
  }
  fit.fitted = true;
  fit.rate = std::exp(slope);
  fit.rms = std::sqrt(rss / nn);
  return fit;
}

}  // namespace

SpectrumReport classify(const PathOperator& op, SpectrumReport report, double band_tolerance) {
  const double tol = band_tolerance < 0.0 ? default_band_tolerance(op.half_size()) : band_tolerance;
  report.band_tolerance = tol;
  for (EigenPair& p : report.pairs) {
    p.band_distance = bulk_band_distance(p.lambda / std::abs(p.lambda));
    p.tag = p.band_distance < tol ? SpectrumTag::Bulk : SpectrumTag::Isolated;
  }
  // Orthonormalize eigenvector clusters among the isolated ones (degenerate
  // pairs such as the one-defect +-i doublets).
  std::vector<std::size_t> iso;
  for (std::size_t i = 0; i < report.pairs.size(); ++i)
    if (report.pairs[i].tag == SpectrumTag::Isolated) iso.push_back(i);
  for (std::size_t i = 0; i < iso.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(report.pairs[iso[i]].lambda - report.pairs[iso[j]].lambda) < 1e-8) {
        Eigen::VectorXcd& vi = report.pairs[iso[i]].vector;
        const Eigen::VectorXcd& vj = report.pairs[iso[j]].vector;
        vi -= vj * (vj.dot(vi));
        vi.normalize();
      }
    }
  }
  for (std::size_t i : iso) {
    report.pairs[i].fit_right = fit_decay_side(op, report.pairs[i].vector, true);
    report.pairs[i].fit_left = fit_decay_side(op, report.pairs[i].vector, false);
  }
  return report;
}

std::vector<const EigenPair*> SpectrumReport::isolated() const {
  std::vector<const EigenPair*> out;
  for (const EigenPair& p : pairs)
    if (p.tag == SpectrumTag::Isolated) out.push_back(&p);
  return out;
}

}  // namespace qwalk
