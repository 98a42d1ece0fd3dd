#include "qwalk/lattice.hpp"

#include <cmath>
#include <stdexcept>

namespace qwalk {

double canonical_angle(double a) {
  if (!std::isfinite(a)) throw std::invalid_argument("angle must be finite");
  double r = std::fmod(a, 2.0 * kPi);
  if (r < 0.0) r += 2.0 * kPi;
  if (r >= 2.0 * kPi) r = 0.0;
  return r;
}

double unitarity_residual(const Eigen::Ref<const Eigen::MatrixXcd>& u) {
  Eigen::MatrixXcd g = u.adjoint() * u;
  g.diagonal().array() -= 1.0;
  return g.cwiseAbs().maxCoeff();
}

CoinOperator phase_coin(double sigma) {
  const Complex e = std::polar(1.0, sigma);
  CoinOperator u;
  u << 1.0, e, std::conj(e), -1.0;
  return u / kSqrt2;
}

CoinOperator defect_coin() {
  CoinOperator u;
  u << 1.0, 0.0, 0.0, -1.0;
  return u;
}

namespace {

CoinOperator perturbed_coin_entry(const Perturbation& p) {
  CoinOperator u;
  const Complex eo = std::polar(1.0, p.omega);
  const Complex es = std::polar(1.0, p.sigma_p);
  u << eo * std::cos(p.theta), es * std::sin(p.theta),
       std::conj(es) * std::sin(p.theta), -std::conj(eo) * std::cos(p.theta);
  return u;
}

}  // namespace

CoinOperator CoinField::coin(std::int64_t x) const {
  switch (kind_) {
    case FieldKind::Homogeneous:
      return phase_coin(phases_.sigma_plus);
    case FieldKind::TwoPhase:
      return phase_coin(x >= 0 ? phases_.sigma_plus : phases_.sigma_minus);
    case FieldKind::OneDefect:
      if (x == 0) return defect_coin();
      return phase_coin(x >= 1 ? phases_.sigma_plus : phases_.sigma_minus);
    case FieldKind::Perturbed: {
      auto it = table_.find(x);
      if (it != table_.end()) return perturbed_coin_entry(it->second);
      return phase_coin(x >= 0 ? phases_.sigma_plus : phases_.sigma_minus);
    }
  }
  throw std::logic_error("unreachable coin kind");
}

CoinField build_coin_field(FieldKind kind, const PhasePair& phases,
                           const std::map<std::int64_t, Perturbation>* perturbation) {
  if (perturbation != nullptr && kind != FieldKind::Perturbed)
    throw std::invalid_argument("perturbation table only valid with FieldKind::Perturbed");
  CoinField f;
  f.kind_ = kind;
  f.phases_ = phases;  // PhasePair construction already canonicalized / rejected NaN
  if (kind == FieldKind::Homogeneous && phases.sigma_plus != phases.sigma_minus)
    throw std::invalid_argument("homogeneous field needs sigma_plus == sigma_minus");
  if (perturbation != nullptr) {
    for (const auto& [x, p] : *perturbation) {
      if (!std::isfinite(p.theta) || p.theta < 0.0 || p.theta >= 2.0 * kPi)
        throw std::invalid_argument("perturbation theta outside [0, 2pi)");
      if (!std::isfinite(p.omega) || p.omega < 0.0 || p.omega >= 2.0 * kPi)
        throw std::invalid_argument("perturbation omega outside [0, 2pi)");
    }
    f.table_ = *perturbation;
  }
  return f;
}

WalkerState::WalkerState(Complex alpha, Complex beta) {
  const double n = std::norm(alpha) + std::norm(beta);
  if (std::abs(n - 1.0) > 1e-12)
    throw std::invalid_argument("initial spinor is not normalized");
  amps_.push_back({alpha, beta});
}

AmplitudePair WalkerState::at(std::int64_t x) const {
  if (x < min_x_ || x > max_x()) return {};
  return amps_[static_cast<std::size_t>(x - min_x_)];
}

double WalkerState::norm_squared() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a.l) + std::norm(a.r);
  return s;
}

namespace {

// Coin entries flattened over [lo, hi] for the evolution kernel.
struct CoinRow {
  std::int64_t lo;
  std::vector<Complex> a, b, c, d;  // [[a,b],[c,d]] per site
  explicit CoinRow(const CoinField& field, std::int64_t lo_, std::int64_t hi) : lo(lo_) {
    const std::size_t n = static_cast<std::size_t>(hi - lo_ + 1);
    a.resize(n); b.resize(n); c.resize(n); d.resize(n);
    for (std::int64_t x = lo_; x <= hi; ++x) {
      const CoinOperator u = field.coin(x);
      const std::size_t i = static_cast<std::size_t>(x - lo_);
      a[i] = u(0, 0); b[i] = u(0, 1); c[i] = u(1, 0); d[i] = u(1, 1);
    }
  }
};

void step_into(const std::vector<AmplitudePair>& src, std::int64_t src_min,
               std::vector<AmplitudePair>& dst, std::int64_t dst_min, const CoinRow& row) {
  const std::int64_t src_max = src_min + static_cast<std::int64_t>(src.size()) - 1;
  for (std::int64_t x = dst_min; x < dst_min + static_cast<std::int64_t>(dst.size()); ++x) {
    AmplitudePair out;
    if (x + 1 >= src_min && x + 1 <= src_max) {
      const AmplitudePair& s = src[static_cast<std::size_t>(x + 1 - src_min)];
      const std::size_t i = static_cast<std::size_t>(x + 1 - row.lo);
      out.l = row.a[i] * s.l + row.b[i] * s.r;
    }
    if (x - 1 >= src_min && x - 1 <= src_max) {
      const AmplitudePair& s = src[static_cast<std::size_t>(x - 1 - src_min)];
      const std::size_t i = static_cast<std::size_t>(x - 1 - row.lo);
      out.r = row.c[i] * s.l + row.d[i] * s.r;
    }
    dst[static_cast<std::size_t>(x - dst_min)] = out;
  }
}

}  // namespace

WalkerState step(const WalkerState& state, const CoinField& field) {
  WalkerState next;
  next.min_x_ = state.min_x_ - 1;
  next.time_ = state.time_ + 1;
  next.amps_.resize(state.amps_.size() + 2);
  CoinRow row(field, state.min_x_, state.max_x());
  step_into(state.amps_, state.min_x_, next.amps_, next.min_x_, row);
  return next;
}

// Shared kernel for evolve / time_averaged_empirical: runs T steps with the
// coin row precomputed over the final support, invoking cb(state-of-step-t)
// before each step and once at the end.
class Evolver {
 public:
  template <typename Cb>
  static WalkerState run(Complex alpha, Complex beta, const CoinField& field, std::int64_t T,
                         Cb&& cb) {
    if (T < 0) throw std::invalid_argument("steps must be >= 0");
    const double n0 = std::norm(alpha) + std::norm(beta);
    if (std::abs(n0 - 1.0) > 1e-12)
      throw std::invalid_argument("initial spinor is not normalized");

    CoinRow row(field, -T - 1, T + 1);
    std::vector<AmplitudePair> cur(1, AmplitudePair{alpha, beta});
    std::vector<AmplitudePair> nxt;
    cur.reserve(static_cast<std::size_t>(2 * T + 1));
    nxt.reserve(static_cast<std::size_t>(2 * T + 1));
    std::int64_t min_x = 0;
    for (std::int64_t t = 0; t < T; ++t) {
      cb(cur, min_x, t);
      nxt.assign(cur.size() + 2, AmplitudePair{});
      step_into(cur, min_x, nxt, min_x - 1, row);
      cur.swap(nxt);
      --min_x;
      double norm = 0.0;
      for (const auto& a : cur) norm += std::norm(a.l) + std::norm(a.r);
      if (std::abs(norm - 1.0) > 1e-8)
        throw std::runtime_error("unitarity drift exceeded 1e-8; evolution is broken");
    }
    cb(cur, min_x, T);
    WalkerState out;
    out.min_x_ = min_x;
    out.time_ = T;
    out.amps_ = std::move(cur);
    return out;
  }
};

WalkerState evolve(Complex alpha, Complex beta, const CoinField& field, std::int64_t steps) {
  return Evolver::run(alpha, beta, field, steps,
                      [](const std::vector<AmplitudePair>&, std::int64_t, std::int64_t) {});
}

double MeasureProfile::at(std::int64_t x) const {
  if (x < min_x_ || x > max_x()) return 0.0;
  return values_[static_cast<std::size_t>(x - min_x_)];
}

double MeasureProfile::sum() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s;
}

double MeasureProfile::max_value() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, v);
  return m;
}

MeasureProfile probability_distribution(const WalkerState& state) {
  std::vector<double> v(static_cast<std::size_t>(state.max_x() - state.min_x() + 1));
  for (std::int64_t x = state.min_x(); x <= state.max_x(); ++x) {
    const AmplitudePair a = state.at(x);
    v[static_cast<std::size_t>(x - state.min_x())] = std::norm(a.l) + std::norm(a.r);
  }
  return MeasureProfile(state.min_x(), std::move(v));
}

MeasureProfile time_averaged_empirical(const CoinField& field, Complex alpha, Complex beta,
                                       std::int64_t T) {
  if (T < 1) throw std::invalid_argument("time average needs T >= 1");
  std::vector<double> acc(static_cast<std::size_t>(2 * T + 1), 0.0);
  const std::int64_t lo = -T;
  Evolver::run(alpha, beta, field, T,
                [&](const std::vector<AmplitudePair>& amps, std::int64_t min_x, std::int64_t t) {
                  if (t >= T) return;  // average over t = 0 .. T-1
                  for (std::size_t i = 0; i < amps.size(); ++i) {
                    const std::int64_t x = min_x + static_cast<std::int64_t>(i);
                    acc[static_cast<std::size_t>(x - lo)] += std::norm(amps[i].l) + std::norm(amps[i].r);
                  }
                });
  for (double& v : acc) v /= static_cast<double>(T);
  return MeasureProfile(lo, std::move(acc));
}

}  // namespace qwalk
