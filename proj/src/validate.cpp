#include "qwalk/validate.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "qwalk/lattice.hpp"
#include "qwalk/measures.hpp"
#include "qwalk/spectral.hpp"
#include "qwalk/table.hpp"
#include "qwalk/topology.hpp"

namespace qwalk {

namespace {

struct Suite {
  std::vector<CheckResult> results;
  double scale;
  std::mt19937_64 rng;

  Suite(double s, std::uint64_t seed) : scale(s), rng(seed) {}

  void bound(const std::string& name, double worst, double limit) {
    CheckResult r;
    r.name = name;
    r.pass = worst <= limit * scale;
    std::ostringstream os;
    os << "worst " << format_g17(worst) << " bound " << format_g17(limit * scale);
    r.detail = os.str();
    results.push_back(std::move(r));
  }

  void flag(const std::string& name, bool ok, const std::string& detail) {
    results.push_back(CheckResult{name, ok, detail});
  }

  double angle() { return std::uniform_real_distribution<double>(0.0, 2.0 * kPi)(rng); }
  double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }
};

PhasePair random_phases(Suite& s) { return PhasePair(s.angle(), s.angle()); }

LimitMeasureSpec random_spec(Suite& s) {
  const double mix = s.angle() / 4.0;
  return LimitMeasureSpec(random_phases(s), std::cos(mix), std::sin(mix), s.angle(), s.angle());
}

void check_lattice(Suite& s) {
  // Unitarity + support growth on random states under random fields.
  double worst_norm = 0.0;
  bool support_ok = true;
  for (int rep = 0; rep < 20; ++rep) {
    const CoinField field = build_coin_field(rep % 2 ? FieldKind::TwoPhase : FieldKind::OneDefect,
                                             random_phases(s));
    const double mix = s.angle() / 4.0;
    WalkerState st(Complex(std::cos(mix), 0.0),
                   std::polar(std::sin(mix), s.angle()));
    for (int t = 0; t < 12; ++t) {
      const std::int64_t lo = st.min_x(), hi = st.max_x();
      st = step(st, field);
      worst_norm = std::max(worst_norm, std::abs(st.norm_squared() - 1.0));
      support_ok = support_ok && st.min_x() >= lo - 1 && st.max_x() <= hi + 1;
    }
  }
  s.bound("lattice.unitarity", worst_norm, 1e-10);
  s.flag("lattice.support_growth", support_ok, "support grew by at most one per side");

  // Homogeneous and defect reductions, pointwise coins.
  const double sig = s.angle();
  const CoinField homog = build_coin_field(FieldKind::Homogeneous, PhasePair(sig, sig));
  const CoinField twop = build_coin_field(FieldKind::TwoPhase, PhasePair(sig, sig));
  const PhasePair ph = random_phases(s);
  const CoinField defect = build_coin_field(FieldKind::OneDefect, ph);
  const CoinField plain = build_coin_field(FieldKind::TwoPhase, ph);
  double worst_coin = 0.0;
  for (std::int64_t x = -40; x <= 40; ++x) {
    worst_coin = std::max(worst_coin, (homog.coin(x) - twop.coin(x)).cwiseAbs().maxCoeff());
    if (x != 0)
      worst_coin = std::max(worst_coin, (defect.coin(x) - plain.coin(x)).cwiseAbs().maxCoeff());
  }
  s.bound("lattice.field_reductions", worst_coin, 1e-15);

  // Parity: P(X_t = x) = 0 whenever x + t is odd.
  const WalkerState w = evolve(Complex(1.0, 0.0), Complex(0.0, 0.0),
                               build_coin_field(FieldKind::TwoPhase, random_phases(s)), 25);
  const MeasureProfile pr = probability_distribution(w);
  double worst_parity = 0.0;
  for (std::int64_t x = pr.min_x(); x <= pr.max_x(); ++x)
    if (((x + 25) % 2 + 2) % 2 == 1) worst_parity = std::max(worst_parity, pr.at(x));
  s.bound("lattice.parity", worst_parity, 1e-300);
}

void check_measures(Suite& s) {
  // Closed-form measure vs eigenvector measure, and eigen-residuals, across branches.
  double worst_consist = 0.0, worst_resid = 0.0, worst_decay = 0.0;
  for (int rep = 0; rep < 12; ++rep) {
    const PhasePair ph = random_phases(s);
    for (int index = 1; index <= 4; ++index) {
      for (int sq : {+1, -1}) {
        StationaryBranch br{index, sq, 1.0};
        EigenPacket pk;
        try {
          pk = stationary_eigenpacket(ph, br, 30);
        } catch (const std::domain_error&) {
          continue;  // singular branch draw
        }
        for (std::int64_t x = -30; x <= 30; ++x) {
          const double cf = stationary_measure_closed_form(ph, br, x);
          const double scale_ref = std::max(1.0, pk.measure.at(x));
          worst_consist = std::max(worst_consist, std::abs(cf - pk.measure.at(x)) / scale_ref);
        }
        const CoinField field = build_coin_field(FieldKind::TwoPhase, ph);
        for (std::int64_t x = -29; x <= 29; ++x) {
          const CoinOperator up = field.coin(x + 1);
          const CoinOperator dn = field.coin(x - 1);
          const AmplitudePair p1 = pk.at(x + 1), m1 = pk.at(x - 1), c0 = pk.at(x);
          const Complex l = up(0, 0) * p1.l + up(0, 1) * p1.r;
          const Complex r = dn(1, 0) * m1.l + dn(1, 1) * m1.r;
          const double sc = std::max(1.0, std::abs(c0.l) + std::abs(c0.r));
          worst_resid = std::max({worst_resid, std::abs(l - pk.lambda * c0.l) / sc,
                                  std::abs(r - pk.lambda * c0.r) / sc});
        }
        worst_decay = std::max(worst_decay, std::abs(pk.decay_rate_right - pk.decay_rate_left));
        if (pk.measure.at(1) > 0 && pk.measure.at(-1) > 0) {
          const double right = pk.measure.at(2) / pk.measure.at(1);
          const double left = pk.measure.at(-2) / pk.measure.at(-1);
          worst_decay = std::max(worst_decay, std::abs(right - left) / std::max(1.0, right));
        }
      }
    }
  }
  s.bound("measures.closed_form_vs_eigenvector", worst_consist, 1e-9);
  s.bound("measures.eigen_residual", worst_resid, 1e-10);
  s.bound("measures.decay_symmetry", worst_decay, 1e-9);

  // Identity of measures: chiral and non-chiral pinned cases.
  double worst_ident = 0.0;
  {
    const PhasePair chir(3.0 * kPi / 2.0, kPi / 2.0);
    const LimitMeasureSpec spec(chir, 1.0, 0.0, 0.0, 0.0);
    const double c2 = 1.0 / (2.0 * std::pow(3.0 + 2.0 * kSqrt2, 2));
    StationaryBranch br{1, +1, std::sqrt(c2)};
    for (std::int64_t x = -30; x <= 30; ++x)
      worst_ident = std::max(worst_ident,
                             std::abs(time_averaged_limit_measure(spec, x) -
                                      stationary_measure_closed_form(chir, br, x)));
    const PhasePair nonc(kPi, kPi / 2.0);
    const LimitMeasureSpec spec2(nonc, 1.0, 0.0, 0.0, 0.0);
    const double c2b = 1.0 / (3.0 * std::pow(2.0 + std::sqrt(3.0), 2));
    StationaryBranch br2{3, +1, std::sqrt(c2b)};
    for (std::int64_t x = -30; x <= 30; ++x)
      worst_ident = std::max(worst_ident,
                             std::abs(time_averaged_limit_measure(spec2, x) -
                                      stationary_measure_closed_form(nonc, br2, x)));
  }
  s.bound("measures.identity_with_stationary", worst_ident, 1e-12);

  // Weak-limit normalization over random specs.
  double worst_norm = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const LimitMeasureSpec spec = random_spec(s);
    const WeakLimitDensity d = weak_limit_density(spec);
    worst_norm = std::max(worst_norm, std::abs(d.delta_mass + d.continuous_mass() - 1.0));
  }
  s.bound("measures.weak_limit_normalization", worst_norm, 1e-6);

  // ab = 0: outputs depend only on the relative phase.
  double worst_shift = 0.0;
  for (int rep = 0; rep < 6; ++rep) {
    const PhasePair ph = random_phases(s);
    const double delta = s.angle();
    const PhasePair shifted(ph.sigma_plus + delta, ph.sigma_minus + delta);
    const LimitMeasureSpec a0(ph, 1.0, 0.0, 0.0, 0.0), a1(shifted, 1.0, 0.0, 0.0, 0.0);
    for (std::int64_t x = -10; x <= 10; ++x)
      worst_shift = std::max(worst_shift, std::abs(time_averaged_limit_measure(a0, x) -
                                                   time_averaged_limit_measure(a1, x)));
    const WeakLimitDensity d0 = weak_limit_density(a0), d1 = weak_limit_density(a1);
    for (double x : {-0.6, -0.25, 0.3, 0.55})
      worst_shift = std::max(worst_shift, std::abs(d0.w(x) - d1.w(x)));
    worst_shift = std::max(worst_shift, std::abs(d0.delta_mass - d1.delta_mass));
  }
  s.bound("measures.relative_phase_dependence", worst_shift, 1e-10);

  // Singular points sit on zeros of Lambda0; localization length symmetry.
  double worst_sing = 0.0;
  for (const PhasePair& ph : {PhasePair(3.0 * kPi / 2.0, kPi / 2.0), PhasePair(kPi, kPi / 2.0),
                              random_phases(s)}) {
    const LimitMeasureSpec spec(ph, 1.0, 0.0, 0.0, 0.0);
    for (const Complex z : singular_points(spec))
      worst_sing = std::max(worst_sing, lambda0_magnitude(std::arg(z), ph));
  }
  s.bound("measures.singular_points_on_zero_set", worst_sing, 1e-9);

  double worst_xi = 0.0;
  for (int rep = 0; rep < 16; ++rep) {
    const double sig = std::uniform_real_distribution<double>(0.01, kPi - 0.01)(s.rng);
    const double a = localization_length(sig), b = localization_length(-sig);
    worst_xi = std::max(worst_xi, std::abs(a - b) / std::max(1.0, std::abs(a)));
  }
  s.bound("measures.xi_symmetry", worst_xi, 1e-12);
}

void check_spectral_topology(Suite& s) {
  // Unitarity of path operators across kinds and sizes.
  double worst_unit = 0.0;
  for (int n : {2, 10, 100}) {
    for (FieldKind kind : {FieldKind::TwoPhase, FieldKind::OneDefect, FieldKind::Homogeneous}) {
      const PhasePair ph = kind == FieldKind::Homogeneous
                               ? [&] { const double a = s.angle(); return PhasePair(a, a); }()
                               : random_phases(s);
      const PathOperator op(build_coin_field(kind, ph), n);
      worst_unit = std::max(worst_unit, unitarity_residual(op.matrix()));
    }
  }
  s.bound("spectral.path_unitarity", worst_unit, 1e-10);

  // Chiral spectral symmetry: lambda and -conj(lambda) both present.
  {
    const double sp = s.angle();
    const PhasePair ph(sp, sp + kPi);
    const SpectrumReport rep = diagonalize(PathOperator(build_coin_field(FieldKind::TwoPhase, ph), 40));
    double worst = 0.0;
    for (const EigenPair& p : rep.pairs) {
      double best = 2.0;
      for (const EigenPair& q : rep.pairs)
        best = std::min(best, std::abs(q.lambda - (-std::conj(p.lambda))));
      worst = std::max(worst, best);
    }
    s.bound("spectral.chiral_reflection_symmetry", worst, 1e-8);
  }

  // Frame equivalence of eigenvalue multisets (directed Hausdorff).
  {
    const PhasePair ph = random_phases(s);
    const CoinField field = build_coin_field(FieldKind::TwoPhase, ph);
    const Eigen::MatrixXcd su = ring_walk_operator(field, 10);
    const Eigen::VectorXcd e0 = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(su, false).eigenvalues();
    double worst = 0.0;
    for (Frame f : {Frame::Prime, Frame::DoublePrime}) {
      const SymmetryFrameOperator op = symmetry_frame_operator(field, 10, f);
      const Eigen::VectorXcd e1 =
          Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(op.matrix, false).eigenvalues();
      for (int i = 0; i < e0.size(); ++i) {
        double best = 2.0;
        for (int j = 0; j < e1.size(); ++j) best = std::min(best, std::abs(e0(i) - e1(j)));
        worst = std::max(worst, best);
      }
    }
    s.bound("topology.frame_equivalence", worst, 1e-9);
  }

  // Gamma^2 = I, P^2 = +1, and the split-shift condition behind chirality.
  {
    const SymmetryOperators sym = symmetry_operators(6, s.angle());
    const int d = static_cast<int>(sym.gamma.rows());
    const double g2 = (sym.gamma * sym.gamma - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff();
    const double p2 =
        (sym.ph_unitary * sym.ph_unitary.conjugate() - Eigen::MatrixXcd::Identity(d, d))
            .cwiseAbs().maxCoeff();
    s.bound("topology.gamma_p_squares", std::max(g2, p2), 1e-12);
  }

  // Chiral residual < 1e-10 iff sigma_- = sigma_+ + n pi, over a phase grid.
  {
    bool ok = true;
    std::ostringstream os;
    for (int k = 0; k < 20; ++k) {
      const double sp = s.angle();
      const bool integer_n = k % 2 == 0;
      const double sm = integer_n ? sp + (k % 4 == 0 ? 0.0 : kPi)
                                  : sp + 0.15 + 2.8 * s.unit();
      const double gap = canonical_angle(sm - sp);
      const bool really_integer = std::min({gap, std::abs(gap - kPi), std::abs(gap - 2.0 * kPi)}) < 1e-9;
      const PhasePair ph(sp, sm);
      const CoinField field = build_coin_field(
          ph.sigma_plus == ph.sigma_minus ? FieldKind::Homogeneous : FieldKind::TwoPhase, ph);
      const SymmetryFrameOperator op = symmetry_frame_operator(field, 8, Frame::Prime);
      const SymmetryOperators sym = symmetry_operators(8, ph.sigma_plus);
      const double r = chiral_residual(op, sym);
      const bool small = r < 1e-10 * s.scale;
      if (small != really_integer) {
        ok = false;
        os << " counterexample sp=" << format_g17(sp) << " sm=" << format_g17(sm)
           << " residual=" << format_g17(r);
        break;
      }
    }
    s.flag("topology.chiral_residual_iff_npi", ok,
           ok ? "residual < 1e-10 exactly on the n*pi grid points" : os.str());
  }

  // Winding numbers: integers, grid-size independent, matching closed forms.
  {
    bool ok = true;
    for (int grid : {256, 1024, 8192}) {
      ok = ok && winding_number(0.0, kPi / 4.0, Frame::Prime, grid) == 1;
      ok = ok && winding_number(0.0, -kPi / 4.0, Frame::Prime, grid) == -1;
      ok = ok && winding_number(0.0, 1.1, Frame::DoublePrime, grid) == 0;
      ok = ok && winding_number(0.0, -2.9, Frame::DoublePrime, grid) == 0;
    }
    s.flag("topology.winding_integers", ok, "nu' = sign(theta), nu'' = 0 on all grids");
  }

  // Split-shift condition behind chirality: Gamma D S+- Gamma^-1 = D^-1 (S-+)^-1.
  {
    const int n = 5;
    const SymmetryOperators sym = symmetry_operators(n, s.angle());
    const int d = static_cast<int>(sym.gamma.rows());
    Eigen::MatrixXcd splus = Eigen::MatrixXcd::Zero(d, d), sminus = Eigen::MatrixXcd::Zero(d, d);
    Eigen::MatrixXcd dm = Eigen::MatrixXcd::Zero(d, d);
    auto idx = [&](std::int64_t x, int c) {
      std::int64_t r = (x + n) % (2 * n);
      if (r < 0) r += 2 * n;
      return static_cast<int>(2 * r + c);
    };
    for (std::int64_t x = -n; x <= n - 1; ++x) {
      splus(idx(x, 0), idx(x, 0)) = 1.0;
      splus(idx(x, 1), idx(x - 1, 1)) = 1.0;
      sminus(idx(x, 0), idx(x + 1, 0)) = 1.0;
      sminus(idx(x, 1), idx(x, 1)) = 1.0;
      dm(idx(x, 0), idx(x, 0)) = std::polar(1.0, -kPi / 4.0);
      dm(idx(x, 1), idx(x, 1)) = std::polar(1.0, kPi / 4.0);
    }
    const double r1 = (sym.gamma * dm * splus * sym.gamma - dm.inverse() * sminus.inverse())
                          .cwiseAbs().maxCoeff();
    const double r2 = (sym.gamma * dm * sminus * sym.gamma - dm.inverse() * splus.inverse())
                          .cwiseAbs().maxCoeff();
    s.bound("topology.condition_shift", std::max(r1, r2), 1e-12);
  }

  // Bulk-edge agreement on random chiral and incommensurate pairs.
  {
    bool ok = true;
    std::ostringstream os;
    for (int k = 0; k < 6 && ok; ++k) {
      const double sp = s.angle();
      const PhasePair chir(sp, sp + kPi);
      const SpectrumReport rep = classify(
          PathOperator(build_coin_field(FieldKind::TwoPhase, chir), 50),
          diagonalize(PathOperator(build_coin_field(FieldKind::TwoPhase, chir), 50)));
      const auto iso = rep.isolated();
      ok = iso.size() == 2;
      for (const EigenPair* p : iso)
        ok = ok && std::min(std::abs(p->lambda - Complex(0, 1)), std::abs(p->lambda + Complex(0, 1))) <
                       1e-8 * s.scale;
      if (!ok) os << "chiral pair sp=" << format_g17(sp) << " failed";
    }
    for (int k = 0; k < 6 && ok; ++k) {
      const double sp = s.angle();
      const PhasePair ph(sp, sp + 0.4 + 2.2 * s.unit());
      const double gap = canonical_angle(ph.sigma_minus - ph.sigma_plus);
      if (std::min({gap, std::abs(gap - kPi), std::abs(gap - 2.0 * kPi)}) < 1e-3) continue;
      const SpectrumReport rep = classify(
          PathOperator(build_coin_field(FieldKind::TwoPhase, ph), 50),
          diagonalize(PathOperator(build_coin_field(FieldKind::TwoPhase, ph), 50)));
      for (const EigenPair* p : rep.isolated()) {
        const double d = std::min(std::abs(p->lambda - Complex(0, 1)),
                                  std::abs(p->lambda + Complex(0, 1)));
        ok = ok && d > 1e-3;
        if (!ok) os << "incommensurate pair landed on +-i";
      }
    }
    s.flag("topology.bulk_edge_agreement", ok, ok ? "predictions matched spectra" : os.str());
  }

  // Determinism: identical seeds give identical trial records.
  {
    const PhasePair chir(3.0 * kPi / 2.0, kPi / 2.0);
    const RobustnessReport a = robustness_experiment(chir, 24, kPi / 4.0, 99, 4, 1);
    const RobustnessReport b = robustness_experiment(chir, 24, kPi / 4.0, 99, 4, 2);
    bool same = a.trials.size() == b.trials.size();
    for (std::size_t i = 0; same && i < a.trials.size(); ++i)
      same = a.trials[i].seed == b.trials[i].seed &&
             format_g17(a.trials[i].max_drift) == format_g17(b.trials[i].max_drift) &&
             a.trials[i].gap_closed == b.trials[i].gap_closed;
    s.flag("topology.determinism_under_seed", same,
           same ? "worker count does not change the records" : "trial records diverged");
  }
}

}  // namespace

std::vector<CheckResult> run_validation(double tolerance_scale, std::uint64_t seed) {
  Suite s(tolerance_scale, seed);
  check_lattice(s);
  check_measures(s);
  check_spectral_topology(s);
  return std::move(s.results);
}

}  // namespace qwalk
