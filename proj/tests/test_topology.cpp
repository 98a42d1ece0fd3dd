#include <doctest.h>

#include <cmath>
#include <random>

#include "qwalk/spectral.hpp"
#include "qwalk/topology.hpp"

using namespace qwalk;

namespace {
const PhasePair kChiral(3.0 * kPi / 2.0, kPi / 2.0);
const PhasePair kNonChiral(kPi, kPi / 2.0);
const PhasePair kHomog(kPi / 2.0, kPi / 2.0);
}  // namespace

TEST_CASE("coin square root branch rule") {
  CHECK((coin_sqrt(CoinOperator::Identity()) - CoinOperator::Identity()).cwiseAbs().maxCoeff() <
        1e-14);
  CoinOperator tau3;
  tau3 << 1, 0, 0, -1;
  CoinOperator expect;
  expect << 1, 0, 0, Complex(0, 1);
  CHECK((coin_sqrt(tau3) - expect).cwiseAbs().maxCoeff() < 1e-14);

  const CoinOperator up = phase_coin(3.0 * kPi / 2.0);
  const CoinOperator half = coin_sqrt(up);
  CHECK((half * half - up).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(unitarity_residual(half) < 1e-13);

  CoinOperator nonhermitian;
  nonhermitian << 0, 1, -1, 0;
  CHECK_THROWS_AS(coin_sqrt(nonhermitian), std::invalid_argument);
}

TEST_CASE("frame operators: unitarity and spectral equivalence") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi);
  for (int rep = 0; rep < 4; ++rep) {
    const PhasePair ph(ang(rng), ang(rng));
    const CoinField field = build_coin_field(FieldKind::TwoPhase, ph);
    const Eigen::MatrixXcd su = ring_walk_operator(field, 8);
    const Eigen::VectorXcd base =
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(su, false).eigenvalues();
    for (Frame f : {Frame::Prime, Frame::DoublePrime}) {
      const SymmetryFrameOperator op = symmetry_frame_operator(field, 8, f);
      CHECK(unitarity_residual(op.matrix) < 1e-13);
      CHECK((op.coin_half * op.coin_half - field.coin(0)).cwiseAbs().maxCoeff() < 1e-12);
      const Eigen::VectorXcd ev =
          Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(op.matrix, false).eigenvalues();
      double worst = 0.0;
      for (int i = 0; i < base.size(); ++i) {
        double best = 2.0;
        for (int j = 0; j < ev.size(); ++j) best = std::min(best, std::abs(base(i) - ev(j)));
        worst = std::max(worst, best);
      }
      CHECK(worst < 1e-9);
    }
  }
}

TEST_CASE("smallest ring frame is still unitary") {
  const CoinField field = build_coin_field(FieldKind::TwoPhase, kChiral);
  for (Frame f : {Frame::Prime, Frame::DoublePrime})
    CHECK(unitarity_residual(symmetry_frame_operator(field, 2, f).matrix) < 1e-13);
}

TEST_CASE("chiral and particle-hole residuals") {
  struct Case {
    PhasePair ph;
    bool symmetric;
  };
  const Case cases[] = {
      {kChiral, true}, {kHomog, true}, {kNonChiral, false}, {PhasePair(0.7, 0.7 + kPi), true},
      {PhasePair(1.3, 2.0), false}};
  for (const Case& c : cases) {
    const CoinField field = build_coin_field(
        c.ph.sigma_plus == c.ph.sigma_minus ? FieldKind::Homogeneous : FieldKind::TwoPhase, c.ph);
    const SymmetryFrameOperator prime = symmetry_frame_operator(field, 10, Frame::Prime);
    const SymmetryFrameOperator dprime = symmetry_frame_operator(field, 10, Frame::DoublePrime);
    const SymmetryOperators sym = symmetry_operators(10, c.ph.sigma_plus);
    const double chi = chiral_residual(prime, sym);
    const double ph_r = particle_hole_residual(prime, sym);
    if (c.symmetric) {
      CHECK(chi < 1e-10);
      CHECK(ph_r < 1e-10);
      CHECK(chiral_residual(dprime, sym) < 1e-10);
    } else {
      CHECK(chi > 1e-2);
      CHECK(ph_r > 1e-2);
    }
  }
}

TEST_CASE("symmetry operators square to identity") {
  const SymmetryOperators sym = symmetry_operators(6, 0.9177);
  const int d = static_cast<int>(sym.gamma.rows());
  CHECK((sym.gamma * sym.gamma - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-12);
  // P^2 = Mp conj(Mp) = +1
  CHECK((sym.ph_unitary * sym.ph_unitary.conjugate() - Eigen::MatrixXcd::Identity(d, d))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("global phase invariance of the chiral residual") {
  const CoinField field = build_coin_field(FieldKind::TwoPhase, kChiral);
  SymmetryFrameOperator op = symmetry_frame_operator(field, 8, Frame::Prime);
  SymmetryOperators sym = symmetry_operators(8, kChiral.sigma_plus);
  const double base = chiral_residual(op, sym);
  const double delta = 0.7313;
  op.matrix *= std::polar(1.0, delta);
  sym.epsilon_gamma -= delta;
  CHECK(std::abs(chiral_residual(op, sym) - base) < 1e-12);
}

TEST_CASE("winding numbers from the Bloch phases") {
  CHECK(winding_number(0.0, kPi / 4.0, Frame::Prime) == 1);
  CHECK(winding_number(0.0, -kPi / 4.0, Frame::Prime) == -1);
  for (double theta : {0.2, 1.0, 2.8}) {
    CHECK(winding_number(0.3, theta, Frame::Prime) == 1);
    CHECK(winding_number(0.3, -theta, Frame::Prime) == -1);
    CHECK(winding_number(0.3, theta, Frame::DoublePrime) == 0);
    CHECK(winding_number(0.3, -theta, Frame::DoublePrime) == 0);
  }
  // Grid-size independence.
  for (int grid : {256, 512, 2048, 8192})
    CHECK(winding_number(1.1, kPi / 4.0, Frame::Prime, grid) == 1);
  CHECK_THROWS_AS(winding_number(0.0, 0.0, Frame::Prime), std::domain_error);
  CHECK_THROWS_AS(winding_number(0.0, kPi, Frame::Prime), std::domain_error);

  const auto raw = raw_topological_numbers(0.0, kPi / 4.0);
  CHECK(raw.first == doctest::Approx(0.5));
  CHECK(raw.second == doctest::Approx(-0.5));
}

TEST_CASE("topological numbers and the bulk-edge prediction") {
  const TopologyReport chiral = topological_numbers(kChiral);
  CHECK(chiral.symmetry_holds);
  CHECK(chiral.n % 2 == 1);
  CHECK(chiral.nu_right == std::pair<int, int>{1, 0});
  CHECK(chiral.nu_left == std::pair<int, int>{0, 1});
  CHECK(chiral.predicted_states_minus_pi_half == 1);
  CHECK(chiral.predicted_states_plus_pi_half == 1);
  CHECK(chiral.chiral_resid < 1e-10);

  const TopologyReport even = topological_numbers(PhasePair(kPi / 2.0, kPi / 2.0));
  CHECK(even.symmetry_holds);
  CHECK(even.nu_left == even.nu_right);
  CHECK(even.predicted_states_minus_pi_half == 0);
  CHECK(even.predicted_states_plus_pi_half == 0);

  const TopologyReport broken = topological_numbers(kNonChiral);
  CHECK_FALSE(broken.symmetry_holds);
  CHECK(broken.chiral_resid > 1e-2);
}

TEST_CASE("perturbative coin family") {
  // theta = pi/4, omega = 0 reproduces the walk coin.
  const CoinOperator up = perturbative_coin(kPi / 4.0, 0.0, kChiral.sigma_plus);
  CHECK((up - phase_coin(kChiral.sigma_plus)).cwiseAbs().maxCoeff() < 1e-14);
  // theta = 0 is the defect coin.
  CHECK((perturbative_coin(0.0, 0.0, 1.234) - defect_coin()).cwiseAbs().maxCoeff() < 1e-14);
  // theta = pi/2 is purely off-diagonal.
  const CoinOperator off = perturbative_coin(kPi / 2.0, 0.0, 0.4);
  CHECK(std::abs(off(0, 0)) < 1e-15);
  CHECK(std::abs(off(0, 1) - std::polar(1.0, 0.4)) < 1e-15);

  // Symmetry condition Gamma U_p tau3 Gamma^-1 = (U_p tau3)^-1.
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi);
  for (int rep = 0; rep < 10; ++rep) {
    const double sp = ang(rng);
    const CoinOperator u = perturbative_coin(ang(rng), 0.0, sp);
    CHECK(unitarity_residual(u) < 1e-12);
    CHECK(perturbation_condition_residual(u, sp) < 1e-12);
    CHECK(perturbation_condition_residual(u, sp + kPi) < 1e-12);
    // Mismatched sigma' breaks it (generic angles).
    const double foreign = sp + 0.9;
    CHECK(perturbation_condition_residual(u, foreign) > 1e-10);
  }
}

TEST_CASE("robustness: chiral eigenvalues pinned, non-chiral drift") {
  const RobustnessReport chiral = robustness_experiment(kChiral, 60, kPi / 4.0, 12345, 6);
  REQUIRE(chiral.reference.size() == 2);
  CHECK(chiral.gap_closures == 0);
  CHECK(chiral.max_drift < 1e-8);

  const RobustnessReport nonch = robustness_experiment(kNonChiral, 60, kPi / 4.0, 12345, 6);
  CHECK(nonch.max_drift > 1e-3);

  // Zero-width range: drift exactly zero.
  const RobustnessReport zero = robustness_experiment(kChiral, 40, 0.0, 9, 2);
  CHECK(zero.max_drift == 0.0);

  // Determinism across worker counts.
  const RobustnessReport a = robustness_experiment(kChiral, 40, kPi / 4.0, 77, 5, 1);
  const RobustnessReport b = robustness_experiment(kChiral, 40, kPi / 4.0, 77, 5, 4);
  REQUIRE(a.trials.size() == b.trials.size());
  for (std::size_t i = 0; i < a.trials.size(); ++i) {
    CHECK(a.trials[i].seed == b.trials[i].seed);
    CHECK(a.trials[i].max_drift == b.trials[i].max_drift);
  }
  CHECK_THROWS_AS(robustness_experiment(kChiral, 20, 2.0, 1, 1), std::invalid_argument);
}
