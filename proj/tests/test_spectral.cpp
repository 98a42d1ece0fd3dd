#include <doctest.h>

#include <cmath>
#include <random>

#include "qwalk/measures.hpp"
#include "qwalk/spectral.hpp"

using namespace qwalk;

namespace {
const PhasePair kChiral(3.0 * kPi / 2.0, kPi / 2.0);
const PhasePair kNonChiral(kPi, kPi / 2.0);
const PhasePair kHomog(kPi / 2.0, kPi / 2.0);

SpectrumReport spectrum_of(const PhasePair& ph, FieldKind kind, int n) {
  const PathOperator op(build_coin_field(kind, ph), n);
  return classify(op, diagonalize(op));
}
}  // namespace

TEST_CASE("path operator construction and unitarity") {
  const PathOperator small(build_coin_field(FieldKind::Homogeneous, PhasePair(0.0, 0.0)), 2);
  CHECK(small.dim() == 6);
  CHECK(unitarity_residual(small.matrix()) < 1e-14);
  const SpectrumReport rep = diagonalize(small);
  for (const EigenPair& p : rep.pairs)
    CHECK((small.matrix() * p.vector - p.lambda * p.vector).norm() < 1e-12);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi);
  for (int n : {2, 10, 100}) {
    for (FieldKind kind : {FieldKind::TwoPhase, FieldKind::OneDefect}) {
      const PathOperator op(build_coin_field(kind, PhasePair(ang(rng), ang(rng))), n);
      CHECK(unitarity_residual(op.matrix()) < 1e-10);
    }
  }
  CHECK_THROWS_AS(PathOperator(build_coin_field(FieldKind::TwoPhase, kChiral), 1),
                  std::invalid_argument);
}

TEST_CASE("bulk band distance") {
  // Band members at k = 0: eps = +-pi/2, lambda = e^{i(pi/2 + pi/2)} = -1.
  CHECK(bulk_band_distance(Complex(-1.0, 0.0)) == 0.0);
  CHECK(bulk_band_distance(Complex(1.0, 0.0)) == 0.0);
  // +-i sit mid-gap: a quarter turn from both arcs.
  CHECK(bulk_band_distance(Complex(0.0, 1.0)) == doctest::Approx(kPi / 4.0).epsilon(1e-12));
  CHECK(bulk_band_distance(Complex(0.0, -1.0)) == doctest::Approx(kPi / 4.0).epsilon(1e-12));
  // Grid oracle: minimum over e^{i(+-eps(k)+pi/2)} on a fine k grid.
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi);
  for (int rep = 0; rep < 12; ++rep) {
    const Complex lam = std::polar(1.0, ang(rng));
    double best = 10.0;
    for (int i = 0; i < 100000; ++i) {
      const double k = 2.0 * kPi * i / 100000;
      const double eps = std::acos(std::clamp(std::sin(k) / kSqrt2, -1.0, 1.0));
      for (double e : {eps, -eps}) {
        const double d = std::abs(std::remainder(std::arg(lam) - (e + kPi / 2.0), 2.0 * kPi));
        best = std::min(best, d);
      }
    }
    // grid resolution limits the oracle to ~2 pi / 1e5
    CHECK(std::abs(bulk_band_distance(lam) - best) < 2e-4);
  }
  CHECK_THROWS_AS(bulk_band_distance(Complex(0.5, 0.0)), std::invalid_argument);
}

TEST_CASE("homogeneous path: dense band, no isolated eigenvalues") {
  const SpectrumReport rep = spectrum_of(kHomog, FieldKind::Homogeneous, 100);
  CHECK(rep.isolated().empty());
  for (const EigenPair& p : rep.pairs) {
    CHECK(std::abs(std::abs(p.lambda) - 1.0) < 1e-8);
    CHECK(p.band_distance < 1e-6);
  }
}

TEST_CASE("chiral path: exactly two isolated eigenvalues at +-i") {
  const SpectrumReport rep = spectrum_of(kChiral, FieldKind::TwoPhase, 100);
  const auto iso = rep.isolated();
  REQUIRE(iso.size() == 2);
  double di = 2.0, dmi = 2.0;
  for (const EigenPair* p : iso) {
    di = std::min(di, std::abs(p->lambda - Complex(0, 1)));
    dmi = std::min(dmi, std::abs(p->lambda + Complex(0, 1)));
    REQUIRE(p->fit_right.fitted);
    REQUIRE(p->fit_left.fitted);
    CHECK(std::abs(p->fit_right.rate - 1.0 / (3.0 + 2.0 * kSqrt2)) < 1e-3);
    CHECK(std::abs(p->fit_left.rate - 1.0 / (3.0 + 2.0 * kSqrt2)) < 1e-3);
  }
  CHECK(di < 1e-8);
  CHECK(dmi < 1e-8);
}

TEST_CASE("non-chiral path: two isolated eigenvalues off +-i") {
  const SpectrumReport rep = spectrum_of(kNonChiral, FieldKind::TwoPhase, 100);
  const auto iso = rep.isolated();
  REQUIRE(iso.size() == 2);
  // They match the decaying analytic branch +-e^{i pi/3} and its decay rate.
  for (const EigenPair* p : iso) {
    const double d = std::min(std::abs(p->lambda - std::polar(1.0, kPi / 3.0)),
                              std::abs(p->lambda + std::polar(1.0, kPi / 3.0)));
    CHECK(d < 1e-6);
    CHECK(std::abs(p->lambda - Complex(0, 1)) > 1e-3);
    CHECK(std::abs(p->lambda + Complex(0, 1)) > 1e-3);
    REQUIRE(p->fit_right.fitted);
    CHECK(std::abs(p->fit_right.rate - 1.0 / (2.0 + std::sqrt(3.0))) < 1e-3);
  }
}

TEST_CASE("isolated eigenvector matches the stationary measure pointwise") {
  // Chiral lambda = i vector vs the closed-form branch 1 with
  // c^2 = 1/(4 + 3 sqrt2) (the overlay normalization), max error 1e-4 over
  // |x| <= 20.
  const PathOperator op(build_coin_field(FieldKind::TwoPhase, kChiral), 100);
  const SpectrumReport rep = classify(op, diagonalize(op));
  for (const EigenPair* p : rep.isolated()) {
    if (std::abs(p->lambda - Complex(0, 1)) > 1e-6) continue;
    const double c2 = 1.0 / (4.0 + 3.0 * kSqrt2);
    double worst = 0.0;
    for (std::int64_t x = -20; x <= 20; ++x) {
      const double expect = stationary_measure_closed_form(kChiral, {1, +1, std::sqrt(c2)}, x);
      worst = std::max(worst, std::abs(op.site_weight(p->vector, x) - expect));
    }
    CHECK(worst < 1e-4);
  }
  // Non-chiral counterpart: branch 3, c^2 = (1 + sqrt3)/(9 + 5 sqrt3).
  const PathOperator op2(build_coin_field(FieldKind::TwoPhase, kNonChiral), 100);
  const SpectrumReport rep2 = classify(op2, diagonalize(op2));
  for (const EigenPair* p : rep2.isolated()) {
    if (std::abs(p->lambda - std::polar(1.0, kPi / 3.0)) > 1e-5) continue;
    const double s3 = std::sqrt(3.0);
    const double c2 = (1.0 + s3) / (9.0 + 5.0 * s3);
    double worst = 0.0;
    for (std::int64_t x = -20; x <= 20; ++x) {
      const double expect = stationary_measure_closed_form(kNonChiral, {3, +1, std::sqrt(c2)}, x);
      worst = std::max(worst, std::abs(op2.site_weight(p->vector, x) - expect));
    }
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("chiral spectral reflection symmetry") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi);
  const double sp = ang(rng);
  const SpectrumReport rep = spectrum_of(PhasePair(sp, sp + kPi), FieldKind::TwoPhase, 60);
  for (const EigenPair& p : rep.pairs) {
    double best = 2.0;
    for (const EigenPair& q : rep.pairs)
      best = std::min(best, std::abs(q.lambda - (-std::conj(p.lambda))));
    CHECK(best < 1e-8);
  }
}

TEST_CASE("isolated eigenvalues converge in N") {
  Complex at50, at100, at150;
  for (int n : {50, 100, 150}) {
    const SpectrumReport rep = spectrum_of(kNonChiral, FieldKind::TwoPhase, n);
    double best = 2.0;
    Complex lam;
    for (const EigenPair* p : rep.isolated()) {
      const double d = std::abs(p->lambda - std::polar(1.0, kPi / 3.0));
      if (d < best) {
        best = d;
        lam = p->lambda;
      }
    }
    (n == 50 ? at50 : n == 100 ? at100 : at150) = lam;
  }
  CHECK(std::abs(at100 - at50) < 1e-8);
  CHECK(std::abs(at150 - at100) < 1e-8);
}

TEST_CASE("singular points conjugate onto the isolated path eigenvalues") {
  // The generating variable is dual to the eigenvalue, so the point set maps
  // onto the isolated spectrum under conjugation (fixed set {+-i} in the
  // chiral case).
  for (const PhasePair& ph : {kChiral, kNonChiral}) {
    const std::vector<Complex> pts = singular_points(LimitMeasureSpec(ph, 1, 0, 0, 0));
    const SpectrumReport rep = spectrum_of(ph, FieldKind::TwoPhase, 100);
    const auto iso = rep.isolated();
    REQUIRE(pts.size() == iso.size());
    for (const Complex z : pts) {
      double best = 2.0;
      for (const EigenPair* p : iso) best = std::min(best, std::abs(std::conj(z) - p->lambda));
      CHECK(best < 1e-6);
    }
  }
}

TEST_CASE("eigenvalues of the defect path match the defect spectrum") {
  // sigma = pi/4: the decaying pair of the one-defect family is isolated on
  // the path; the other pair sits at the band edge.
  const PhasePair ph(kPi, kPi / 2.0);
  const PathOperator op(build_coin_field(FieldKind::OneDefect, ph), 80);
  const SpectrumReport rep = classify(op, diagonalize(op));
  const DefectSpectrum ds = defect_model_spectrum(ph);
  const auto iso = rep.isolated();
  REQUIRE(iso.size() == 2);
  for (const EigenPair* p : iso) {
    const double d = std::min(std::abs(p->lambda - ds.lambda[0]), std::abs(p->lambda - ds.lambda[1]));
    CHECK(d < 1e-6);
  }
}

TEST_CASE("band tolerance default scales with the level spacing") {
  const double tol = default_band_tolerance(100);
  CHECK(tol == doctest::Approx(10.0 * kPi / 398.0));
  // must keep the non-chiral isolated pair (arc distance pi/3 - pi/4) isolated
  // even at the smallest size used by the convergence invariant
  CHECK(default_band_tolerance(50) < kPi / 3.0 - kPi / 4.0);
}
