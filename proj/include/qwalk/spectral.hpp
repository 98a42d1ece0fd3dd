#pragma once

#include <optional>
#include <vector>

#include "qwalk/lattice.hpp"

namespace qwalk {

/// Finite path truncation of the walk on positions -N .. N-1 with reflecting
/// boundary terms. Basis order is fixed:
///   {|-N,R>, |-N+1,L>, |-N+1,R>, ..., |N-2,L>, |N-2,R>, |N-1,L>}
/// so the matrix dimension is 4N-2.
class PathOperator {
 public:
  PathOperator(const CoinField& field, int half_size);

  int half_size() const { return n_; }
  int dim() const { return 4 * n_ - 2; }
  const Eigen::MatrixXcd& matrix() const { return m_; }
  const CoinField& field() const { return field_; }

  /// Basis index of |x, L> (valid for -N+1 <= x <= N-1).
  int index_l(std::int64_t x) const;
  /// Basis index of |x, R> (valid for -N <= x <= N-2).
  int index_r(std::int64_t x) const;
  /// ||v_L(x)||^2 + ||v_R(x)||^2 of a basis-ordered vector at position x.
  double site_weight(const Eigen::VectorXcd& v, std::int64_t x) const;

 private:
  int n_;
  CoinField field_;
  Eigen::MatrixXcd m_;
};

enum class SpectrumTag { Bulk, Isolated };

struct DecayFit {
  bool fitted = false;   // false when a side had fewer than 4 usable points
  double rate = 0.0;     // exp(slope) of the log-linear fit
  double rms = 0.0;      // residual of the fit in log space
};

struct EigenPair {
  Complex lambda;
  Eigen::VectorXcd vector;
  SpectrumTag tag = SpectrumTag::Bulk;
  double band_distance = 0.0;
  DecayFit fit_right, fit_left;  // only filled for isolated vectors
};

struct SpectrumReport {
  int half_size = 0;
  double band_tolerance = 0.0;
  std::vector<EigenPair> pairs;  // sorted by principal argument of lambda

  std::vector<const EigenPair*> isolated() const;
};

/// Minimum arc distance from a unit-modulus lambda to the bulk band
/// {e^{i(+-eps(k)+pi/2)} : cos eps(k) = sin(k)/sqrt2}.
double bulk_band_distance(Complex lambda);

/// Natural "isolated" scale: ten bulk level spacings, 10 * 2pi / dim.
double default_band_tolerance(int half_size);

/// Dense eigendecomposition; throws std::runtime_error if the solver fails or
/// any pair has residual ||Mv - lambda v|| above 1e-9.
SpectrumReport diagonalize(const PathOperator& op);

/// Assign bulk/isolated tags and fit the isolated eigenvectors' decay on each
/// side of the origin. Eigenvectors within an eigenvalue cluster (arc distance
/// < 1e-8) are orthonormalized before fitting. Negative band_tolerance means
/// the default.
SpectrumReport classify(const PathOperator& op, SpectrumReport report,
                        double band_tolerance = -1.0);

}  // namespace qwalk
