#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <map>
#include <vector>

namespace qwalk {

using Complex = std::complex<double>;
using CoinOperator = Eigen::Matrix2cd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2 = 1.41421356237309504880;

/// Reduce an angle into [0, 2pi). Rejects NaN/inf.
double canonical_angle(double a);

/// Max-norm unitarity residual ||U^dag U - I||_max.
double unitarity_residual(const Eigen::Ref<const Eigen::MatrixXcd>& u);

/// The two coin phases. sigma/sigma_tilde are always derived on demand.
struct PhasePair {
  double sigma_plus = 0.0;
  double sigma_minus = 0.0;

  PhasePair() = default;
  PhasePair(double sp, double sm)
      : sigma_plus(canonical_angle(sp)), sigma_minus(canonical_angle(sm)) {}

  double sigma() const { return (sigma_plus - sigma_minus) / 2.0; }
  double sigma_tilde() const { return (sigma_plus + sigma_minus) / 2.0; }
};

/// Coin of the two-phase family: (1/sqrt2) [[1, e^{i s}], [e^{-i s}, -1]].
CoinOperator phase_coin(double sigma);

/// Defect coin diag(1, -1).
CoinOperator defect_coin();

enum class FieldKind { TwoPhase, OneDefect, Homogeneous, Perturbed };

struct Perturbation {
  double theta = kPi / 4;
  double omega = 0.0;
  double sigma_p = 0.0;  // one of the field's two phases
};

/// Map from integer position to a 2x2 unitary coin.
class CoinField {
 public:
  CoinField() = default;

  FieldKind kind() const { return kind_; }
  const PhasePair& phases() const { return phases_; }
  const std::map<std::int64_t, Perturbation>& table() const { return table_; }

  /// Coin at position x per the field kind.
  CoinOperator coin(std::int64_t x) const;

  friend CoinField build_coin_field(FieldKind kind, const PhasePair& phases,
                                    const std::map<std::int64_t, Perturbation>* perturbation);

 private:
  FieldKind kind_ = FieldKind::Homogeneous;
  PhasePair phases_;
  std::map<std::int64_t, Perturbation> table_;
};

/// Throws std::invalid_argument on NaN phases, a perturbation table supplied
/// for a non-Perturbed kind, or table entries with theta/omega outside [0,2pi).
CoinField build_coin_field(FieldKind kind, const PhasePair& phases,
                           const std::map<std::int64_t, Perturbation>* perturbation = nullptr);

struct AmplitudePair {
  Complex l{0.0, 0.0};
  Complex r{0.0, 0.0};
};

/// Finite-support state: dense amplitudes over [min_x, min_x + size - 1].
class WalkerState {
 public:
  WalkerState() = default;
  /// State concentrated at the origin. Spinor must be normalized within 1e-12.
  WalkerState(Complex alpha, Complex beta);

  std::int64_t min_x() const { return min_x_; }
  std::int64_t max_x() const { return min_x_ + static_cast<std::int64_t>(amps_.size()) - 1; }
  std::int64_t time() const { return time_; }

  AmplitudePair at(std::int64_t x) const;
  double norm_squared() const;

  friend WalkerState step(const WalkerState& state, const CoinField& field);
  friend class Evolver;

 private:
  std::int64_t min_x_ = 0;
  std::int64_t time_ = 0;
  std::vector<AmplitudePair> amps_;
};

/// Map from integer position to a nonnegative real value.
class MeasureProfile {
 public:
  MeasureProfile() = default;
  MeasureProfile(std::int64_t min_x, std::vector<double> values)
      : min_x_(min_x), values_(std::move(values)) {}

  std::int64_t min_x() const { return min_x_; }
  std::int64_t max_x() const { return min_x_ + static_cast<std::int64_t>(values_.size()) - 1; }
  double at(std::int64_t x) const;
  double sum() const;
  double max_value() const;
  const std::vector<double>& values() const { return values_; }

 private:
  std::int64_t min_x_ = 0;
  std::vector<double> values_;
};

/// One application of Psi_{t+1}(x) = P_{x+1} Psi_t(x+1) + Q_{x-1} Psi_t(x-1).
WalkerState step(const WalkerState& state, const CoinField& field);

/// T applications of step from a normalized spinor at the origin.
/// Throws std::invalid_argument if |alpha|^2 + |beta|^2 deviates from 1 by
/// more than 1e-12, std::runtime_error if norm drift ever exceeds 1e-8.
WalkerState evolve(Complex alpha, Complex beta, const CoinField& field, std::int64_t steps);

/// P(X_t = x) = |Psi^L(x)|^2 + |Psi^R(x)|^2.
MeasureProfile probability_distribution(const WalkerState& state);

/// (1/T) sum_{t=0}^{T-1} P(X_t = x). Requires T >= 1.
MeasureProfile time_averaged_empirical(const CoinField& field, Complex alpha, Complex beta,
                                       std::int64_t T);

}  // namespace qwalk
