#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "qwalk/lattice.hpp"

namespace qwalk {

enum class Frame { Prime, DoublePrime };

/// Principal square root of a Hermitian unitary coin: the +1 eigenvalue maps
/// to +1 and the -1 eigenvalue to +i. Throws std::invalid_argument when the
/// input is not Hermitian-unitary within 1e-10.
CoinOperator coin_sqrt(const CoinOperator& coin);

/// Walk operator in a symmetry time frame, assembled on a periodic ring of
/// positions -N .. N-1 (full two-dimensional coin space at every site, so the
/// sitewise chiral blocks are well defined). The frame operators are the
/// split-shift products in which chiral symmetry is manifest; both are exactly
/// similar to S*U, so the spectra coincide.
struct SymmetryFrameOperator {
  Frame frame = Frame::Prime;
  int half_size = 0;
  CoinOperator coin_half;  // principal sqrt of the x = 0 coin
  Eigen::MatrixXcd matrix;
};

SymmetryFrameOperator symmetry_frame_operator(const CoinField& field, int half_size, Frame frame);

/// Plain S*U on the same ring (for frame-equivalence checks).
Eigen::MatrixXcd ring_walk_operator(const CoinField& field, int half_size);

/// Chiral operator Gamma (sitewise V tau1 V^-1) and the unitary part of the
/// antiunitary particle-hole operator P = (V tau0 V^-1) K.
struct SymmetryOperators {
  double sigma_prime = 0.0;
  double epsilon_gamma = -kPi / 2.0;
  double epsilon_p = 0.0;
  Eigen::MatrixXcd gamma;
  Eigen::MatrixXcd ph_unitary;  // P acts as psi -> ph_unitary * conj(psi)
};

SymmetryOperators symmetry_operators(int half_size, double sigma_prime);

/// || Gamma (e^{i eps} M) Gamma^-1 - (e^{i eps} M)^-1 ||_max.
double chiral_residual(const SymmetryFrameOperator& op, const SymmetryOperators& sym);

/// || P (e^{i eps} M) P^-1 - e^{i eps} M ||_max with P applied as conjugation
/// plus its unitary part.
double particle_hole_residual(const SymmetryFrameOperator& op, const SymmetryOperators& sym);

/// Winding number over the Brillouin zone from the closed-form Bloch phases
///   prime:       e^{i phi_k} = (cos k sin theta + i sin k) / r_k
///   doubleprime: e^{i phi_k} = (sin theta + i sin k cos theta) / r_k
/// Throws std::domain_error at gap closure (theta = 0 or r_k < 1e-9).
int winding_number(double sigma0, double theta, Frame frame, int grid = 2048);

/// Raw half-integer pair (nu_0, nu_pi) = ((nu'' + nu')/2, (nu'' - nu')/2).
std::pair<double, double> raw_topological_numbers(double sigma0, double theta);

struct TopologyReport {
  bool symmetry_holds = false;
  int n = 0;  // sigma_- = sigma_+ + n pi when symmetry_holds
  double chiral_resid = 0.0;
  double ph_resid = 0.0;
  std::pair<int, int> nu_right{0, 0};  // (nu_{-pi/2}^+, nu_{+pi/2}^+)
  std::pair<int, int> nu_left{0, 0};
  std::pair<double, double> raw_right{0.0, 0.0};  // (nu_0, nu_pi) before offset
  std::pair<double, double> raw_left{0.0, 0.0};
  int predicted_states_minus_pi_half = 0;  // edge states at eps = -pi/2 (lambda = +i)
  int predicted_states_plus_pi_half = 0;   // at eps = +pi/2 (lambda = -i)
};

/// Per-region topological numbers and the bulk-edge prediction for the
/// two-phase walk; no prediction when sigma_- - sigma_+ is not a multiple
/// of pi.
TopologyReport topological_numbers(const PhasePair& phases, int residual_half_size = 12);

/// Coin of the symmetry-preserving perturbation family.
CoinOperator perturbative_coin(double theta_x, double omega_x, double sigma_p);

/// Residual of the perturbation condition Gamma U_p tau3 Gamma^-1 = (U_p tau3)^-1
/// with the sitewise Gamma block for sigma_prime.
double perturbation_condition_residual(const CoinOperator& up, double sigma_prime);

struct RobustnessTrial {
  std::uint64_t seed = 0;
  double max_drift = 0.0;  // max |lambda_iso - reference| over tracked eigenvalues
  bool gap_closed = false; // flagged and excluded from drift statistics
};

struct RobustnessReport {
  std::vector<Complex> reference;  // unperturbed isolated eigenvalues
  std::vector<RobustnessTrial> trials;
  double max_drift = 0.0;          // over non-flagged trials
  int gap_closures = 0;
};

/// Draw i.i.d. delta-theta per site (uniform on [-range, range]), build the
/// perturbed field with theta_x = pi/4 + delta, sigma_p by the sign of x,
/// omega = 0, and track the isolated path eigenvalues across trials. Each
/// trial seeds its own generator from (seed, trial index), so results are
/// identical for any worker count.
RobustnessReport robustness_experiment(const PhasePair& phases, int half_size,
                                       double delta_theta_range, std::uint64_t seed, int trials,
                                       int workers = 1);

}  // namespace qwalk
