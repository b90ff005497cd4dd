#pragma once

#include "qepi/cq_state.hpp"
#include "qepi/entropy.hpp"
#include "qepi/heat.hpp"

namespace qepi {

enum class FisherMethod { mi_ratio, entropy_derivative };

/// Estimate of J(X|M) = lim_{t->0+} I(X+sqrt(t)Z : Z|M)/t, nats per unit time.
struct FisherEstimate {
  double value = 0.0;
  FisherMethod method = FisherMethod::mi_ratio;
  std::vector<double> t_schedule;  ///< strictly decreasing
  std::vector<double> ratios;      ///< J-hat(t) per schedule entry (each a lower bound)
  bool extrapolated = false;
  double error_estimate = 0.0;
};

/// {1e-2, 5e-3, 2.5e-3} x Var(X), floored so the smallest entry stays >= 1e-4.
std::vector<double> default_t_schedule(const CQState& s);

/// Joint of (X' = X + sqrt(t) Z, Z, M): rho'(x', z) = rho(x' - sqrt(t) z).
/// The z-lattice is chosen so every sqrt(t) z offset is an exact multiple of
/// the x step; states are index shifts, never interpolated.
NoiseBundle make_noise_bundle(const CQState& s, double t);

/// General lattice-shift joint: row k of the second axis holds the state
/// shifted by cell_offsets[k] cells with weight weights[k] (weights sum to 1,
/// z_step is the second-axis spacing). make_noise_bundle is the Gaussian case.
NoiseBundle make_shift_bundle(const CQState& s, const std::vector<int>& cell_offsets,
                              const std::vector<double>& weights, double z_step, double t);

/// J from the mutual-information ratios I(t)/t with linear extrapolation on
/// the smallest pair; the ratios must be nondecreasing as t decreases
/// (concavity) or ScheduleTooCoarse is thrown.
FisherEstimate fisher_mi_ratio(const CQState& s, std::vector<double> schedule = {});

/// J from the de Bruijn identity: forward differences of S(X+sqrt(t)Z|M).
FisherEstimate fisher_debruijn(const CQState& s, std::vector<double> schedule = {});

/// J(X + sqrt(t) Z | M): evolves by t, then differentiates the entropy flow.
FisherEstimate fisher_at_time(const CQState& s, double t, std::vector<double> schedule = {});

/// Classical Fisher information matrix J_ij = ∫ d_i ln p d_j ln p p dx by
/// central differences on the effective support (p > 1e-12 max p).
/// Under the variance-t convention, trivial-M J(X) equals half its trace.
Eigen::MatrixXd fisher_matrix_classical(const GridDensity& p);

}  // namespace qepi
