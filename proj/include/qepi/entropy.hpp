#pragma once

#include "qepi/cq_state.hpp"
#include "qepi/grid.hpp"

namespace qepi {

/// S(X) = -∫ p ln p over the grid (rectangle rule, 0 ln 0 := 0), in nats.
double differential_entropy(const GridDensity& p);

/// Per-point spectral entropies S(rho(x)); flagged points report 0 (they carry
/// no mass). Block partition exploited when given.
Eigen::ArrayXd pointwise_entropy(const StateTable& states, const std::vector<int>& block_dims,
                                 const std::vector<std::uint8_t>& flagged);

/// S(M|X) = ∫ S(rho(x)) p(x) dx, in [0, ln d].
double entropy_m_given_x(const CQState& s);

/// S(X|M) = S(M|X) + S(X) - S(M) with S(M) the entropy of the average state.
double entropy_x_given_m(const CQState& s);

double entropy_m_given_xy(const CCQState& s);

/// S(XY|M) by the chain rule on the joint grid.
double entropy_xy_given_m(const CCQState& s);

/// Every entropic quantity of a (X, Y, M) state, from one pass.
struct PairEntropies {
  double s_m = 0.0;
  double s_x = 0.0, s_y = 0.0, s_xy = 0.0;
  double s_m_given_x = 0.0, s_m_given_y = 0.0, s_m_given_xy = 0.0;
  double s_x_given_m = 0.0, s_y_given_m = 0.0, s_xy_given_m = 0.0;
  double cmi = 0.0;  ///< I(X:Y|M) = S(X|M) + S(Y|M) - S(XY|M)
};

PairEntropies pair_entropies(const CCQState& s);

/// I(X:Y|M) with a grid-refinement error bar (single halving).
struct CmiResult {
  double value = 0.0;
  double error_bar = 0.0;
};
CmiResult cmi(const CCQState& s);

/// I(X+sqrt(t)Z : Z | M) evaluated on the (X', Z) pair of the bundle; equals
/// S(X+sqrt(t)Z|M) - S(X|M) up to quadrature.
double cmi_with_noise(const NoiseBundle& bundle);

}  // namespace qepi
