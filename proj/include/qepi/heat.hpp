#pragma once

#include "qepi/cq_state.hpp"
#include "qepi/grid.hpp"

namespace qepi {

/// Heat-semigroup evolution X -> X + sqrt(t) Z, Z standard normal per axis
/// ("time t" adds variance t on each axis).
struct HeatOptions {
  double pad_factor = 6.0;         ///< grid extension half-width, in units of sqrt(t)
  double truncation_sigmas = 8.0;  ///< lattice kernel truncation
};

inline constexpr int kMaxAxisPointsBudget = 1 << 20;

/// p_t = p * N(0, t I_n) by discrete convolution with the Gaussian kernel
/// sampled and renormalized on the lattice; the output grid is extended by
/// pad_factor * sqrt(t) per side. Mass is preserved within 1e-8. t = 0 is the
/// identity. When the kernel outgrows the grid the convolution is evaluated
/// pairwise onto a coarser output lattice (spacing max(h, sqrt(t)/48)).
GridDensity heat_evolve_density(const GridDensity& p, double t, const HeatOptions& opt = {});

/// Evolves the classical variable of a cq state; conditional states become the
/// kernel-weighted mixtures of the originals and the average state of M is
/// unchanged (Z independent of M).
CQState heat_evolve_cq(const CQState& s, double t, const HeatOptions& opt = {});

/// Evolution along one classical axis of the joint.
CCQState heat_evolve_ccq_x(const CCQState& s, double t, const HeatOptions& opt = {});
CCQState heat_evolve_ccq_y(const CCQState& s, double t, const HeatOptions& opt = {});

}  // namespace qepi
