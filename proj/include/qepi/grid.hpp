#pragma once

#include <Eigen/Core>
#include <vector>

#include "qepi/errors.hpp"

namespace qepi {

inline constexpr int kMinAxisPoints = 16;
inline constexpr double kMassTol = 1e-8;
inline constexpr double kZeroMass = 1e-300;

/// One uniform axis of cell centers: x_i = lo + (i + 1/2) h, h = (hi - lo)/points.
struct Axis {
  double lo = -10.0;
  double hi = 10.0;
  int points = 1024;

  double step() const { return (hi - lo) / points; }
  double coord(int i) const { return lo + (i + 0.5) * step(); }

  /// Same spacing, `extra` cells added on each side.
  Axis extended(int extra) const {
    const double h = step();
    return Axis{lo - extra * h, hi + extra * h, points + 2 * extra};
  }
  void check() const;
  bool operator==(const Axis&) const = default;
};

/// Uniform lattice over R^n, n in {1, 2}. Flat index is x-major:
/// flat = ix * axes[1].points + iy.
struct Grid {
  std::vector<Axis> axes;

  Grid() = default;
  explicit Grid(Axis a) : axes{a} { validate(); }
  Grid(Axis a, Axis b) : axes{a, b} { validate(); }

  int dim() const { return static_cast<int>(axes.size()); }
  std::size_t size() const;
  double cell() const;  ///< product of axis steps
  void validate() const;
  bool operator==(const Grid&) const = default;
};

/// Nonnegative values per grid point integrating to 1 (rectangle rule).
class GridDensity {
 public:
  GridDensity(Grid grid, Eigen::ArrayXd values, bool renormalize = false);

  const Grid& grid() const { return grid_; }
  const Eigen::ArrayXd& values() const { return values_; }
  Eigen::ArrayXd& mutable_values() { return values_; }
  double mass() const { return values_.sum() * grid_.cell(); }

  bool coverage_warning() const { return coverage_warning_; }
  void set_coverage_warning(bool w) { coverage_warning_ = w; }

 private:
  Grid grid_;
  Eigen::ArrayXd values_;
  bool coverage_warning_ = false;
};

/// Discretized N(mean, cov) on the grid, renormalized so the mass is exactly 1.
/// Warns (flag) when an axis does not cover mean ± 6σ; rejects σ < 4h.
GridDensity gaussian_density(const Eigen::VectorXd& mean, const Eigen::MatrixXd& covariance,
                             const Grid& grid);

/// Convenience 1D overload.
GridDensity gaussian_density(double mean, double variance, const Axis& axis);

struct GaussianComponent {
  double weight = 1.0;
  double mean = 0.0;
  double variance = 1.0;
};

/// 1D Gaussian mixture, renormalized on the grid.
GridDensity mixture_density(const std::vector<GaussianComponent>& components, const Axis& axis);

/// Indicator of [lo, hi] sampled on the axis, renormalized.
GridDensity uniform_density(double lo, double hi, const Axis& axis);

double density_mean(const GridDensity& p, int axis = 0);
double density_variance(const GridDensity& p, int axis = 0);
double total_variance(const GridDensity& p);  ///< sum over axes

/// Every other point along each axis (renormalized); for refinement error bars.
GridDensity coarsen(const GridDensity& p);

}  // namespace qepi
