#include "qepi/grid.hpp"

#include <fmt/format.h>

#include <Eigen/Cholesky>
#include <cmath>

namespace qepi {

void Axis::check() const {
  if (points < kMinAxisPoints) {
    throw GridTooCoarse(fmt::format("axis has {} points, minimum is {}", points, kMinAxisPoints));
  }
  if (!(hi > lo)) {
    throw InvalidParameters(fmt::format("axis bounds [{}, {}] are not increasing", lo, hi));
  }
}

std::size_t Grid::size() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= static_cast<std::size_t>(a.points);
  return n;
}

double Grid::cell() const {
  double c = 1.0;
  for (const auto& a : axes) c *= a.step();
  return c;
}

void Grid::validate() const {
  if (axes.empty() || axes.size() > 2) {
    throw InvalidParameters(fmt::format("grid dimension {} not in {{1, 2}}", axes.size()));
  }
  for (const auto& a : axes) a.check();
}

GridDensity::GridDensity(Grid grid, Eigen::ArrayXd values, bool renormalize)
    : grid_(std::move(grid)), values_(std::move(values)) {
  grid_.validate();
  if (static_cast<std::size_t>(values_.size()) != grid_.size()) {
    throw DimensionMismatch(fmt::format("density has {} values for a {}-point grid",
                                        values_.size(), grid_.size()));
  }
  const double min_v = values_.minCoeff();
  if (min_v < -1e-12) {
    throw InvalidParameters(fmt::format("density has negative value {:.3e}", min_v));
  }
  if (min_v < 0.0) values_ = values_.max(0.0);
  const double m = mass();
  if (renormalize) {
    if (m <= 0.0) throw InvalidParameters("density has zero mass");
    values_ /= m;
  } else if (std::abs(m - 1.0) > kMassTol) {
    throw InvalidParameters(fmt::format("density mass {} deviates from 1 beyond {:.1e}", m, kMassTol));
  }
}

GridDensity gaussian_density(const Eigen::VectorXd& mean, const Eigen::MatrixXd& covariance,
                             const Grid& grid) {
  const int n = grid.dim();
  if (mean.size() != n || covariance.rows() != n || covariance.cols() != n) {
    throw DimensionMismatch(fmt::format("gaussian: mean/covariance of dim {} on a {}D grid",
                                        mean.size(), n));
  }
  if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw CovarianceNotSPD("covariance is not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success) {
    throw CovarianceNotSPD("covariance is not positive definite");
  }
  bool warn = false;
  for (int a = 0; a < n; ++a) {
    const double sigma = std::sqrt(covariance(a, a));
    const Axis& ax = grid.axes[a];
    if (sigma < 4.0 * ax.step()) {
      throw GridTooCoarse(fmt::format("sigma {:.4g} on axis {} is below 4h = {:.4g}", sigma, a,
                                      4.0 * ax.step()));
    }
    if (mean[a] - 6.0 * sigma < ax.lo || mean[a] + 6.0 * sigma > ax.hi) warn = true;
  }

  Eigen::ArrayXd vals(grid.size());
  if (n == 1) {
    const Axis& ax = grid.axes[0];
    const double inv2v = 0.5 / covariance(0, 0);
    for (int i = 0; i < ax.points; ++i) {
      const double dx = ax.coord(i) - mean[0];
      vals[i] = std::exp(-dx * dx * inv2v);
    }
  } else {
    const Eigen::MatrixXd prec = llt.solve(Eigen::MatrixXd::Identity(n, n));
    const Axis& ax = grid.axes[0];
    const Axis& ay = grid.axes[1];
    for (int i = 0; i < ax.points; ++i) {
      const double dx = ax.coord(i) - mean[0];
      for (int j = 0; j < ay.points; ++j) {
        const double dy = ay.coord(j) - mean[1];
        const double q = prec(0, 0) * dx * dx + 2.0 * prec(0, 1) * dx * dy + prec(1, 1) * dy * dy;
        vals[static_cast<Eigen::Index>(i) * ay.points + j] = std::exp(-0.5 * q);
      }
    }
  }
  GridDensity out(grid, std::move(vals), /*renormalize=*/true);
  out.set_coverage_warning(warn);
  return out;
}

GridDensity gaussian_density(double mean, double variance, const Axis& axis) {
  Eigen::VectorXd m(1);
  m << mean;
  Eigen::MatrixXd c(1, 1);
  c << variance;
  return gaussian_density(m, c, Grid(axis));
}

GridDensity mixture_density(const std::vector<GaussianComponent>& components, const Axis& axis) {
  if (components.empty()) throw InvalidParameters("mixture needs at least one component");
  Eigen::ArrayXd vals = Eigen::ArrayXd::Zero(axis.points);
  bool warn = false;
  for (const auto& c : components) {
    if (c.weight < 0.0) throw InvalidParameters("mixture weight must be nonnegative");
    GridDensity g = gaussian_density(c.mean, c.variance, axis);
    warn = warn || g.coverage_warning();
    vals += c.weight * g.values();
  }
  GridDensity out(Grid(axis), std::move(vals), /*renormalize=*/true);
  out.set_coverage_warning(warn);
  return out;
}

GridDensity uniform_density(double lo, double hi, const Axis& axis) {
  if (!(hi > lo)) throw InvalidParameters("uniform: hi must exceed lo");
  Eigen::ArrayXd vals = Eigen::ArrayXd::Zero(axis.points);
  for (int i = 0; i < axis.points; ++i) {
    const double x = axis.coord(i);
    if (x >= lo && x <= hi) vals[i] = 1.0;
  }
  if (vals.sum() == 0.0) throw InvalidParameters("uniform support misses every grid point");
  return GridDensity(Grid(axis), std::move(vals), /*renormalize=*/true);
}

namespace {

// Marginal moment along one axis of a (possibly 2D) density.
std::pair<double, double> axis_moments(const GridDensity& p, int axis) {
  const Grid& g = p.grid();
  const double cell = g.cell();
  double m1 = 0.0, m2 = 0.0;
  if (g.dim() == 1) {
    const Axis& ax = g.axes[0];
    for (int i = 0; i < ax.points; ++i) {
      const double w = p.values()[i] * cell;
      const double x = ax.coord(i);
      m1 += w * x;
      m2 += w * x * x;
    }
  } else {
    const Axis& ax = g.axes[0];
    const Axis& ay = g.axes[1];
    for (int i = 0; i < ax.points; ++i) {
      for (int j = 0; j < ay.points; ++j) {
        const double w = p.values()[static_cast<Eigen::Index>(i) * ay.points + j] * cell;
        const double x = (axis == 0) ? ax.coord(i) : ay.coord(j);
        m1 += w * x;
        m2 += w * x * x;
      }
    }
  }
  return {m1, m2};
}

}  // namespace

double density_mean(const GridDensity& p, int axis) { return axis_moments(p, axis).first; }

double density_variance(const GridDensity& p, int axis) {
  const auto [m1, m2] = axis_moments(p, axis);
  return m2 - m1 * m1;
}

double total_variance(const GridDensity& p) {
  double v = 0.0;
  for (int a = 0; a < p.grid().dim(); ++a) v += density_variance(p, a);
  return v;
}

GridDensity coarsen(const GridDensity& p) {
  // Merge adjacent cell pairs; the merged value sits exactly on the coarse cell center.
  const Grid& g = p.grid();
  Grid cg;
  for (const auto& ax : g.axes) {
    const int np = ax.points / 2;
    cg.axes.push_back(Axis{ax.lo, ax.lo + np * 2 * ax.step(), np});
  }
  cg.validate();
  Eigen::ArrayXd vals(cg.size());
  if (g.dim() == 1) {
    for (int i = 0; i < cg.axes[0].points; ++i) vals[i] = 0.5 * (p.values()[2 * i] + p.values()[2 * i + 1]);
  } else {
    const int ny = g.axes[1].points;
    const int cny = cg.axes[1].points;
    for (int i = 0; i < cg.axes[0].points; ++i) {
      for (int j = 0; j < cny; ++j) {
        const Eigen::Index base = static_cast<Eigen::Index>(2 * i) * ny + 2 * j;
        vals[static_cast<Eigen::Index>(i) * cny + j] =
            0.25 * (p.values()[base] + p.values()[base + 1] + p.values()[base + ny] +
                    p.values()[base + ny + 1]);
      }
    }
  }
  return GridDensity(cg, std::move(vals), /*renormalize=*/true);
}

}  // namespace qepi
