#include "qepi/cq_state.hpp"

#include <fmt/format.h>

#include <cmath>
#include <optional>

namespace qepi {

namespace {

double trace_norm(const Eigen::Ref<const ComplexMatrix>& m) {
  std::vector<double> evs;
  evs.reserve(static_cast<std::size_t>(m.rows()));
  hermitian_eigenvalues(m, evs);
  double s = 0.0;
  for (double e : evs) s += std::abs(e);
  return s;
}

void check_state_entry(const Eigen::Ref<const ComplexMatrix>& m, std::size_t idx) {
  const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTol) {
    throw NotHermitian(
        fmt::format("state at point {}: max |A - A^dag| = {:.3e}", idx, herm));
  }
  const double tr = m.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) {
    throw TraceNotOne(fmt::format("state at point {}: |Tr - 1| = {:.3e}", idx, std::abs(tr - 1.0)));
  }
}

// Block partition of kron(a, b) that the standard layout keeps contiguous.
std::vector<int> kron_block_dims(const std::vector<int>& bx, int dx, const std::vector<int>& by,
                                 int dy) {
  if (static_cast<int>(bx.size()) == dx && static_cast<int>(by.size()) == dy) {
    return std::vector<int>(static_cast<std::size_t>(dx) * dy, 1);  // both diagonal
  }
  std::vector<int> out;
  out.reserve(bx.size());
  for (int a : bx) out.push_back(a * dy);
  return out;
}

void set_maximally_mixed(Eigen::Map<ComplexMatrix> m) {
  m.setZero();
  const double v = 1.0 / static_cast<double>(m.rows());
  for (Eigen::Index k = 0; k < m.rows(); ++k) m(k, k) = v;
}

}  // namespace

StateTable StateTable::zeros(std::size_t count, int dim) {
  StateTable t;
  t.dim = dim;
  t.count = count;
  t.data.assign(count * static_cast<std::size_t>(dim) * dim, Complex(0, 0));
  return t;
}

StateTable StateTable::filled(std::size_t count, const ComplexMatrix& m) {
  StateTable t = zeros(count, static_cast<int>(m.rows()));
  for (std::size_t i = 0; i < count; ++i) t.at(i) = m;
  return t;
}

BlockStructure StructuredCIState::structure() const {
  BlockStructure s;
  for (const auto& b : blocks) {
    s.blocks.push_back({family_dim(b.map_x), family_dim(b.map_y)});
  }
  return s;
}

int StructuredCIState::total_dim() const { return structure().total_dim(); }

StateTable state_map(const StateFamily& family, const Axis& axis) {
  validate_family(family);
  const int d = family_dim(family);
  StateTable table = StateTable::zeros(static_cast<std::size_t>(axis.points), d);
  for (int i = 0; i < axis.points; ++i) {
    table.at(static_cast<std::size_t>(i)) = family_eval(family, axis.coord(i));
    check_state_entry(table.at(static_cast<std::size_t>(i)), static_cast<std::size_t>(i));
  }
  const double bound = family_lipschitz(family) * axis.step() * (1.0 + 1e-6) + 1e-12;
  for (int i = 0; i + 1 < axis.points; ++i) {
    const double dist = trace_norm(table.at(static_cast<std::size_t>(i + 1)) -
                                   table.at(static_cast<std::size_t>(i)));
    if (dist > bound) {
      throw InvalidParameters(
          fmt::format("state map jumps {:.3e} in trace norm between points {} and {} "
                      "(continuity bound {:.3e})",
                      dist, i, i + 1, bound));
    }
  }
  return table;
}

CQState make_cq(GridDensity density, const StateFamily& family) {
  if (density.grid().dim() != 1) {
    throw InvalidParameters("make_cq from a family expects a 1D density");
  }
  const Axis axis = density.grid().axes[0];
  StateTable table = state_map(family, axis);
  return CQState{std::move(density), std::move(table), family_block_dims(family), {}};
}

CQState trivial_cq(GridDensity density) {
  const std::size_t n = density.grid().size();
  ComplexMatrix one = ComplexMatrix::Identity(1, 1);
  return CQState{std::move(density), StateTable::filled(n, one), {1}, {}};
}

CCQState make_ccq(GridDensity joint, const std::function<ComplexMatrix(double, double)>& map,
                  std::vector<int> block_dims) {
  if (joint.grid().dim() != 2) throw InvalidParameters("make_ccq expects a 2D joint density");
  const Axis ax = joint.grid().axes[0];
  const Axis ay = joint.grid().axes[1];
  ComplexMatrix first = map(ax.coord(0), ay.coord(0));
  const int d = static_cast<int>(first.rows());
  StateTable table = StateTable::zeros(joint.grid().size(), d);
  for (int i = 0; i < ax.points; ++i) {
    for (int j = 0; j < ay.points; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * ay.points + j;
      table.at(idx) = map(ax.coord(i), ay.coord(j));
      check_state_entry(table.at(idx), idx);
    }
  }
  if (block_dims.empty()) block_dims = {d};
  return CCQState{std::move(joint), std::move(table), std::move(block_dims), {}};
}

CCQState make_product_ccq(const CQState& x, const CQState& y) {
  if (x.density.grid().dim() != 1 || y.density.grid().dim() != 1) {
    throw InvalidParameters("make_product_ccq expects 1D factors");
  }
  const Axis ax = x.density.grid().axes[0];
  const Axis ay = y.density.grid().axes[0];
  const int dx = x.dim(), dy = y.dim();
  const int d = dx * dy;

  Eigen::ArrayXd vals(static_cast<Eigen::Index>(ax.points) * ay.points);
  StateTable table = StateTable::zeros(static_cast<std::size_t>(ax.points) * ay.points, d);
  for (int i = 0; i < ax.points; ++i) {
    const auto rx = x.states.at(static_cast<std::size_t>(i));
    for (int j = 0; j < ay.points; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * ay.points + j;
      vals[static_cast<Eigen::Index>(idx)] = x.density.values()[i] * y.density.values()[j];
      const auto ry = y.states.at(static_cast<std::size_t>(j));
      auto out = table.at(idx);
      for (int a = 0; a < dx; ++a)
        for (int b = 0; b < dx; ++b) out.block(a * dy, b * dy, dy, dy) = rx(a, b) * ry;
    }
  }
  GridDensity joint(Grid(ax, ay), std::move(vals));
  return CCQState{std::move(joint), std::move(table),
                  kron_block_dims(x.block_dims, dx, y.block_dims, dy), {}};
}

CCQState realize(const StructuredCIState& s, const Axis& grid_x, const Axis& grid_y) {
  if (s.blocks.empty()) throw InvalidParameters("structured state needs at least one block");
  double wsum = 0.0;
  for (const auto& b : s.blocks) wsum += b.weight;
  if (std::abs(wsum - 1.0) > 1e-12) {
    throw InvalidParameters(fmt::format("block weights sum to {} (must be 1)", wsum));
  }
  const int nb = static_cast<int>(s.blocks.size());
  std::vector<StateTable> maps_x, maps_y;
  std::vector<int> dims_x, dims_y, offsets;
  int d = 0;
  for (const auto& b : s.blocks) {
    if (b.density_x.grid().axes[0] != grid_x || b.density_y.grid().axes[0] != grid_y) {
      throw DimensionMismatch("block densities must live on the realize grids");
    }
    maps_x.push_back(state_map(b.map_x, grid_x));
    maps_y.push_back(state_map(b.map_y, grid_y));
    dims_x.push_back(family_dim(b.map_x));
    dims_y.push_back(family_dim(b.map_y));
    offsets.push_back(d);
    d += dims_x.back() * dims_y.back();
  }

  const std::size_t npts = static_cast<std::size_t>(grid_x.points) * grid_y.points;
  Eigen::ArrayXd vals(static_cast<Eigen::Index>(npts));
  StateTable table = StateTable::zeros(npts, d);
  std::vector<std::uint8_t> flagged(npts, 0);

  for (int i = 0; i < grid_x.points; ++i) {
    for (int j = 0; j < grid_y.points; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * grid_y.points + j;
      double p = 0.0;
      for (int b = 0; b < nb; ++b) {
        p += s.blocks[b].weight * s.blocks[b].density_x.values()[i] *
             s.blocks[b].density_y.values()[j];
      }
      vals[static_cast<Eigen::Index>(idx)] = p;
      auto out = table.at(idx);
      if (p < kZeroMass) {
        set_maximally_mixed(out);
        flagged[idx] = 1;
        vals[static_cast<Eigen::Index>(idx)] = 0.0;
        continue;
      }
      for (int b = 0; b < nb; ++b) {
        const double w = s.blocks[b].weight * s.blocks[b].density_x.values()[i] *
                         s.blocks[b].density_y.values()[j] / p;
        if (w == 0.0) continue;
        const auto rx = maps_x[b].at(static_cast<std::size_t>(i));
        const auto ry = maps_y[b].at(static_cast<std::size_t>(j));
        const int dx = dims_x[b], dy = dims_y[b];
        for (int a = 0; a < dx; ++a)
          for (int c = 0; c < dx; ++c)
            out.block(offsets[b] + a * dy, offsets[b] + c * dy, dy, dy) = (w * rx(a, c)) * ry;
      }
    }
  }

  std::vector<int> block_dims;
  for (int b = 0; b < nb; ++b) block_dims.push_back(dims_x[b] * dims_y[b]);
  GridDensity joint(Grid(grid_x, grid_y), std::move(vals));
  return CCQState{std::move(joint), std::move(table), std::move(block_dims), std::move(flagged)};
}

namespace {

CQState marginal_axis(const CCQState& s, int axis) {
  const Axis ax = s.axis_x();
  const Axis ay = s.axis_y();
  const int d = s.dim();
  const std::size_t dd = static_cast<std::size_t>(d) * d;
  const int nk = (axis == 0) ? ax.points : ay.points;   // kept axis
  const int ni = (axis == 0) ? ay.points : ax.points;   // integrated axis
  const double hi = (axis == 0) ? ay.step() : ax.step();

  Eigen::ArrayXd vals = Eigen::ArrayXd::Zero(nk);
  StateTable table = StateTable::zeros(static_cast<std::size_t>(nk), d);
  std::vector<std::uint8_t> flagged(static_cast<std::size_t>(nk), 0);

  for (int k = 0; k < nk; ++k) {
    auto acc = table.at(static_cast<std::size_t>(k));
    double pk = 0.0;
    for (int i = 0; i < ni; ++i) {
      const std::size_t idx = (axis == 0)
                                  ? static_cast<std::size_t>(k) * ay.points + i
                                  : static_cast<std::size_t>(i) * ay.points + k;
      const double p = s.joint.values()[static_cast<Eigen::Index>(idx)];
      if (p == 0.0) continue;
      pk += p;
      const Complex* src = s.states.data.data() + idx * dd;
      Complex* dst = table.data.data() + static_cast<std::size_t>(k) * dd;
      for (std::size_t e = 0; e < dd; ++e) dst[e] += p * src[e];
    }
    vals[k] = pk * hi;
    if (vals[k] < kZeroMass) {
      vals[k] = 0.0;
      set_maximally_mixed(acc);
      flagged[static_cast<std::size_t>(k)] = 1;
    } else {
      acc /= pk;
    }
  }
  GridDensity density(Grid(axis == 0 ? ax : ay), std::move(vals));
  return CQState{std::move(density), std::move(table), s.block_dims, std::move(flagged)};
}

CCQState resample_y_to_step(const CCQState& s, double new_step) {
  const Axis ax = s.axis_x();
  const Axis ay = s.axis_y();
  const int d = s.dim();
  const std::size_t dd = static_cast<std::size_t>(d) * d;
  const int ny = std::max(kMinAxisPoints, static_cast<int>(std::ceil((ay.hi - ay.lo) / new_step)));
  const Axis ny_axis{ay.lo, ay.lo + ny * new_step, ny};

  Eigen::ArrayXd vals(static_cast<Eigen::Index>(ax.points) * ny);
  StateTable table = StateTable::zeros(static_cast<std::size_t>(ax.points) * ny, d);
  std::vector<std::uint8_t> flagged(table.count, 0);

  for (int i = 0; i < ax.points; ++i) {
    for (int j = 0; j < ny; ++j) {
      const double y = ny_axis.coord(j);
      double u = (y - ay.lo) / ay.step() - 0.5;
      u = std::min(std::max(u, 0.0), static_cast<double>(ay.points - 1));
      const int j0 = std::min(static_cast<int>(u), ay.points - 2);
      const double w = u - j0;
      const std::size_t a = static_cast<std::size_t>(i) * ay.points + j0;
      const std::size_t b = a + 1;
      const double pa = s.joint.values()[static_cast<Eigen::Index>(a)];
      const double pb = s.joint.values()[static_cast<Eigen::Index>(b)];
      const double p = (1.0 - w) * pa + w * pb;
      const std::size_t idx = static_cast<std::size_t>(i) * ny + j;
      vals[static_cast<Eigen::Index>(idx)] = p;
      auto out = table.at(idx);
      if (p < kZeroMass) {
        vals[static_cast<Eigen::Index>(idx)] = 0.0;
        set_maximally_mixed(out);
        flagged[idx] = 1;
        continue;
      }
      const Complex* sa = s.states.data.data() + a * dd;
      const Complex* sb = s.states.data.data() + b * dd;
      Complex* dst = table.data.data() + idx * dd;
      const double wa = (1.0 - w) * pa / p;
      const double wb = w * pb / p;
      for (std::size_t e = 0; e < dd; ++e) dst[e] = wa * sa[e] + wb * sb[e];
    }
  }
  GridDensity joint(Grid(ax, ny_axis), std::move(vals), /*renormalize=*/true);
  return CCQState{std::move(joint), std::move(table), s.block_dims, std::move(flagged)};
}

}  // namespace

CQState marginal_x(const CCQState& s) { return marginal_axis(s, 0); }
CQState marginal_y(const CCQState& s) { return marginal_axis(s, 1); }

CQState sum_pushforward(const CCQState& s) {
  const CCQState* src = &s;
  std::optional<CCQState> resampled;
  const double hx = s.axis_x().step();
  if (std::abs(s.axis_y().step() - hx) > 1e-12 * hx) {
    resampled = resample_y_to_step(s, hx);
    src = &*resampled;
  }
  const Axis ax = src->axis_x();
  const Axis ay = src->axis_y();
  const double h = ax.step();
  const int d = src->dim();
  const std::size_t dd = static_cast<std::size_t>(d) * d;

  const int ns = ax.points + ay.points - 1;
  const Axis as{ax.lo + ay.lo + 0.5 * h, ax.lo + ay.lo + 0.5 * h + ns * h, ns};

  Eigen::ArrayXd vals = Eigen::ArrayXd::Zero(ns);
  StateTable table = StateTable::zeros(static_cast<std::size_t>(ns), d);
  std::vector<std::uint8_t> flagged(static_cast<std::size_t>(ns), 0);

  for (int i = 0; i < ax.points; ++i) {
    for (int j = 0; j < ay.points; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * ay.points + j;
      const double p = src->joint.values()[static_cast<Eigen::Index>(idx)];
      if (p == 0.0) continue;
      const int k = i + j;
      vals[k] += p;
      const Complex* from = src->states.data.data() + idx * dd;
      Complex* dst = table.data.data() + static_cast<std::size_t>(k) * dd;
      for (std::size_t e = 0; e < dd; ++e) dst[e] += p * from[e];
    }
  }
  for (int k = 0; k < ns; ++k) {
    auto out = table.at(static_cast<std::size_t>(k));
    if (vals[k] < kZeroMass) {
      vals[k] = 0.0;
      set_maximally_mixed(out);
      flagged[static_cast<std::size_t>(k)] = 1;
    } else {
      out /= vals[k];
      vals[k] *= h;
    }
  }
  GridDensity density(Grid(as), std::move(vals));
  return CQState{std::move(density), std::move(table), src->block_dims, std::move(flagged)};
}

namespace {

DensityMatrix average_impl(const GridDensity& density, const StateTable& states) {
  const int d = states.dim;
  const std::size_t dd = static_cast<std::size_t>(d) * d;
  const double cell = density.grid().cell();
  std::vector<Complex> acc(dd, Complex(0, 0));
  for (std::size_t i = 0; i < states.count; ++i) {
    const double w = density.values()[static_cast<Eigen::Index>(i)] * cell;
    if (w == 0.0) continue;
    const Complex* src = states.data.data() + i * dd;
    for (std::size_t e = 0; e < dd; ++e) acc[e] += w * src[e];
  }
  Eigen::Map<const ComplexMatrix> m(acc.data(), d, d);
  return DensityMatrix::validated(m);
}

}  // namespace

DensityMatrix average_state(const CQState& s) { return average_impl(s.density, s.states); }
DensityMatrix average_state(const CCQState& s) { return average_impl(s.joint, s.states); }

CQState embed_classical(const Eigen::MatrixXd& q, const GridDensity& p) {
  if (p.grid().dim() != 1) throw InvalidParameters("embed_classical expects a 1D density");
  const Axis axis = p.grid().axes[0];
  if (q.cols() != axis.points) {
    throw NotAProbabilityTable(
        fmt::format("table has {} columns for a {}-point grid", q.cols(), axis.points));
  }
  DiagonalTableFamily fam{q, axis};
  validate_family(StateFamily{fam});
  const int d = static_cast<int>(q.rows());
  StateTable table = StateTable::zeros(static_cast<std::size_t>(axis.points), d);
  for (int i = 0; i < axis.points; ++i) {
    table.at(static_cast<std::size_t>(i)) = q.col(i).cast<Complex>().asDiagonal();
  }
  return CQState{p, std::move(table), std::vector<int>(static_cast<std::size_t>(d), 1), {}};
}

CQState coarsen(const CQState& s) {
  if (s.density.grid().dim() != 1) throw InvalidParameters("coarsen: expected 1D state");
  GridDensity cd = coarsen(s.density);
  const int d = s.dim();
  const std::size_t dd = static_cast<std::size_t>(d) * d;
  const int n = cd.grid().axes[0].points;
  StateTable table = StateTable::zeros(static_cast<std::size_t>(n), d);
  std::vector<std::uint8_t> flagged(static_cast<std::size_t>(n), 0);
  for (int k = 0; k < n; ++k) {
    const double pa = s.density.values()[2 * k];
    const double pb = s.density.values()[2 * k + 1];
    auto out = table.at(static_cast<std::size_t>(k));
    if (pa + pb < kZeroMass) {
      set_maximally_mixed(out);
      flagged[static_cast<std::size_t>(k)] = 1;
      continue;
    }
    const Complex* sa = s.states.data.data() + static_cast<std::size_t>(2 * k) * dd;
    const Complex* sb = s.states.data.data() + static_cast<std::size_t>(2 * k + 1) * dd;
    Complex* dst = table.data.data() + static_cast<std::size_t>(k) * dd;
    const double wa = pa / (pa + pb), wb = pb / (pa + pb);
    for (std::size_t e = 0; e < dd; ++e) dst[e] = wa * sa[e] + wb * sb[e];
  }
  return CQState{std::move(cd), std::move(table), s.block_dims, std::move(flagged)};
}

CCQState coarsen(const CCQState& s) {
  GridDensity cd = coarsen(s.joint);
  const int d = s.dim();
  const std::size_t dd = static_cast<std::size_t>(d) * d;
  const int nx = cd.grid().axes[0].points;
  const int ny = cd.grid().axes[1].points;
  const int fy = s.axis_y().points;
  StateTable table = StateTable::zeros(static_cast<std::size_t>(nx) * ny, d);
  std::vector<std::uint8_t> flagged(table.count, 0);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const std::size_t fine[4] = {
          static_cast<std::size_t>(2 * i) * fy + 2 * j,
          static_cast<std::size_t>(2 * i) * fy + 2 * j + 1,
          static_cast<std::size_t>(2 * i + 1) * fy + 2 * j,
          static_cast<std::size_t>(2 * i + 1) * fy + 2 * j + 1,
      };
      const std::size_t idx = static_cast<std::size_t>(i) * ny + j;
      double psum = 0.0;
      for (std::size_t f : fine) psum += s.joint.values()[static_cast<Eigen::Index>(f)];
      auto out = table.at(idx);
      if (psum < kZeroMass) {
        set_maximally_mixed(out);
        flagged[idx] = 1;
        continue;
      }
      Complex* dst = table.data.data() + idx * dd;
      for (std::size_t f : fine) {
        const double w = s.joint.values()[static_cast<Eigen::Index>(f)] / psum;
        if (w == 0.0) continue;
        const Complex* src = s.states.data.data() + f * dd;
        for (std::size_t e = 0; e < dd; ++e) dst[e] += w * src[e];
      }
    }
  }
  return CCQState{std::move(cd), std::move(table), s.block_dims, std::move(flagged)};
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

namespace {

double uniform_in(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

StateFamily random_factor_map(std::mt19937_64& rng) {
  if (uniform01(rng) < 0.35) {
    ComplexMatrix one = ComplexMatrix::Identity(1, 1);
    return ConstantFamily{DensityMatrix::trusted(one)};
  }
  QubitBlochFamily f;
  f.alpha = uniform_in(rng, 0.5, 2.0);
  f.beta = uniform_in(rng, 0.3, 2.0);
  f.gamma = uniform_in(rng, -0.6, 0.6);
  f.mu = uniform_in(rng, 0.1, 0.6);
  return f;
}

GridDensity random_block_density(std::mt19937_64& rng, const Axis& axis) {
  return gaussian_density(uniform_in(rng, -1.5, 1.5), uniform_in(rng, 0.5, 2.0), axis);
}

}  // namespace

StructuredCIState random_structured_state(std::mt19937_64& rng, const Axis& grid_x,
                                          const Axis& grid_y) {
  const int n_blocks = (uniform01(rng) < 0.5) ? 1 : 2;
  std::vector<double> w(static_cast<std::size_t>(n_blocks));
  double wsum = 0.0;
  for (auto& v : w) {
    v = 0.2 + 0.8 * uniform01(rng);
    wsum += v;
  }
  StructuredCIState s;
  for (int b = 0; b < n_blocks; ++b) {
    StructuredBlock blk{w[static_cast<std::size_t>(b)] / wsum,
                        random_block_density(rng, grid_x), random_block_density(rng, grid_y),
                        random_factor_map(rng), random_factor_map(rng)};
    s.blocks.push_back(std::move(blk));
  }
  return s;
}

}  // namespace qepi
