#include "qepi/heat.hpp"

#include <fmt/format.h>

#include <cmath>

namespace qepi {

namespace {

struct AxisPlan {
  Axis out;
  bool lattice = true;
  // lattice path: taps at offsets -half..half, plus a crop back to the requested pad
  std::vector<double> taps;
  int half = 0;
  int crop = 0;
  // pairwise path: out.points x in.points, columns sum to h_in/h_out
  Eigen::MatrixXd weights;
};

AxisPlan plan_axis(const Axis& in, double t, const HeatOptions& opt) {
  if (opt.pad_factor < 4.0 || opt.truncation_sigmas < opt.pad_factor) {
    throw InvalidParameters(
        fmt::format("heat options need pad_factor >= 4 and truncation >= pad (got {}, {})",
                    opt.pad_factor, opt.truncation_sigmas));
  }
  AxisPlan plan;
  const double h = in.step();
  const double sigma = std::sqrt(t);
  const int half = static_cast<int>(std::ceil(opt.truncation_sigmas * sigma / h));
  const int pad = std::min(half, static_cast<int>(std::ceil(opt.pad_factor * sigma / h)));

  if (2 * half + 1 <= in.points) {
    if (in.points + 2 * half > kMaxAxisPointsBudget) {
      throw GridBudgetExceeded(fmt::format("evolution to t = {} needs {} lattice points", t,
                                           in.points + 2 * half));
    }
    plan.lattice = true;
    plan.half = half;
    plan.crop = half - pad;
    plan.out = in.extended(pad);
    plan.taps.resize(static_cast<std::size_t>(2 * half + 1));
    double sum = 0.0;
    for (int k = -half; k <= half; ++k) {
      const double u = k * h;
      const double w = std::exp(-0.5 * u * u / t);
      plan.taps[static_cast<std::size_t>(k + half)] = w;
      sum += w;
    }
    for (auto& w : plan.taps) w /= sum;
    return plan;
  }

  // Kernel wider than the data: evaluate the convolution pairwise onto a
  // coarser output lattice. Still >= 48 points per kernel sigma.
  plan.lattice = false;
  const double h_out = std::max(h, sigma / 48.0);
  const double pad_len = opt.pad_factor * sigma;
  const int n_out = static_cast<int>(std::ceil((in.hi - in.lo + 2.0 * pad_len) / h_out));
  if (n_out > kMaxAxisPointsBudget) {
    throw GridBudgetExceeded(fmt::format("evolution to t = {} needs {} output points", t, n_out));
  }
  plan.out = Axis{in.lo - pad_len, in.lo - pad_len + n_out * h_out, n_out};
  plan.weights.resize(n_out, in.points);
  for (int j = 0; j < in.points; ++j) {
    const double xj = in.coord(j);
    double sum = 0.0;
    for (int i = 0; i < n_out; ++i) {
      const double u = plan.out.coord(i) - xj;
      const double w = std::exp(-0.5 * u * u / t);
      plan.weights(i, j) = w;
      sum += w;
    }
    plan.weights.col(j) *= (h / h_out) / sum;  // unit output mass per input point
  }
  return plan;
}

// One axis of a (lines x points) column-major block; `lines` covers every
// payload packed per point (y-line entries, matrix elements, or 1).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> evolve_block(
    const Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>& in,
    const AxisPlan& plan) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (plan.lattice) {
    Mat full = Mat::Zero(in.rows(), in.cols() + 2 * plan.half);
    for (int k = -plan.half; k <= plan.half; ++k) {
      full.middleCols(plan.half + k, in.cols()) +=
          plan.taps[static_cast<std::size_t>(k + plan.half)] * in;
    }
    if (plan.crop > 0) return full.middleCols(plan.crop, full.cols() - 2 * plan.crop);
    return full;
  }
  return in * plan.weights.transpose();
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> evolve_rows(
    const Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>& in,
    const AxisPlan& plan, int payload) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (plan.lattice) {
    Mat full = Mat::Zero(in.rows() + 2 * plan.half * payload, in.cols());
    const int n = static_cast<int>(in.rows());
    for (int k = -plan.half; k <= plan.half; ++k) {
      full.middleRows((plan.half + k) * payload, n) +=
          plan.taps[static_cast<std::size_t>(k + plan.half)] * in;
    }
    if (plan.crop > 0)
      return full.middleRows(plan.crop * payload,
                             full.rows() - 2 * static_cast<Eigen::Index>(plan.crop) * payload);
    return full;
  }
  // payload-strided mix: out(iy') = sum_iy W(iy', iy) in(iy), entrywise in the payload
  const int n_in = static_cast<int>(in.rows()) / payload;
  Mat out = Mat::Zero(plan.out.points * static_cast<Eigen::Index>(payload), in.cols());
  for (int i = 0; i < plan.out.points; ++i) {
    for (int j = 0; j < n_in; ++j) {
      const double w = plan.weights(i, j);
      if (w == 0.0) continue;
      out.middleRows(static_cast<Eigen::Index>(i) * payload, payload) +=
          w * in.middleRows(static_cast<Eigen::Index>(j) * payload, payload);
    }
  }
  return out;
}

struct EvolvedAxisResult {
  GridDensity density;
  StateTable states;
  std::vector<std::uint8_t> flagged;
};

// Evolves density and states along `axis` of a 1D or 2D state.
EvolvedAxisResult evolve_state_axis(const GridDensity& density, const StateTable& states,
                                    int axis, double t, const HeatOptions& opt) {
  const Grid& g = density.grid();
  const AxisPlan plan = plan_axis(g.axes[static_cast<std::size_t>(axis)], t, opt);
  const int d = states.dim;
  const std::size_t dd = static_cast<std::size_t>(d) * d;
  const int nx = g.axes[0].points;
  const int ny = g.dim() == 2 ? g.axes[1].points : 1;

  // density * state payload per point
  std::vector<Complex> weighted(states.data.size());
  for (std::size_t i = 0; i < states.count; ++i) {
    const double p = density.values()[static_cast<Eigen::Index>(i)];
    for (std::size_t e = 0; e < dd; ++e) weighted[i * dd + e] = p * states.data[i * dd + e];
  }

  Eigen::MatrixXd pout;
  Eigen::MatrixXcd wout;
  if (axis == 0) {
    Eigen::Map<const Eigen::MatrixXd> pin(density.values().data(), ny, nx);
    Eigen::Map<const Eigen::MatrixXcd> win(weighted.data(), static_cast<Eigen::Index>(ny) * dd,
                                           nx);
    pout = evolve_block<double>(pin, plan);
    wout = evolve_block<Complex>(win, plan);
  } else {
    Eigen::Map<const Eigen::MatrixXd> pin(density.values().data(), ny, nx);
    Eigen::Map<const Eigen::MatrixXcd> win(weighted.data(), static_cast<Eigen::Index>(ny) * dd,
                                           nx);
    pout = evolve_rows<double>(pin, plan, 1);
    wout = evolve_rows<Complex>(win, plan, static_cast<int>(dd));
  }

  Grid out_grid = g;
  out_grid.axes[static_cast<std::size_t>(axis)] = plan.out;
  const std::size_t npts = out_grid.size();
  Eigen::ArrayXd vals(static_cast<Eigen::Index>(npts));
  StateTable table = StateTable::zeros(npts, d);
  std::vector<std::uint8_t> flagged(npts, 0);

  const int ony = out_grid.dim() == 2 ? out_grid.axes[1].points : 1;
  const int onx = out_grid.axes[0].points;
  for (int ix = 0; ix < onx; ++ix) {
    for (int iy = 0; iy < ony; ++iy) {
      const std::size_t idx = static_cast<std::size_t>(ix) * ony + iy;
      const double p = pout(iy, ix);
      vals[static_cast<Eigen::Index>(idx)] = p;
      auto st = table.at(idx);
      if (p < kZeroMass) {
        vals[static_cast<Eigen::Index>(idx)] = std::max(p, 0.0);
        st.setIdentity();
        st *= 1.0 / d;
        flagged[idx] = 1;
        continue;
      }
      Complex* dst = table.data.data() + idx * dd;
      // wout column ix holds ony*dd rows; entry (iy*dd + e, ix)
      const Complex* src = wout.col(ix).data() + static_cast<std::size_t>(iy) * dd;
      for (std::size_t e = 0; e < dd; ++e) dst[e] = src[e] / p;
    }
  }
  GridDensity dens(out_grid, std::move(vals));
  return {std::move(dens), std::move(table), std::move(flagged)};
}

}  // namespace

GridDensity heat_evolve_density(const GridDensity& p, double t, const HeatOptions& opt) {
  if (t < 0.0) throw InvalidParameters(fmt::format("negative heat time {}", t));
  if (t == 0.0) return p;
  const Grid& g = p.grid();
  GridDensity cur = p;
  for (int axis = 0; axis < g.dim(); ++axis) {
    const Grid& cg = cur.grid();
    const AxisPlan plan = plan_axis(cg.axes[static_cast<std::size_t>(axis)], t, opt);
    const int nx = cg.axes[0].points;
    const int ny = cg.dim() == 2 ? cg.axes[1].points : 1;
    Eigen::Map<const Eigen::MatrixXd> pin(cur.values().data(), ny, nx);
    Eigen::MatrixXd pout =
        (axis == 0) ? evolve_block<double>(pin, plan) : evolve_rows<double>(pin, plan, 1);
    Grid out_grid = cg;
    out_grid.axes[static_cast<std::size_t>(axis)] = plan.out;
    Eigen::ArrayXd vals(static_cast<Eigen::Index>(out_grid.size()));
    const int onx = out_grid.axes[0].points;
    const int ony = out_grid.dim() == 2 ? out_grid.axes[1].points : 1;
    for (int ix = 0; ix < onx; ++ix)
      for (int iy = 0; iy < ony; ++iy)
        vals[static_cast<Eigen::Index>(ix) * ony + iy] = std::max(pout(iy, ix), 0.0);
    cur = GridDensity(out_grid, std::move(vals));
  }
  return cur;
}

CQState heat_evolve_cq(const CQState& s, double t, const HeatOptions& opt) {
  if (t < 0.0) throw InvalidParameters(fmt::format("negative heat time {}", t));
  if (t == 0.0) return s;
  CQState cur = s;
  for (int axis = 0; axis < s.density.grid().dim(); ++axis) {
    auto ev = evolve_state_axis(cur.density, cur.states, axis, t, opt);
    cur = CQState{std::move(ev.density), std::move(ev.states), cur.block_dims,
                  std::move(ev.flagged)};
  }
  return cur;
}

CCQState heat_evolve_ccq_x(const CCQState& s, double t, const HeatOptions& opt) {
  if (t < 0.0) throw InvalidParameters(fmt::format("negative heat time {}", t));
  if (t == 0.0) return s;
  auto ev = evolve_state_axis(s.joint, s.states, 0, t, opt);
  return CCQState{std::move(ev.density), std::move(ev.states), s.block_dims,
                  std::move(ev.flagged)};
}

CCQState heat_evolve_ccq_y(const CCQState& s, double t, const HeatOptions& opt) {
  if (t < 0.0) throw InvalidParameters(fmt::format("negative heat time {}", t));
  if (t == 0.0) return s;
  auto ev = evolve_state_axis(s.joint, s.states, 1, t, opt);
  return CCQState{std::move(ev.density), std::move(ev.states), s.block_dims,
                  std::move(ev.flagged)};
}

}  // namespace qepi
