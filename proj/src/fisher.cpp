#include "qepi/fisher.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace qepi {

namespace {

void check_schedule(const std::vector<double>& schedule) {
  if (schedule.size() < 2) {
    throw InvalidParameters("t schedule needs at least 2 entries");
  }
  for (std::size_t k = 0; k + 1 < schedule.size(); ++k) {
    if (!(schedule[k] > schedule[k + 1]) || !(schedule.back() > 0.0)) {
      throw InvalidParameters("t schedule must be strictly decreasing and positive");
    }
  }
}

FisherEstimate finish_estimate(FisherMethod method, std::vector<double> schedule,
                               std::vector<double> ratios) {
  const std::size_t n = ratios.size();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    // concavity of t -> I(t) with I(0) = 0 makes I(t)/t nonincreasing in t
    const double bar = 1e-6 / schedule[k + 1] + 1e-6 * std::abs(ratios[k]) + 1e-12;
    if (ratios[k + 1] < ratios[k] - bar) {
      throw ScheduleTooCoarse(
          fmt::format("J-hat({:.3e}) = {:.6e} fell below J-hat({:.3e}) = {:.6e}; "
                      "the grid does not resolve the entropy flow at this scale",
                      schedule[k + 1], ratios[k + 1], schedule[k], ratios[k]));
    }
  }
  const double t1 = schedule[n - 1];
  const double t2 = schedule[n - 2];
  const double j1 = ratios[n - 1];
  const double j2 = ratios[n - 2];
  FisherEstimate est;
  est.method = method;
  est.value = j1 + (j1 - j2) * t1 / (t2 - t1);
  est.extrapolated = true;
  est.error_estimate = std::abs(est.value - j1) + 1e-10 / t1;
  if (est.value < -est.error_estimate) est.error_estimate = std::abs(est.value);
  est.t_schedule = std::move(schedule);
  est.ratios = std::move(ratios);
  return est;
}

}  // namespace

std::vector<double> default_t_schedule(const CQState& s) {
  double h_max = 0.0;
  for (const auto& ax : s.density.grid().axes) h_max = std::max(h_max, ax.step());
  // below sqrt(t) ~ 1.25 h the lattice-sampled kernel's variance is off by
  // percents (aliasing), which poisons the ratios; floor the schedule there
  const double floor_t = std::max(1e-4, 1.5625 * h_max * h_max);
  const double base = std::max(2.5e-3 * total_variance(s.density), floor_t);
  return {4.0 * base, 2.0 * base, base};
}

NoiseBundle make_shift_bundle(const CQState& s, const std::vector<int>& cell_offsets,
                              const std::vector<double>& weights, double z_step, double t) {
  if (s.density.grid().dim() != 1) {
    throw InvalidParameters("noise bundles support n = 1 (the (X', Z) joint is 2n-dimensional)");
  }
  if (cell_offsets.size() != weights.size() || weights.empty()) {
    throw InvalidParameters("shift bundle: offsets and weights must match and be nonempty");
  }
  const Axis ax = s.density.grid().axes[0];
  const int gz = static_cast<int>(weights.size());
  int pad = 0;
  for (int o : cell_offsets) pad = std::max(pad, std::abs(o));
  if (ax.points + 2 * pad > kMaxAxisPointsBudget) {
    throw GridBudgetExceeded(fmt::format("noise bundle at t = {} needs {} points", t,
                                         ax.points + 2 * pad));
  }
  const Axis axp = ax.extended(pad);
  const Axis az{-0.5 * gz * z_step, 0.5 * gz * z_step, gz};

  const int d = s.dim();
  const std::size_t dd = static_cast<std::size_t>(d) * d;
  const std::size_t npts = static_cast<std::size_t>(axp.points) * gz;
  Eigen::ArrayXd vals(static_cast<Eigen::Index>(npts));
  StateTable table = StateTable::zeros(npts, d);
  std::vector<std::uint8_t> flagged(npts, 0);

  for (int i = 0; i < axp.points; ++i) {
    for (int k = 0; k < gz; ++k) {
      const std::size_t idx = static_cast<std::size_t>(i) * gz + k;
      const int src = i - pad - cell_offsets[static_cast<std::size_t>(k)];
      double p = 0.0;
      if (src >= 0 && src < ax.points) p = s.density.values()[src];
      const bool src_flagged = src >= 0 && src < ax.points && !s.flagged.empty() &&
                               s.flagged[static_cast<std::size_t>(src)];
      if (p < kZeroMass || src_flagged) {
        vals[static_cast<Eigen::Index>(idx)] = 0.0;
        auto st = table.at(idx);
        st.setIdentity();
        st *= 1.0 / d;
        flagged[idx] = 1;
        continue;
      }
      vals[static_cast<Eigen::Index>(idx)] = p * weights[static_cast<std::size_t>(k)] / z_step;
      const Complex* from = s.states.data.data() + static_cast<std::size_t>(src) * dd;
      Complex* dst = table.data.data() + idx * dd;
      std::copy(from, from + dd, dst);
    }
  }
  GridDensity joint(Grid(axp, az), std::move(vals));
  CCQState state{std::move(joint), std::move(table), s.block_dims, std::move(flagged)};
  return NoiseBundle{std::move(state), t};
}

NoiseBundle make_noise_bundle(const CQState& s, double t) {
  if (s.density.grid().dim() != 1) {
    throw InvalidParameters("noise bundles support n = 1 (the (X', Z) joint is 2n-dimensional)");
  }
  if (t < 0.0) throw InvalidParameters(fmt::format("negative time {}", t));
  const double h = s.density.grid().axes[0].step();

  int m = 0;
  double hz = 0.5;
  int z_half = 16;
  if (t > 0.0) {
    const double rt = std::sqrt(t);
    m = std::max(1, static_cast<int>(std::lround(0.35 * rt / h)));
    hz = m * h / rt;
    z_half = std::max(8, static_cast<int>(std::ceil(8.0 / hz)));
  }
  const int gz = 2 * z_half + 1;
  std::vector<int> offsets(static_cast<std::size_t>(gz));
  std::vector<double> w(static_cast<std::size_t>(gz));
  double wsum = 0.0;
  for (int k = 0; k < gz; ++k) {
    const double z = (k - z_half) * hz;
    offsets[static_cast<std::size_t>(k)] = m * (k - z_half);
    w[static_cast<std::size_t>(k)] = std::exp(-0.5 * z * z);
    wsum += w[static_cast<std::size_t>(k)];
  }
  for (auto& v : w) v /= wsum;
  return make_shift_bundle(s, offsets, w, hz, t);
}

FisherEstimate fisher_mi_ratio(const CQState& s, std::vector<double> schedule) {
  if (schedule.empty()) schedule = default_t_schedule(s);
  check_schedule(schedule);
  std::vector<double> ratios;
  ratios.reserve(schedule.size());
  for (double t : schedule) {
    const double mi = cmi_with_noise(make_noise_bundle(s, t));
    ratios.push_back(mi / t);
  }
  return finish_estimate(FisherMethod::mi_ratio, std::move(schedule), std::move(ratios));
}

FisherEstimate fisher_debruijn(const CQState& s, std::vector<double> schedule) {
  if (schedule.empty()) schedule = default_t_schedule(s);
  check_schedule(schedule);
  const double s0 = entropy_x_given_m(s);
  std::vector<double> ratios;
  ratios.reserve(schedule.size());
  for (double t : schedule) {
    const double st = entropy_x_given_m(heat_evolve_cq(s, t));
    ratios.push_back((st - s0) / t);
  }
  return finish_estimate(FisherMethod::entropy_derivative, std::move(schedule), std::move(ratios));
}

FisherEstimate fisher_at_time(const CQState& s, double t, std::vector<double> schedule) {
  if (t < 0.0) throw InvalidParameters(fmt::format("negative time {}", t));
  if (t == 0.0) return fisher_debruijn(s, std::move(schedule));
  const CQState evolved = heat_evolve_cq(s, t);
  return fisher_debruijn(evolved, std::move(schedule));
}

Eigen::MatrixXd fisher_matrix_classical(const GridDensity& p) {
  const Grid& g = p.grid();
  const int n = g.dim();
  const double threshold = 1e-12 * p.values().maxCoeff();
  const double cell = g.cell();
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);

  const int nx = g.axes[0].points;
  const int ny = n == 2 ? g.axes[1].points : 1;
  auto value = [&](int ix, int iy) {
    return p.values()[static_cast<Eigen::Index>(ix) * ny + iy];
  };

  for (int ix = 0; ix < nx; ++ix) {
    for (int iy = 0; iy < ny; ++iy) {
      const double pv = value(ix, iy);
      if (pv <= threshold) continue;
      Eigen::VectorXd grad(n);
      bool ok = true;
      for (int a = 0; a < n && ok; ++a) {
        const int di = a == 0 ? 1 : 0;
        const int dj = a == 1 ? 1 : 0;
        if (ix + di >= nx || ix - di < 0 || iy + dj >= ny || iy - dj < 0) {
          ok = false;
          break;
        }
        const double fwd = value(ix + di, iy + dj);
        const double bwd = value(ix - di, iy - dj);
        if (fwd <= threshold || bwd <= threshold) {
          ok = false;
          break;
        }
        grad[a] = (std::log(fwd) - std::log(bwd)) / (2.0 * g.axes[static_cast<std::size_t>(a)].step());
      }
      if (!ok) continue;
      j += (pv * cell) * (grad * grad.transpose());
    }
  }
  return j;
}

}  // namespace qepi
