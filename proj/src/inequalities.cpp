#include "qepi/inequalities.hpp"

#include <fmt/format.h>

#include <cmath>
#include <optional>

#include "qepi/heat.hpp"

namespace qepi {

namespace {

constexpr double kTwoPiE = 17.0794684453471341;  // 2*pi*e

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

nlohmann::json grid_json(const Grid& g) {
  nlohmann::json axes = nlohmann::json::array();
  for (const auto& a : g.axes) {
    axes.push_back({{"lo", a.lo}, {"hi", a.hi}, {"points", a.points}});
  }
  return {{"axes", axes}};
}

void warn_large_entropy(InequalityReport& r, std::initializer_list<std::pair<const char*, double>> vals) {
  for (const auto& [name, v] : vals) {
    if (std::abs(v) > 50.0) {
      r.notes.push_back(fmt::format("{} = {:.3f} nats looks non-finite", name, v));
    }
  }
}

std::pair<int, int> rationalize(double lambda) {
  for (int q = 1; q <= 64; ++q) {
    const double pq = lambda * q;
    const double p = std::lround(pq);
    if (std::abs(pq - p) < 1e-9) return {static_cast<int>(p), q};
  }
  throw InvalidParameters(
      fmt::format("lambda = {} is not a rational p/q with q <= 64; the chain check "
                  "needs exact lattice shears",
                  lambda));
}

struct DualFisher {
  FisherEstimate mi;
  FisherEstimate db;
  double value = 0.0;
  double bar = 0.0;
  double agreement_rel = 0.0;

  nlohmann::json to_json() const {
    return {{"value", value},
            {"error_bar", bar},
            {"mi_ratio", mi.value},
            {"entropy_derivative", db.value},
            {"agreement_rel", agreement_rel}};
  }
};

DualFisher dual_fisher(const CQState& s) {
  DualFisher f;
  f.mi = fisher_mi_ratio(s);
  f.db = fisher_debruijn(s);
  f.value = f.mi.value;
  const double spread = std::abs(f.mi.value - f.db.value);
  f.bar = f.mi.error_estimate + spread;
  f.agreement_rel = spread / std::max({std::abs(f.mi.value), std::abs(f.db.value), 1e-12});
  return f;
}

// p1(u,v) = sum_k w_k p(u - offx_k, v - offy_k), states mixed accordingly.
CCQState shift_mix_joint(const CCQState& s, const std::vector<int>& offx,
                         const std::vector<int>& offy, const std::vector<double>& w) {
  const Axis ax = s.axis_x();
  const Axis ay = s.axis_y();
  int padx = 0, pady = 0;
  for (int o : offx) padx = std::max(padx, std::abs(o));
  for (int o : offy) pady = std::max(pady, std::abs(o));
  const Axis axp = ax.extended(padx);
  const Axis ayp = ay.extended(pady);
  const int d = s.dim();
  const std::size_t dd = static_cast<std::size_t>(d) * d;

  const std::size_t npts = static_cast<std::size_t>(axp.points) * ayp.points;
  Eigen::ArrayXd vals = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(npts));
  std::vector<Complex> weighted(npts * dd, Complex(0, 0));

  for (std::size_t k = 0; k < w.size(); ++k) {
    const double wk = w[k];
    const int ox = offx[k] + padx;
    const int oy = offy[k] + pady;
    for (int i = 0; i < ax.points; ++i) {
      const std::size_t src_row = static_cast<std::size_t>(i) * ay.points;
      const std::size_t dst_row = static_cast<std::size_t>(i + ox) * ayp.points + oy;
      for (int j = 0; j < ay.points; ++j) {
        const double p = s.joint.values()[static_cast<Eigen::Index>(src_row + j)];
        if (p == 0.0) continue;
        vals[static_cast<Eigen::Index>(dst_row + j)] += wk * p;
        const Complex* from = s.states.data.data() + (src_row + j) * dd;
        Complex* dst = weighted.data() + (dst_row + j) * dd;
        const double wp = wk * p;
        for (std::size_t e = 0; e < dd; ++e) dst[e] += wp * from[e];
      }
    }
  }

  StateTable table = StateTable::zeros(npts, d);
  std::vector<std::uint8_t> flagged(npts, 0);
  for (std::size_t idx = 0; idx < npts; ++idx) {
    const double p = vals[static_cast<Eigen::Index>(idx)];
    auto st = table.at(idx);
    if (p < kZeroMass) {
      vals[static_cast<Eigen::Index>(idx)] = 0.0;
      st.setIdentity();
      st *= 1.0 / d;
      flagged[idx] = 1;
      continue;
    }
    const Complex* src = weighted.data() + idx * dd;
    Complex* dst = table.data.data() + idx * dd;
    for (std::size_t e = 0; e < dd; ++e) dst[e] = src[e] / p;
  }
  GridDensity joint(Grid(axp, ayp), std::move(vals));
  return CCQState{std::move(joint), std::move(table), s.block_dims, std::move(flagged)};
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

Verdict judge(double deficit, double tolerance, double error_bar) {
  if (deficit >= -tolerance) return Verdict::pass;
  if (deficit >= -error_bar) return Verdict::inconclusive;
  return Verdict::fail;
}

nlohmann::json InequalityReport::to_json() const {
  return {{"name", name},         {"lhs", lhs},
          {"rhs", rhs},           {"deficit", deficit},
          {"tolerance", tolerance}, {"error_bar", error_bar},
          {"verdict", to_string(verdict)}, {"grid", grid},
          {"details", details},   {"notes", notes}};
}

struct PairAnalysis::Impl {
  CCQState state;
  CheckOptions opt;

  Impl(CCQState s, CheckOptions o) : state(std::move(s)), opt(o) {}

  std::optional<PairEntropies> fine;
  std::optional<CCQState> coarse_state;
  std::optional<PairEntropies> coarse;
  std::optional<CQState> mx, my, ms;
  std::optional<CQState> mxc, myc, msc;
  std::optional<double> sum_ent, sum_ent_coarse;
  std::optional<DualFisher> jx, jy, jsum;

  const PairEntropies& entropies() {
    if (!fine) fine = pair_entropies(state);
    return *fine;
  }
  const CCQState& coarse_st() {
    if (!coarse_state) coarse_state = coarsen(state);
    return *coarse_state;
  }
  const PairEntropies& entropies_coarse() {
    if (!coarse) coarse = pair_entropies(coarse_st());
    return *coarse;
  }
  const CQState& margx() {
    if (!mx) mx = marginal_x(state);
    return *mx;
  }
  const CQState& margy() {
    if (!my) my = marginal_y(state);
    return *my;
  }
  const CQState& sum() {
    if (!ms) ms = sum_pushforward(state);
    return *ms;
  }
  const CQState& sum_coarse() {
    if (!msc) msc = sum_pushforward(coarse_st());
    return *msc;
  }
  double sum_entropy() {
    if (!sum_ent) sum_ent = entropy_x_given_m(sum());
    return *sum_ent;
  }
  double sum_entropy_coarse() {
    if (!sum_ent_coarse) sum_ent_coarse = entropy_x_given_m(sum_coarse());
    return *sum_ent_coarse;
  }
  const DualFisher& fisher_x() {
    if (!jx) jx = dual_fisher(margx());
    return *jx;
  }
  const DualFisher& fisher_y() {
    if (!jy) jy = dual_fisher(margy());
    return *jy;
  }
  const DualFisher& fisher_sum() {
    if (!jsum) jsum = dual_fisher(sum());
    return *jsum;
  }

  double cmi_value() { return entropies().cmi; }
  double cmi_bar() {
    return std::abs(entropies().cmi - entropies_coarse().cmi) + 1e-12;
  }

  void require_ci(const char* check) {
    if (cmi_value() > opt.tol_ci) {
      throw NotConditionallyIndependent(
          fmt::format("{}: I(X:Y|M) = {:.3e} nats exceeds the conditional-independence "
                      "tolerance {:.1e}",
                      check, cmi_value(), opt.tol_ci));
    }
  }

  InequalityReport base_report(std::string name) {
    InequalityReport r;
    r.name = std::move(name);
    r.grid = grid_json(state.joint.grid());
    return r;
  }
};

PairAnalysis::PairAnalysis(CCQState state, CheckOptions options)
    : impl_(std::make_unique<Impl>(std::move(state), options)) {}

PairAnalysis::~PairAnalysis() = default;
PairAnalysis::PairAnalysis(PairAnalysis&&) noexcept = default;

const CCQState& PairAnalysis::state() const { return impl_->state; }
const CheckOptions& PairAnalysis::options() const { return impl_->opt; }
const PairEntropies& PairAnalysis::entropies() { return impl_->entropies(); }
double PairAnalysis::cmi_value() { return impl_->cmi_value(); }
double PairAnalysis::cmi_error_bar() { return impl_->cmi_bar(); }
const CQState& PairAnalysis::margx() { return impl_->margx(); }
const CQState& PairAnalysis::margy() { return impl_->margy(); }
const CQState& PairAnalysis::sum() { return impl_->sum(); }

InequalityReport PairAnalysis::check_epi() {
  auto& im = *impl_;
  im.require_ci("check_epi");
  const PairEntropies& e = im.entropies();
  const double s_sum = im.sum_entropy();
  const double lhs = std::exp(2.0 * s_sum);
  const double rhs = std::exp(2.0 * e.s_x_given_m) + std::exp(2.0 * e.s_y_given_m);

  const PairEntropies& ec = im.entropies_coarse();
  const double lhs_c = std::exp(2.0 * im.sum_entropy_coarse());
  const double rhs_c = std::exp(2.0 * ec.s_x_given_m) + std::exp(2.0 * ec.s_y_given_m);

  InequalityReport r = im.base_report("epi");
  r.lhs = lhs;
  r.rhs = rhs;
  r.deficit = (lhs - rhs) / rhs;
  r.tolerance = im.opt.tol_entropic;
  r.error_bar = std::abs(r.deficit - (lhs_c - rhs_c) / rhs_c) + 1e-9;

  // algebraic link with the linear form at the optimal lambda
  const double ex = std::exp(2.0 * e.s_x_given_m);
  const double lambda_star = ex / rhs;
  const double linear_bound = lambda_star * e.s_x_given_m + (1.0 - lambda_star) * e.s_y_given_m -
                              0.5 * (xlogx(lambda_star) + xlogx(1.0 - lambda_star));
  const double linear_deficit = s_sum - linear_bound;
  const double log_ratio = 0.5 * std::log(lhs / rhs);
  if (std::abs(linear_deficit - log_ratio) > 1e-6) {
    throw Error(fmt::format("entropy-power / linear-form identity broke: {} vs {}",
                            linear_deficit, log_ratio));
  }
  r.details = {{"s_sum_given_m", s_sum},
               {"s_x_given_m", e.s_x_given_m},
               {"s_y_given_m", e.s_y_given_m},
               {"cmi", e.cmi},
               {"lambda_star", lambda_star},
               {"linear_deficit_at_lambda_star", linear_deficit}};
  warn_large_entropy(r, {{"S(X|M)", e.s_x_given_m}, {"S(Y|M)", e.s_y_given_m},
                         {"S(X+Y|M)", s_sum}});
  r.verdict = judge(r.deficit, r.tolerance, r.error_bar);
  return r;
}

InequalityReport PairAnalysis::check_linear_epi(double lambda) {
  auto& im = *impl_;
  if (lambda < 0.0 || lambda > 1.0) {
    throw InvalidParameters(fmt::format("lambda = {} outside [0, 1]", lambda));
  }
  im.require_ci("check_linear_epi");
  const PairEntropies& e = im.entropies();
  const double s_sum = im.sum_entropy();
  const double bound = lambda * e.s_x_given_m + (1.0 - lambda) * e.s_y_given_m -
                       0.5 * (xlogx(lambda) + xlogx(1.0 - lambda));

  const PairEntropies& ec = im.entropies_coarse();
  const double bound_c = lambda * ec.s_x_given_m + (1.0 - lambda) * ec.s_y_given_m -
                         0.5 * (xlogx(lambda) + xlogx(1.0 - lambda));

  InequalityReport r = im.base_report("linear_epi");
  r.lhs = s_sum;
  r.rhs = bound;
  r.deficit = s_sum - bound;
  r.tolerance = im.opt.tol_entropic;
  r.error_bar = std::abs(r.deficit - (im.sum_entropy_coarse() - bound_c)) + 1e-9;
  r.details = {{"lambda", lambda}};
  r.verdict = judge(r.deficit, r.tolerance, r.error_bar);
  return r;
}

InequalityReport PairAnalysis::check_stam() {
  auto& im = *impl_;
  im.require_ci("check_stam");
  const DualFisher& fx = im.fisher_x();
  const DualFisher& fy = im.fisher_y();
  const DualFisher& fs = im.fisher_sum();

  InequalityReport r = im.base_report("stam");
  const bool usable = fx.value > fx.bar && fy.value > fy.bar && fs.value > fs.bar;
  if (!usable) {
    r.notes.push_back("FisherInconclusive: an estimate is not positive beyond its error bar");
  }
  const double lhs = 1.0 / fs.value;
  const double rhs = 1.0 / fx.value + 1.0 / fy.value;
  r.lhs = lhs;
  r.rhs = rhs;
  r.deficit = (lhs - rhs) / rhs;
  r.tolerance = im.opt.tol_fisher_rel;
  const double bar_abs = fs.bar / (fs.value * fs.value) + fx.bar / (fx.value * fx.value) +
                         fy.bar / (fy.value * fy.value);
  r.error_bar = bar_abs / rhs + 1e-9;

  // the optimal-lambda linear form reproduces the harmonic bound
  const double lambda_opt = fy.value / (fx.value + fy.value);
  const double linear_at_opt =
      lambda_opt * lambda_opt * fx.value + (1.0 - lambda_opt) * (1.0 - lambda_opt) * fy.value;
  const double harmonic = 1.0 / rhs;
  if (std::abs(linear_at_opt - harmonic) > 1e-9 * std::max(1.0, harmonic)) {
    throw Error("harmonic / linear-Stam identity broke");
  }
  r.details = {{"J_x", fx.to_json()},
               {"J_y", fy.to_json()},
               {"J_sum", fs.to_json()},
               {"lambda_opt", lambda_opt}};
  r.verdict = judge(r.deficit, r.tolerance, r.error_bar);
  if (!usable && r.verdict == Verdict::fail) r.verdict = Verdict::inconclusive;
  return r;
}

InequalityReport PairAnalysis::check_linear_stam(double lambda) {
  auto& im = *impl_;
  if (lambda < 0.0 || lambda > 1.0) {
    throw InvalidParameters(fmt::format("lambda = {} outside [0, 1]", lambda));
  }
  im.require_ci("check_linear_stam");
  const DualFisher& fx = im.fisher_x();
  const DualFisher& fy = im.fisher_y();
  const DualFisher& fs = im.fisher_sum();

  InequalityReport r = im.base_report("linear_stam");
  const double bound = lambda * lambda * fx.value + (1.0 - lambda) * (1.0 - lambda) * fy.value;
  r.lhs = bound;
  r.rhs = fs.value;
  r.deficit = (bound - fs.value) / fs.value;
  r.tolerance = im.opt.tol_fisher_rel;
  r.error_bar =
      (lambda * lambda * fx.bar + (1.0 - lambda) * (1.0 - lambda) * fy.bar + fs.bar) / fs.value +
      1e-9;
  r.details = {{"lambda", lambda},
               {"J_x", fx.value},
               {"J_y", fy.value},
               {"J_sum", fs.value}};
  r.verdict = judge(r.deficit, r.tolerance, r.error_bar);
  return r;
}

std::vector<InequalityReport> PairAnalysis::check_mi_chain(double lambda, double t) {
  auto& im = *impl_;
  if (lambda < 0.0 || lambda > 1.0) {
    throw InvalidParameters(fmt::format("lambda = {} outside [0, 1]", lambda));
  }
  if (t < 0.0) throw InvalidParameters("mi chain: t must be >= 0");
  im.require_ci("check_mi_chain");

  const double hx = im.state.axis_x().step();
  const double hy = im.state.axis_y().step();
  if (std::abs(hx - hy) > 1e-12 * hx) {
    throw IncompatibleGrids("mi chain needs equal axis spacing");
  }

  std::vector<InequalityReport> out;
  if (t == 0.0) {
    const int z_half = 16;
    const int gz = 2 * z_half + 1;
    const double hz = 0.5;
    std::vector<int> zero_off(static_cast<std::size_t>(gz), 0);
    std::vector<double> w(static_cast<std::size_t>(gz));
    double wsum = 0.0;
    for (int k = 0; k < gz; ++k) {
      w[static_cast<std::size_t>(k)] = std::exp(-0.5 * (k - z_half) * (k - z_half) * hz * hz);
      wsum += w[static_cast<std::size_t>(k)];
    }
    for (auto& v : w) v /= wsum;
    const double line1 =
        pair_entropies(make_shift_bundle(im.sum(), zero_off, w, hz, 0.0).state).cmi;
    const double ix = pair_entropies(make_shift_bundle(im.margx(), zero_off, w, hz, 0.0).state).cmi;
    const double iy = pair_entropies(make_shift_bundle(im.margy(), zero_off, w, hz, 0.0).state).cmi;
    InequalityReport r = im.base_report("mi_chain_t0");
    r.lhs = line1;
    r.rhs = ix + iy;
    r.deficit = -std::max(std::abs(line1), std::abs(ix + iy));
    r.tolerance = 1e-8;
    r.error_bar = 1e-10;
    r.details = {{"lambda", lambda}, {"t", 0.0}, {"line1", line1}, {"line4", ix + iy}};
    r.verdict = judge(r.deficit, r.tolerance, r.error_bar);
    out.push_back(std::move(r));
    return out;
  }

  const auto [pnum, q] = rationalize(lambda);
  const double rt = std::sqrt(t);
  const int c = std::max(1, static_cast<int>(std::floor(0.8 * rt / (q * hx))));
  const double hz = q * c * hx / rt;
  const int z_half = std::max(8, static_cast<int>(std::ceil(8.0 / hz)));
  const int gz = 2 * z_half + 1;

  std::vector<double> w(static_cast<std::size_t>(gz));
  std::vector<int> offx(static_cast<std::size_t>(gz)), offy(offx.size()), offs(offx.size());
  double wsum = 0.0;
  for (int k = 0; k < gz; ++k) {
    const double z = (k - z_half) * hz;
    w[static_cast<std::size_t>(k)] = std::exp(-0.5 * z * z);
    wsum += w[static_cast<std::size_t>(k)];
    offx[static_cast<std::size_t>(k)] = pnum * c * (k - z_half);
    offy[static_cast<std::size_t>(k)] = (q - pnum) * c * (k - z_half);
    offs[static_cast<std::size_t>(k)] = q * c * (k - z_half);
  }
  for (auto& v : w) v /= wsum;

  double s_z = 0.0;
  for (double v : w) s_z -= v * std::log(v / hz);

  const PairEntropies ex = pair_entropies(make_shift_bundle(im.margx(), offx, w, hz, t).state);
  const PairEntropies ey = pair_entropies(make_shift_bundle(im.margy(), offy, w, hz, t).state);
  const PairEntropies es = pair_entropies(make_shift_bundle(im.sum(), offs, w, hz, t).state);
  const double line1 = es.cmi;
  const double i_x = ex.cmi;
  const double i_y = ey.cmi;
  const double s_x1 = ex.s_x_given_m;
  const double s_y1 = ey.s_x_given_m;

  const CCQState smeared = shift_mix_joint(im.state, offx, offy, w);
  const PairEntropies& base = im.entropies();
  const double s_xy1_m =
      entropy_m_given_xy(smeared) + differential_entropy(smeared.joint) - base.s_m;
  const double s_xyz1_m = base.s_m_given_xy + base.s_xy + s_z - base.s_m;

  const double line2_direct = s_xy1_m + s_z - s_xyz1_m;
  const double i_m = s_x1 + s_y1 - s_xy1_m;
  const double i_mz = s_x1 + s_y1 - i_x - i_y - base.s_xy_given_m;
  const double line2_expanded = i_x + i_y + i_mz - i_m;
  const double line3 = i_x + i_y + i_mz;
  const double line4 = i_x + i_y;

  const double bar = im.cmi_bar() + 1e-9;
  nlohmann::json detail = {{"lambda", lambda}, {"t", t},
                           {"line1", line1},   {"line2", line2_direct},
                           {"line3", line3},   {"line4", line4},
                           {"I_x", i_x},       {"I_y", i_y},
                           {"I_m", i_m},       {"I_mz", i_mz},
                           {"z_points", gz},   {"shear_cells", c}};

  auto make = [&](const char* name, double lhs, double rhs, double deficit) {
    InequalityReport r = im.base_report(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.deficit = deficit;
    r.tolerance = im.opt.tol_equality;
    r.error_bar = bar;
    r.details = detail;
    r.verdict = judge(r.deficit, r.tolerance, r.error_bar);
    out.push_back(std::move(r));
  };
  make("mi_chain_a", line1, line2_direct, line2_direct - line1);
  make("mi_chain_b", line2_direct, line2_expanded, -std::abs(line2_direct - line2_expanded));
  make("mi_chain_c", line2_expanded, line3, line3 - line2_expanded);
  make("mi_chain_d", line3, line4, -std::abs(line3 - line4));
  return out;
}

FlowTrace PairAnalysis::phi_flow_trace(double lambda, const std::vector<double>& t_grid) {
  auto& im = *impl_;
  if (lambda < 0.0 || lambda > 1.0) {
    throw InvalidParameters(fmt::format("lambda = {} outside [0, 1]", lambda));
  }
  if (t_grid.size() < 2) throw InvalidParameters("phi flow needs at least 2 times");
  for (std::size_t k = 0; k + 1 < t_grid.size(); ++k) {
    if (!(t_grid[k] < t_grid[k + 1]) || t_grid[k] < 0.0) {
      throw InvalidParameters("phi flow times must be nonnegative and strictly increasing");
    }
  }
  im.require_ci("phi_flow");

  FlowTrace trace;
  trace.lambda = lambda;
  trace.t = t_grid;
  trace.limit = -0.5 * (xlogx(lambda) + xlogx(1.0 - lambda));
  for (double t : t_grid) {
    const double ss = entropy_x_given_m(heat_evolve_cq(im.sum(), t));
    const double sx = entropy_x_given_m(heat_evolve_cq(im.margx(), lambda * t));
    const double sy = entropy_x_given_m(heat_evolve_cq(im.margy(), (1.0 - lambda) * t));
    trace.entropy_sum.push_back(ss);
    trace.entropy_x.push_back(sx);
    trace.entropy_y.push_back(sy);
    trace.phi.push_back(ss - lambda * sx - (1.0 - lambda) * sy);
  }
  for (std::size_t k = 0; k + 1 < t_grid.size(); ++k) {
    trace.slope.push_back((trace.phi[k + 1] - trace.phi[k]) / (t_grid[k + 1] - t_grid[k]));
  }
  return trace;
}

InequalityReport PairAnalysis::check_phi_flow(double lambda, const std::vector<double>& t_grid) {
  auto& im = *impl_;
  FlowTrace trace = phi_flow_trace(lambda, t_grid);

  InequalityReport r = im.base_report("phi_flow");
  double max_slope = -1e300;
  for (double sl : trace.slope) max_slope = std::max(max_slope, sl);
  r.lhs = -max_slope;
  r.rhs = 0.0;
  r.deficit = -max_slope;
  r.tolerance = im.opt.phi_slope_tol;
  r.error_bar = 2e-8 / std::max(1e-6, t_grid[1] - t_grid[0]);
  r.verdict = judge(r.deficit, r.tolerance, r.error_bar);

  const double phi0 = trace.phi.front();
  const double phiT = trace.phi.back();
  if (phi0 < phiT - 1e-6) {
    r.verdict = Verdict::fail;
    r.notes.push_back(fmt::format("phi(0) = {:.6f} fell below phi(t_max) = {:.6f}", phi0, phiT));
  }
  if (phiT < trace.limit - im.opt.asym_final_residual) {
    r.verdict = Verdict::fail;
    r.notes.push_back(fmt::format("phi(t_max) = {:.6f} fell below the limit {:.6f} - {:.0e}",
                                  phiT, trace.limit, im.opt.asym_final_residual));
  }

  // Fisher cross-check of phi' at one interior time
  nlohmann::json spot;
  const std::size_t mid = t_grid.size() / 2;
  const double tm = t_grid[mid];
  if (tm > 0.0) {
    const double delta = 0.01 * (1.0 + tm);
    auto phi_at = [&](double t) {
      const double ss = entropy_x_given_m(heat_evolve_cq(im.sum(), t));
      const double sx = entropy_x_given_m(heat_evolve_cq(im.margx(), lambda * t));
      const double sy = entropy_x_given_m(heat_evolve_cq(im.margy(), (1.0 - lambda) * t));
      return ss - lambda * sx - (1.0 - lambda) * sy;
    };
    const double phi_prime = (phi_at(tm + delta) - phi_at(tm - delta)) / (2.0 * delta);
    const FisherEstimate js = fisher_at_time(im.sum(), tm);
    const FisherEstimate jx =
        lambda > 0.0 ? fisher_at_time(im.margx(), lambda * tm) : FisherEstimate{};
    const FisherEstimate jy =
        lambda < 1.0 ? fisher_at_time(im.margy(), (1.0 - lambda) * tm) : FisherEstimate{};
    const double combo = js.value - lambda * lambda * jx.value -
                         (1.0 - lambda) * (1.0 - lambda) * jy.value;
    const double bar = js.error_estimate + lambda * lambda * jx.error_estimate +
                       (1.0 - lambda) * (1.0 - lambda) * jy.error_estimate + 3e-3 +
                       0.02 * std::abs(combo);
    spot = {{"t", tm},
            {"phi_prime_fd", phi_prime},
            {"fisher_combination", combo},
            {"bar", bar}};
    if (std::abs(phi_prime - combo) > bar) {
      if (r.verdict == Verdict::pass) r.verdict = Verdict::inconclusive;
      r.notes.push_back(
          fmt::format("phi' spot check at t = {:.3g}: finite difference {:.6f} vs Fisher "
                      "combination {:.6f} beyond bar {:.1e}",
                      tm, phi_prime, combo, bar));
    }
  }

  r.details = {{"lambda", lambda},
               {"t", trace.t},
               {"phi", trace.phi},
               {"slope", trace.slope},
               {"limit", trace.limit},
               {"phi0", phi0},
               {"phi_final", phiT},
               {"fisher_spot_check", spot}};
  return r;
}

InequalityReport check_epi(const CCQState& s, const CheckOptions& opt) {
  return PairAnalysis(s, opt).check_epi();
}
InequalityReport check_linear_epi(const CCQState& s, double lambda, const CheckOptions& opt) {
  return PairAnalysis(s, opt).check_linear_epi(lambda);
}
InequalityReport check_stam(const CCQState& s, const CheckOptions& opt) {
  return PairAnalysis(s, opt).check_stam();
}
InequalityReport check_linear_stam(const CCQState& s, double lambda, const CheckOptions& opt) {
  return PairAnalysis(s, opt).check_linear_stam(lambda);
}
std::vector<InequalityReport> check_mi_chain(const CCQState& s, double lambda, double t,
                                             const CheckOptions& opt) {
  return PairAnalysis(s, opt).check_mi_chain(lambda, t);
}
FlowTrace phi_flow(const CCQState& s, double lambda, const std::vector<double>& t_grid,
                   const CheckOptions& opt) {
  return PairAnalysis(s, opt).phi_flow_trace(lambda, t_grid);
}

InequalityReport check_concavity(const CQState& s, const std::vector<double>& t_grid,
                                 const CheckOptions& opt) {
  if (t_grid.size() < 5) throw InvalidParameters("concavity needs at least 5 times");
  const double dt = t_grid[1] - t_grid[0];
  for (std::size_t k = 0; k + 1 < t_grid.size(); ++k) {
    if (std::abs((t_grid[k + 1] - t_grid[k]) - dt) > 1e-9 * std::max(dt, 1.0)) {
      throw InvalidParameters("concavity needs a uniform time grid");
    }
  }
  std::vector<double> entropies;
  entropies.reserve(t_grid.size());
  for (double t : t_grid) entropies.push_back(entropy_x_given_m(heat_evolve_cq(s, t)));

  double worst = -1e300;
  std::vector<double> second;
  for (std::size_t k = 1; k + 1 < entropies.size(); ++k) {
    const double d2 = entropies[k + 1] - 2.0 * entropies[k] + entropies[k - 1];
    second.push_back(d2);
    worst = std::max(worst, d2);
  }
  InequalityReport r;
  r.name = "concavity";
  r.grid = grid_json(s.density.grid());
  r.lhs = -worst;
  r.rhs = 0.0;
  r.deficit = -worst;
  r.tolerance = opt.concavity_tol;
  r.error_bar = 1e-8;
  r.details = {{"t", t_grid}, {"entropy", entropies}, {"second_differences", second}};
  r.verdict = judge(r.deficit, r.tolerance, r.error_bar);
  return r;
}

InequalityReport check_asymptotic(const CQState& s, const std::vector<double>& t_list,
                                  const CheckOptions& opt) {
  if (t_list.size() < 2) throw InvalidParameters("asymptotic check needs at least 2 times");
  for (std::size_t k = 0; k + 1 < t_list.size(); ++k) {
    if (!(t_list[k] < t_list[k + 1]) || t_list[k] <= 0.0) {
      throw InvalidParameters("asymptotic times must be positive and increasing");
    }
  }
  if (t_list.back() / t_list.front() < 100.0) {
    throw InvalidParameters("asymptotic times must span at least two decades");
  }
  const int n = s.density.grid().dim();
  std::vector<double> residuals;
  residuals.reserve(t_list.size());
  for (double t : t_list) {
    const double ent = entropy_x_given_m(heat_evolve_cq(s, t));
    residuals.push_back(ent - 0.5 * n * std::log(kTwoPiE * t));
  }
  double deficit = opt.asym_final_residual - std::abs(residuals.back());
  for (std::size_t k = 0; k + 1 < residuals.size(); ++k) {
    deficit = std::min(deficit, std::abs(residuals[k]) - std::abs(residuals[k + 1]));
  }
  InequalityReport r;
  r.name = "asymptotic_scaling";
  r.grid = grid_json(s.density.grid());
  r.lhs = std::abs(residuals.back());
  r.rhs = opt.asym_final_residual;
  r.deficit = deficit;
  r.tolerance = 1e-12;
  r.error_bar = 2e-9;
  r.details = {{"t", t_list}, {"residuals", residuals}};
  r.verdict = judge(r.deficit, r.tolerance, r.error_bar);
  return r;
}

namespace {

Verdict worst_verdict(Verdict a, Verdict b) {
  auto rank = [](Verdict v) {
    switch (v) {
      case Verdict::pass:
        return 0;
      case Verdict::inconclusive:
        return 1;
      case Verdict::fail:
        return 2;
    }
    return 2;
  };
  return rank(a) >= rank(b) ? a : b;
}

// Collapses per-draw reports of one check into a single suite report keyed by
// the worst draw.
InequalityReport aggregate(const std::string& name, const std::vector<InequalityReport>& draws,
                           std::uint64_t seed) {
  InequalityReport worst = draws.front();
  std::vector<double> deficits;
  Verdict verdict = Verdict::pass;
  int worst_index = 0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    deficits.push_back(draws[i].deficit);
    verdict = worst_verdict(verdict, draws[i].verdict);
    if (draws[i].deficit < worst.deficit) {
      worst = draws[i];
      worst_index = static_cast<int>(i);
    }
  }
  InequalityReport r = worst;
  r.name = name;
  r.verdict = verdict;
  r.details = {{"draws", draws.size()},
               {"seed", seed},
               {"worst_draw", worst_index},
               {"deficits", deficits},
               {"worst_details", worst.details}};
  return r;
}

}  // namespace

SuiteResult run_structured_suite(const SuiteOptions& opt) {
  if (opt.draws < 1) throw InvalidParameters("suite needs at least one draw");
  std::vector<double> phi_grid = opt.phi_t_grid;
  if (phi_grid.empty()) {
    for (int k = 0; k <= 12; ++k) phi_grid.push_back(0.5 * k);
  }

  std::mt19937_64 rng(opt.seed);
  std::vector<InequalityReport> epi, stam, phi, ci;
  std::vector<std::vector<InequalityReport>> linear_stam(opt.stam_lambdas.size());

  for (int draw = 0; draw < opt.draws; ++draw) {
    const StructuredCIState structured = random_structured_state(rng, opt.axis_x, opt.axis_y);
    PairAnalysis analysis(realize(structured, opt.axis_x, opt.axis_y), opt.checks);

    InequalityReport ci_report;
    ci_report.name = "conditional_independence";
    ci_report.lhs = analysis.cmi_value();
    ci_report.rhs = opt.checks.tol_ci;
    ci_report.deficit = opt.checks.tol_ci - std::abs(analysis.cmi_value());
    ci_report.tolerance = 0.0;
    ci_report.error_bar = analysis.cmi_error_bar();
    ci_report.grid = grid_json(analysis.state().joint.grid());
    ci_report.details = {{"cmi", analysis.cmi_value()}, {"draw", draw}};
    ci_report.verdict = judge(ci_report.deficit, ci_report.tolerance, ci_report.error_bar);
    ci.push_back(std::move(ci_report));

    epi.push_back(analysis.check_epi());
    stam.push_back(analysis.check_stam());
    for (std::size_t li = 0; li < opt.stam_lambdas.size(); ++li) {
      linear_stam[li].push_back(analysis.check_linear_stam(opt.stam_lambdas[li]));
    }
    phi.push_back(analysis.check_phi_flow(opt.phi_lambda, phi_grid));
  }

  SuiteResult result;
  result.draws = opt.draws;
  result.seed = opt.seed;
  result.reports.push_back(aggregate("conditional_independence[suite]", ci, opt.seed));
  result.reports.push_back(aggregate("epi[suite]", epi, opt.seed));
  result.reports.push_back(aggregate("stam[suite]", stam, opt.seed));
  for (std::size_t li = 0; li < opt.stam_lambdas.size(); ++li) {
    result.reports.push_back(aggregate(
        fmt::format("linear_stam[suite,lambda={:.2f}]", opt.stam_lambdas[li]), linear_stam[li],
        opt.seed));
  }
  result.reports.push_back(aggregate("phi_flow[suite]", phi, opt.seed));
  return result;
}

}  // namespace qepi
