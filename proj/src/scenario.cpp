#include "qepi/scenario.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <fstream>

#include "qepi/heat.hpp"

namespace qepi {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& path, const std::string& reason) {
  throw ConfigInvalid(fmt::format("{}: {}", path, reason));
}

const json& need(const json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) invalid(path + "." + key, "missing field");
  return *it;
}

double need_number(const json& j, const char* key, const std::string& path) {
  const json& v = need(j, key, path);
  if (!v.is_number()) invalid(path + "." + key, "expected a number");
  return v.get<double>();
}

std::vector<double> number_list(const json& v, const std::string& path) {
  if (!v.is_array()) invalid(path, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) invalid(path, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

Axis parse_axis(const json& j, const std::string& path) {
  Axis a;
  a.lo = need_number(j, "lo", path);
  a.hi = need_number(j, "hi", path);
  a.points = static_cast<int>(need_number(j, "points", path));
  if (a.points < kMinAxisPoints) invalid(path + ".points", "fewer than 16 points");
  if (!(a.hi > a.lo)) invalid(path, "hi must exceed lo");
  return a;
}

json axis_to_json(const Axis& a) { return {{"lo", a.lo}, {"hi", a.hi}, {"points", a.points}}; }

DensitySpec parse_density(const json& j, const std::string& path) {
  DensitySpec d;
  d.kind = need(j, "kind", path).get<std::string>();
  if (d.kind == "gaussian") {
    d.mean = need_number(j, "mean", path);
    d.variance = need_number(j, "variance", path);
    if (d.variance <= 0.0) invalid(path + ".variance", "must be positive");
  } else if (d.kind == "mixture") {
    const json& comps = need(j, "components", path);
    if (!comps.is_array() || comps.empty()) invalid(path + ".components", "expected components");
    for (std::size_t i = 0; i < comps.size(); ++i) {
      const std::string cp = fmt::format("{}.components[{}]", path, i);
      GaussianComponent c;
      c.weight = need_number(comps[i], "weight", cp);
      c.mean = need_number(comps[i], "mean", cp);
      c.variance = need_number(comps[i], "variance", cp);
      if (c.weight <= 0.0 || c.variance <= 0.0) invalid(cp, "weights and variances must be positive");
      d.components.push_back(c);
    }
  } else if (d.kind == "uniform") {
    d.lo = need_number(j, "lo", path);
    d.hi = need_number(j, "hi", path);
    if (!(d.hi > d.lo)) invalid(path, "hi must exceed lo");
  } else {
    invalid(path + ".kind", fmt::format("unknown density kind '{}'", d.kind));
  }
  return d;
}

json density_to_json(const DensitySpec& d) {
  json j{{"kind", d.kind}};
  if (d.kind == "gaussian") {
    j["mean"] = d.mean;
    j["variance"] = d.variance;
  } else if (d.kind == "mixture") {
    json comps = json::array();
    for (const auto& c : d.components) {
      comps.push_back({{"weight", c.weight}, {"mean", c.mean}, {"variance", c.variance}});
    }
    j["components"] = comps;
  } else {
    j["lo"] = d.lo;
    j["hi"] = d.hi;
  }
  return j;
}

FamilySpec parse_family(const json& j, const std::string& path) {
  FamilySpec f;
  f.name = need(j, "name", path).get<std::string>();
  if (f.name == "constant") {
    if (j.contains("diag")) f.diag = number_list(j["diag"], path + ".diag");
    if (f.diag.empty()) invalid(path + ".diag", "empty spectrum");
  } else if (f.name == "qubit_bloch") {
    f.alpha = need_number(j, "alpha", path);
    f.beta = need_number(j, "beta", path);
    f.gamma = need_number(j, "gamma", path);
    f.mu = need_number(j, "mu", path);
    if (f.mu < 0.0 || f.mu >= 1.0) invalid(path + ".mu", "must lie in [0, 1)");
  } else if (f.name == "diagonal_classical") {
    f.weight = number_list(need(j, "weight", path), path + ".weight");
    f.bias = number_list(need(j, "bias", path), path + ".bias");
    if (f.weight.empty() || f.weight.size() != f.bias.size()) {
      invalid(path, "weight and bias must be equal-length and nonempty");
    }
  } else {
    invalid(path + ".name", fmt::format("unknown family '{}'", f.name));
  }
  return f;
}

json family_to_json(const FamilySpec& f) {
  json j{{"name", f.name}};
  if (f.name == "constant") {
    j["diag"] = f.diag;
  } else if (f.name == "qubit_bloch") {
    j["alpha"] = f.alpha;
    j["beta"] = f.beta;
    j["gamma"] = f.gamma;
    j["mu"] = f.mu;
  } else {
    j["weight"] = f.weight;
    j["bias"] = f.bias;
  }
  return j;
}

VariableSpec parse_variable(const json& j, const std::string& path) {
  VariableSpec v;
  v.density = parse_density(need(j, "density", path), path + ".density");
  v.family = parse_family(need(j, "family", path), path + ".family");
  return v;
}

json variable_to_json(const VariableSpec& v) {
  return {{"density", density_to_json(v.density)}, {"family", family_to_json(v.family)}};
}

PairSpec parse_pair(const json& j, const std::string& path) {
  PairSpec p;
  p.kind = need(j, "kind", path).get<std::string>();
  if (p.kind == "product") {
    p.x = parse_variable(need(j, "x", path), path + ".x");
    p.y = parse_variable(need(j, "y", path), path + ".y");
  } else if (p.kind == "structured") {
    const json& blocks = need(j, "blocks", path);
    if (!blocks.is_array() || blocks.empty()) invalid(path + ".blocks", "expected blocks");
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const std::string bp = fmt::format("{}.blocks[{}]", path, i);
      BlockSpec b;
      b.weight = need_number(blocks[i], "weight", bp);
      b.x = parse_variable(need(blocks[i], "x", bp), bp + ".x");
      b.y = parse_variable(need(blocks[i], "y", bp), bp + ".y");
      p.blocks.push_back(std::move(b));
    }
  } else if (p.kind == "classical_diagonal") {
    p.correlation = need_number(j, "correlation", path);
    if (std::abs(p.correlation) >= 1.0) invalid(path + ".correlation", "must lie in (-1, 1)");
    p.weight_x = number_list(need(j, "weight_x", path), path + ".weight_x");
    p.weight_y = number_list(need(j, "weight_y", path), path + ".weight_y");
    p.bias = number_list(need(j, "bias", path), path + ".bias");
    if (p.weight_x.size() != p.weight_y.size() || p.weight_x.size() != p.bias.size() ||
        p.weight_x.empty()) {
      invalid(path, "weight_x, weight_y and bias must be equal-length and nonempty");
    }
  } else {
    invalid(path + ".kind", fmt::format("unknown pair kind '{}'", p.kind));
  }
  return p;
}

json pair_to_json(const PairSpec& p) {
  json j{{"kind", p.kind}};
  if (p.kind == "product") {
    j["x"] = variable_to_json(p.x);
    j["y"] = variable_to_json(p.y);
  } else if (p.kind == "structured") {
    json blocks = json::array();
    for (const auto& b : p.blocks) {
      blocks.push_back(
          {{"weight", b.weight}, {"x", variable_to_json(b.x)}, {"y", variable_to_json(b.y)}});
    }
    j["blocks"] = blocks;
  } else {
    j["correlation"] = p.correlation;
    j["weight_x"] = p.weight_x;
    j["weight_y"] = p.weight_y;
    j["bias"] = p.bias;
  }
  return j;
}

const std::vector<std::string> kCheckNames = {"epi",      "linear_epi", "stam",
                                              "linear_stam", "mi_chain", "concavity",
                                              "asymptotic",  "phi_flow"};

CheckSpec parse_check(const json& j, const std::string& path) {
  CheckSpec c;
  c.name = need(j, "name", path).get<std::string>();
  bool known = false;
  for (const auto& n : kCheckNames) known = known || n == c.name;
  if (!known) invalid(path + ".name", fmt::format("unknown check '{}'", c.name));
  if (j.contains("lambdas")) c.lambdas = number_list(j["lambdas"], path + ".lambdas");
  if (j.contains("lambda")) c.lambda = j["lambda"].get<double>();
  if (j.contains("t_list")) c.t_list = number_list(j["t_list"], path + ".t_list");
  if (j.contains("t_max")) c.t_max = j["t_max"].get<double>();
  if (j.contains("t_points")) c.t_points = j["t_points"].get<int>();
  if (j.contains("variable")) c.variable = j["variable"].get<std::string>();
  if (c.variable != "x" && c.variable != "y" && c.variable != "sum") {
    invalid(path + ".variable", "must be x, y or sum");
  }
  if (c.t_points < 2) invalid(path + ".t_points", "needs at least 2 points");
  if (c.t_max <= 0.0) invalid(path + ".t_max", "must be positive");
  return c;
}

json check_to_json(const CheckSpec& c) {
  json j{{"name", c.name}};
  if (!c.lambdas.empty()) j["lambdas"] = c.lambdas;
  j["lambda"] = c.lambda;
  if (!c.t_list.empty()) j["t_list"] = c.t_list;
  j["t_max"] = c.t_max;
  j["t_points"] = c.t_points;
  j["variable"] = c.variable;
  return j;
}

StateFamily family_from_spec(const FamilySpec& f) {
  if (f.name == "constant") {
    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(f.diag.data(),
                                                             static_cast<Eigen::Index>(f.diag.size()));
    const double sum = diag.sum();
    if (sum <= 0.0) throw ConfigInvalid("constant family: spectrum must have positive mass");
    ComplexMatrix m = (diag / sum).cast<Complex>().asDiagonal();
    return ConstantFamily{DensityMatrix::validated(m)};
  }
  if (f.name == "qubit_bloch") {
    return QubitBlochFamily{f.alpha, f.beta, f.gamma, f.mu};
  }
  DiagonalSoftmaxFamily fam;
  fam.weight = Eigen::Map<const Eigen::VectorXd>(f.weight.data(),
                                                 static_cast<Eigen::Index>(f.weight.size()));
  fam.bias =
      Eigen::Map<const Eigen::VectorXd>(f.bias.data(), static_cast<Eigen::Index>(f.bias.size()));
  return fam;
}

GridDensity density_from_spec(const DensitySpec& d, const Axis& axis) {
  if (d.kind == "gaussian") return gaussian_density(d.mean, d.variance, axis);
  if (d.kind == "mixture") return mixture_density(d.components, axis);
  return uniform_density(d.lo, d.hi, axis);
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out.push_back(lo + (hi - lo) * k / (n - 1));
  return out;
}

}  // namespace

ScenarioConfig parse_config(const json& j) {
  ScenarioConfig c;
  if (!j.is_object()) invalid("config", "expected a JSON object");
  const json& sv = need(j, "schema_version", "config");
  if (!sv.is_number_integer() || sv.get<int>() != kSchemaVersion) {
    invalid("config.schema_version", fmt::format("expected {}", kSchemaVersion));
  }
  c.name = need(j, "name", "config").get<std::string>();
  if (j.contains("kind")) c.kind = j["kind"].get<std::string>();
  if (c.kind != "pair" && c.kind != "suite") invalid("config.kind", "must be pair or suite");
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  c.axis_x = parse_axis(need(j, "axis_x", "config"), "config.axis_x");
  c.axis_y = parse_axis(need(j, "axis_y", "config"), "config.axis_y");

  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    if (t.contains("entropic")) c.tolerances.tol_entropic = t["entropic"].get<double>();
    if (t.contains("fisher_rel")) c.tolerances.tol_fisher_rel = t["fisher_rel"].get<double>();
    if (t.contains("ci")) c.tolerances.tol_ci = t["ci"].get<double>();
    if (t.contains("equality")) c.tolerances.tol_equality = t["equality"].get<double>();
    if (c.tolerances.tol_entropic <= 0.0 || c.tolerances.tol_fisher_rel <= 0.0 ||
        c.tolerances.tol_ci <= 0.0 || c.tolerances.tol_equality <= 0.0) {
      invalid("config.tolerances", "tolerances must be positive");
    }
  }

  if (c.kind == "pair") {
    c.pair = parse_pair(need(j, "pair", "config"), "config.pair");
    const json& checks = need(j, "checks", "config");
    if (!checks.is_array()) invalid("config.checks", "expected an array");
    for (std::size_t i = 0; i < checks.size(); ++i) {
      c.checks.push_back(parse_check(checks[i], fmt::format("config.checks[{}]", i)));
    }
  } else {
    if (j.contains("draws")) c.draws = j["draws"].get<int>();
    if (c.draws < 1) invalid("config.draws", "needs at least one draw");
    if (j.contains("stam_lambdas"))
      c.stam_lambdas = number_list(j["stam_lambdas"], "config.stam_lambdas");
    if (j.contains("phi_lambda")) c.phi_lambda = j["phi_lambda"].get<double>();
  }
  return c;
}

json config_to_json(const ScenarioConfig& c) {
  json j{{"schema_version", c.schema_version},
         {"name", c.name},
         {"kind", c.kind},
         {"seed", c.seed},
         {"axis_x", axis_to_json(c.axis_x)},
         {"axis_y", axis_to_json(c.axis_y)},
         {"tolerances",
          {{"entropic", c.tolerances.tol_entropic},
           {"fisher_rel", c.tolerances.tol_fisher_rel},
           {"ci", c.tolerances.tol_ci},
           {"equality", c.tolerances.tol_equality}}}};
  if (c.kind == "pair") {
    j["pair"] = pair_to_json(c.pair);
    json checks = json::array();
    for (const auto& ch : c.checks) checks.push_back(check_to_json(ch));
    j["checks"] = checks;
  } else {
    j["draws"] = c.draws;
    j["stam_lambdas"] = c.stam_lambdas;
    j["phi_lambda"] = c.phi_lambda;
  }
  return j;
}

ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid(fmt::format("cannot open '{}'", path));
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigInvalid(fmt::format("{}: {}", path, e.what()));
  }
  return parse_config(j);
}

CCQState build_pair_state(const ScenarioConfig& c) {
  if (c.kind != "pair") throw ConfigInvalid("scenario is not pair-kind");
  const PairSpec& p = c.pair;
  if (p.kind == "product") {
    CQState x = make_cq(density_from_spec(p.x.density, c.axis_x), family_from_spec(p.x.family));
    CQState y = make_cq(density_from_spec(p.y.density, c.axis_y), family_from_spec(p.y.family));
    return make_product_ccq(x, y);
  }
  if (p.kind == "structured") {
    StructuredCIState s;
    for (const auto& b : p.blocks) {
      s.blocks.push_back(StructuredBlock{b.weight, density_from_spec(b.x.density, c.axis_x),
                                         density_from_spec(b.y.density, c.axis_y),
                                         family_from_spec(b.x.family),
                                         family_from_spec(b.y.family)});
    }
    return realize(s, c.axis_x, c.axis_y);
  }
  // classical_diagonal: correlated Gaussian joint, diagonal label states
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(2);
  Eigen::MatrixXd cov(2, 2);
  cov << 1.0, p.correlation, p.correlation, 1.0;
  GridDensity joint = gaussian_density(mean, cov, Grid(c.axis_x, c.axis_y));
  const auto wx = p.weight_x;
  const auto wy = p.weight_y;
  const auto bias = p.bias;
  const int d = static_cast<int>(wx.size());
  auto map = [wx, wy, bias, d](double x, double y) {
    Eigen::VectorXd score(d);
    for (int m = 0; m < d; ++m) score[m] = wx[static_cast<std::size_t>(m)] * x +
                                           wy[static_cast<std::size_t>(m)] * y +
                                           bias[static_cast<std::size_t>(m)];
    Eigen::VectorXd q = (score.array() - score.maxCoeff()).exp();
    q /= q.sum();
    return static_cast<ComplexMatrix>(q.cast<Complex>().asDiagonal());
  };
  return make_ccq(std::move(joint), map, std::vector<int>(static_cast<std::size_t>(d), 1));
}

namespace {

const CQState& pick_variable(PairAnalysis& a, const std::string& variable) {
  if (variable == "x") return a.margx();
  if (variable == "y") return a.margy();
  return a.sum();
}

InequalityReport error_report(const std::string& name, const Error& e) {
  InequalityReport r;
  r.name = name;
  r.deficit = -1e300;
  r.verdict = Verdict::fail;
  r.notes.push_back(fmt::format("error: {}", e.what()));
  return r;
}

void run_pair_checks(const ScenarioConfig& c, RunReport& report) {
  PairAnalysis analysis(build_pair_state(c), c.tolerances);
  bool fisher_used = false;

  for (const auto& check : c.checks) {
    try {
      if (check.name == "epi") {
        report.checks.push_back(analysis.check_epi());
      } else if (check.name == "linear_epi") {
        std::vector<double> ls = check.lambdas.empty()
                                     ? std::vector<double>{0.25, 0.5, 0.75}
                                     : check.lambdas;
        for (double l : ls) {
          InequalityReport r = analysis.check_linear_epi(l);
          r.name = fmt::format("linear_epi[lambda={:.2f}]", l);
          report.checks.push_back(std::move(r));
        }
      } else if (check.name == "stam") {
        fisher_used = true;
        report.checks.push_back(analysis.check_stam());
      } else if (check.name == "linear_stam") {
        fisher_used = true;
        std::vector<double> ls = check.lambdas.empty()
                                     ? std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}
                                     : check.lambdas;
        for (double l : ls) {
          InequalityReport r = analysis.check_linear_stam(l);
          r.name = fmt::format("linear_stam[lambda={:.2f}]", l);
          report.checks.push_back(std::move(r));
        }
      } else if (check.name == "mi_chain") {
        std::vector<double> ts = check.t_list.empty() ? std::vector<double>{0.0, 0.05, 0.1}
                                                      : check.t_list;
        for (double t : ts) {
          for (auto& r : analysis.check_mi_chain(check.lambda, t)) {
            r.name = fmt::format("{}[t={:g}]", r.name, t);
            report.checks.push_back(std::move(r));
          }
        }
      } else if (check.name == "concavity") {
        const CQState& v = pick_variable(analysis, check.variable);
        InequalityReport r =
            check_concavity(v, linspace(0.0, check.t_max, check.t_points), c.tolerances);
        r.name = fmt::format("concavity[{}]", check.variable);
        report.checks.push_back(std::move(r));
      } else if (check.name == "asymptotic") {
        const CQState& v = pick_variable(analysis, check.variable);
        std::vector<double> ts = check.t_list.empty() ? std::vector<double>{10.0, 100.0, 1000.0}
                                                      : check.t_list;
        InequalityReport r = check_asymptotic(v, ts, c.tolerances);
        r.name = fmt::format("asymptotic_scaling[{}]", check.variable);
        report.checks.push_back(std::move(r));
      } else if (check.name == "phi_flow") {
        report.checks.push_back(
            analysis.check_phi_flow(check.lambda, linspace(0.0, check.t_max, check.t_points)));
      }
    } catch (const Error& e) {
      report.checks.push_back(error_report(check.name, e));
    }
  }

  const PairEntropies& e = analysis.entropies();
  report.quantities = {{"S_M", e.s_m},
                       {"S_X", e.s_x},
                       {"S_Y", e.s_y},
                       {"S_XY", e.s_xy},
                       {"S_X_given_M", e.s_x_given_m},
                       {"S_Y_given_M", e.s_y_given_m},
                       {"S_XY_given_M", e.s_xy_given_m},
                       {"S_sum_given_M", entropy_x_given_m(analysis.sum())},
                       {"cmi", e.cmi},
                       {"cmi_error_bar", analysis.cmi_error_bar()}};
  if (fisher_used) {
    for (const auto& r : report.checks) {
      if (r.name == "stam") {
        report.quantities["fisher"] = r.details;
        break;
      }
    }
  }
}

}  // namespace

RunReport run_verify(const ScenarioConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.scenario = config;

  if (config.kind == "suite") {
    SuiteOptions opt;
    opt.draws = config.draws;
    opt.seed = config.seed;
    opt.axis_x = config.axis_x;
    opt.axis_y = config.axis_y;
    opt.stam_lambdas = config.stam_lambdas;
    opt.phi_lambda = config.phi_lambda;
    opt.checks = config.tolerances;
    SuiteResult suite = run_structured_suite(opt);
    report.checks = std::move(suite.reports);
    report.quantities = {{"draws", suite.draws}, {"seed", suite.seed}};
  } else {
    run_pair_checks(config, report);
  }

  report.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return report;
}

std::vector<SweepRow> run_sweep(const ScenarioConfig& config, const std::string& quantity,
                                const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw ConfigInvalid("sweep: empty t grid");
  if (quantity != "entropy_flow" && quantity != "fisher_flow" && quantity != "phi") {
    throw ConfigInvalid(fmt::format("sweep: unknown quantity '{}'", quantity));
  }
  for (std::size_t k = 0; k + 1 < t_grid.size(); ++k) {
    if (!(t_grid[k] < t_grid[k + 1])) throw ConfigInvalid("sweep: t grid must be increasing");
  }

  PairAnalysis analysis(build_pair_state(config), config.tolerances);
  std::vector<SweepRow> rows;
  rows.reserve(t_grid.size());

  if (quantity == "phi") {
    double lambda = config.phi_lambda;
    for (const auto& ch : config.checks) {
      if (ch.name == "phi_flow") lambda = ch.lambda;
    }
    std::vector<double> grid = t_grid;
    if (grid.front() < 0.0) throw ConfigInvalid("sweep: t must be nonnegative");
    FlowTrace trace = analysis.phi_flow_trace(lambda, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      rows.push_back({grid[k], trace.phi[k], 1e-8});
    }
    return rows;
  }

  const CQState& x = analysis.margx();
  const CQState x_coarse = coarsen(x);
  for (double t : t_grid) {
    if (t < 0.0) throw ConfigInvalid("sweep: t must be nonnegative");
    SweepRow row;
    row.t = t;
    if (quantity == "entropy_flow") {
      row.value = entropy_x_given_m(heat_evolve_cq(x, t));
      row.error_bar = std::abs(row.value - entropy_x_given_m(heat_evolve_cq(x_coarse, t)));
    } else {
      FisherEstimate est = fisher_at_time(x, t);
      row.value = est.value;
      row.error_bar = est.error_estimate;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out = "t,value,error_bar\n";
  for (const auto& r : rows) {
    out += fmt::format("{:.12g},{:.12g},{:.12g}\n", r.t, r.value, r.error_bar);
  }
  return out;
}

json RunReport::to_json() const {
  json checks_json = json::array();
  for (const auto& c : checks) checks_json.push_back(c.to_json());
  return {{"schema_version", schema_version},
          {"scenario", config_to_json(scenario)},
          {"quantities", quantities},
          {"checks", checks_json},
          {"wall_ms", wall_ms}};
}

int RunReport::exit_code() const {
  bool any_fail = false, any_inconclusive = false;
  for (const auto& c : checks) {
    any_fail = any_fail || c.verdict == Verdict::fail;
    any_inconclusive = any_inconclusive || c.verdict == Verdict::inconclusive;
  }
  if (any_fail) return 2;
  if (any_inconclusive) return 3;
  return 0;
}

namespace {

ScenarioConfig gaussian_equality_config() {
  ScenarioConfig c;
  c.name = "gaussian-equality";
  c.seed = 7;
  c.axis_x = Axis{-14.0, 14.0, 1024};
  c.axis_y = Axis{-14.0, 14.0, 1024};
  c.pair.kind = "product";
  c.pair.x.density = DensitySpec{"gaussian", 0.0, 1.0, {}, 0, 1};
  c.pair.x.family = FamilySpec{};
  c.pair.y.density = DensitySpec{"gaussian", 0.0, 4.0, {}, 0, 1};
  c.pair.y.family = FamilySpec{};
  c.checks = {
      CheckSpec{"epi", {}, 0.5, {}, 10, 21, "x"},
      CheckSpec{"linear_epi", {0.25, 0.5, 0.75}, 0.5, {}, 10, 21, "x"},
      CheckSpec{"stam", {}, 0.5, {}, 10, 21, "x"},
      CheckSpec{"linear_stam", {0.0, 0.25, 0.5, 0.75, 1.0}, 0.5, {}, 10, 21, "x"},
      CheckSpec{"mi_chain", {}, 0.5, {0.0, 0.05, 0.1}, 10, 21, "x"},
      CheckSpec{"concavity", {}, 0.5, {}, 10.0, 21, "x"},
      CheckSpec{"asymptotic", {}, 0.5, {10.0, 100.0, 1000.0}, 10, 21, "x"},
      CheckSpec{"phi_flow", {}, 0.5, {}, 20.0, 21, "x"},
  };
  return c;
}

ScenarioConfig gaussian_equal_pair_config() {
  ScenarioConfig c;
  c.name = "gaussian-equal-pair";
  c.seed = 7;
  c.axis_x = Axis{-10.0, 10.0, 1024};
  c.axis_y = Axis{-10.0, 10.0, 1024};
  c.pair.kind = "product";
  c.pair.x.density = DensitySpec{"gaussian", 0.0, 1.0, {}, 0, 1};
  c.pair.y.density = DensitySpec{"gaussian", 0.0, 1.0, {}, 0, 1};
  c.checks = {
      CheckSpec{"epi", {}, 0.5, {}, 10, 21, "x"},
      CheckSpec{"linear_epi", {0.5}, 0.5, {}, 10, 21, "x"},
      CheckSpec{"phi_flow", {}, 0.5, {}, 20.0, 21, "x"},
  };
  return c;
}

ScenarioConfig qubit_structured_config() {
  ScenarioConfig c;
  c.name = "qubit-structured";
  c.seed = 11;
  c.axis_x = Axis{-10.0, 10.0, 256};
  c.axis_y = Axis{-10.0, 10.0, 256};
  c.pair.kind = "structured";
  BlockSpec b;
  b.weight = 1.0;
  b.x.density = DensitySpec{"gaussian", 0.0, 1.2, {}, 0, 1};
  b.x.family = FamilySpec{"qubit_bloch", {}, 1.0, 1.0, 0.2, 0.3, {}, {}};
  b.y.density = DensitySpec{"gaussian", 0.3, 1.6, {}, 0, 1};
  b.y.family = FamilySpec{"qubit_bloch", {}, 1.2, 0.8, -0.3, 0.25, {}, {}};
  c.pair.blocks = {b};
  c.checks = {
      CheckSpec{"epi", {}, 0.5, {}, 10, 21, "x"},
      CheckSpec{"linear_epi", {0.25, 0.5, 0.75}, 0.5, {}, 10, 21, "x"},
      CheckSpec{"stam", {}, 0.5, {}, 10, 21, "x"},
      CheckSpec{"linear_stam", {0.0, 0.5, 1.0}, 0.5, {}, 10, 21, "x"},
      CheckSpec{"mi_chain", {}, 0.5, {0.0, 0.05, 0.1}, 10, 21, "x"},
      CheckSpec{"concavity", {}, 0.5, {}, 10.0, 21, "x"},
      CheckSpec{"asymptotic", {}, 0.5, {10.0, 100.0, 1000.0}, 10, 21, "x"},
      CheckSpec{"phi_flow", {}, 0.5, {}, 12.0, 21, "x"},
  };
  return c;
}

ScenarioConfig qubit_structured_n2_config() {
  ScenarioConfig c;
  c.name = "qubit-structured-n2";
  c.seed = 13;
  c.axis_x = Axis{-10.0, 10.0, 256};
  c.axis_y = Axis{-10.0, 10.0, 256};
  c.pair.kind = "structured";
  BlockSpec b1;
  b1.weight = 0.4;
  b1.x.density = DensitySpec{"gaussian", -0.5, 1.0, {}, 0, 1};
  b1.x.family = FamilySpec{"qubit_bloch", {}, 1.0, 1.5, 0.0, 0.2, {}, {}};
  b1.y.density = DensitySpec{"gaussian", 0.2, 0.8, {}, 0, 1};
  b1.y.family = FamilySpec{};  // constant [1]
  BlockSpec b2;
  b2.weight = 0.6;
  b2.x.density = DensitySpec{"gaussian", 0.7, 1.4, {}, 0, 1};
  b2.x.family = FamilySpec{};
  b2.y.density = DensitySpec{"gaussian", -0.3, 1.1, {}, 0, 1};
  b2.y.family = FamilySpec{"qubit_bloch", {}, 0.8, 1.0, 0.3, 0.4, {}, {}};
  c.pair.blocks = {b1, b2};
  c.checks = {
      CheckSpec{"epi", {}, 0.5, {}, 10, 21, "x"},
      CheckSpec{"linear_epi", {0.5}, 0.5, {}, 10, 21, "x"},
      CheckSpec{"stam", {}, 0.5, {}, 10, 21, "x"},
      CheckSpec{"concavity", {}, 0.5, {}, 10.0, 21, "x"},
      CheckSpec{"phi_flow", {}, 0.5, {}, 12.0, 21, "x"},
  };
  return c;
}

ScenarioConfig classical_diagonal_config() {
  ScenarioConfig c;
  c.name = "classical-diagonal";
  c.seed = 17;
  c.axis_x = Axis{-10.0, 10.0, 256};
  c.axis_y = Axis{-10.0, 10.0, 256};
  c.pair.kind = "classical_diagonal";
  c.pair.correlation = 0.5;
  c.pair.weight_x = {0.0, 0.8};
  c.pair.weight_y = {0.0, 0.8};
  c.pair.bias = {0.0, 0.0};
  c.checks = {
      CheckSpec{"concavity", {}, 0.5, {}, 10.0, 21, "x"},
      CheckSpec{"asymptotic", {}, 0.5, {10.0, 100.0, 1000.0}, 10, 21, "x"},
  };
  return c;
}

ScenarioConfig structured_suite_config() {
  ScenarioConfig c;
  c.name = "structured-suite";
  c.kind = "suite";
  c.seed = 20180802;
  c.axis_x = Axis{-10.0, 10.0, 256};
  c.axis_y = Axis{-10.0, 10.0, 256};
  c.draws = 50;
  c.stam_lambdas = {0.0, 0.25, 0.5, 0.75, 1.0};
  c.phi_lambda = 0.5;
  return c;
}

}  // namespace

std::vector<ScenarioInfo> list_scenarios() {
  return {
      {"gaussian-equality",
       "independent N(0,1), N(0,4), trivial M: every inequality at its Gaussian equality point"},
      {"gaussian-equal-pair", "equal Gaussians: the phi flow is constant at (ln 2)/2"},
      {"qubit-structured", "one-block direct-sum state with qubit Bloch maps on both sides"},
      {"qubit-structured-n2", "two-block direct-sum state mixing qubit and trivial factors"},
      {"classical-diagonal",
       "correlated classical pair with a diagonal label system (no conditional independence)"},
      {"structured-suite", "50 seeded random structured draws: EPI, Stam and phi-flow checks"},
  };
}

ScenarioConfig bundled_scenario(const std::string& name) {
  if (name == "gaussian-equality") return gaussian_equality_config();
  if (name == "gaussian-equal-pair") return gaussian_equal_pair_config();
  if (name == "qubit-structured") return qubit_structured_config();
  if (name == "qubit-structured-n2") return qubit_structured_n2_config();
  if (name == "classical-diagonal") return classical_diagonal_config();
  if (name == "structured-suite") return structured_suite_config();
  throw ConfigInvalid(fmt::format("unknown bundled scenario '{}'", name));
}

}  // namespace qepi
