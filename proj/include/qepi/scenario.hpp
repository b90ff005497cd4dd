#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "qepi/inequalities.hpp"

namespace qepi {

inline constexpr int kSchemaVersion = 1;

struct DensitySpec {
  std::string kind = "gaussian";  // gaussian | mixture | uniform
  double mean = 0.0;
  double variance = 1.0;
  std::vector<GaussianComponent> components;
  double lo = 0.0;
  double hi = 1.0;
};

struct FamilySpec {
  std::string name = "constant";  // constant | diagonal_classical | qubit_bloch
  std::vector<double> diag{1.0};  // constant: spectrum of rho0 (diagonal)
  double alpha = 1.0, beta = 1.0, gamma = 0.0, mu = 0.0;  // qubit_bloch
  std::vector<double> weight, bias;                       // diagonal_classical softmax
};

struct VariableSpec {
  DensitySpec density;
  FamilySpec family;
};

struct BlockSpec {
  double weight = 1.0;
  VariableSpec x, y;
};

struct PairSpec {
  std::string kind = "product";  // product | structured | classical_diagonal
  VariableSpec x, y;             // product
  std::vector<BlockSpec> blocks;  // structured
  // classical_diagonal: correlated Gaussian joint with a softmax label
  double correlation = 0.0;
  std::vector<double> weight_x, weight_y, bias;
};

struct CheckSpec {
  std::string name;  // epi | linear_epi | stam | linear_stam | mi_chain |
                     // concavity | asymptotic | phi_flow
  std::vector<double> lambdas;   // linear forms
  double lambda = 0.5;           // mi_chain / phi_flow
  std::vector<double> t_list;    // mi_chain / asymptotic
  double t_max = 10.0;           // concavity / phi_flow grids
  int t_points = 21;
  std::string variable = "x";    // concavity / asymptotic: x | y | sum
};

struct ScenarioConfig {
  int schema_version = kSchemaVersion;
  std::string name;
  std::string kind = "pair";  // pair | suite
  std::uint64_t seed = 1;
  Axis axis_x{-10.0, 10.0, 1024};
  Axis axis_y{-10.0, 10.0, 1024};
  PairSpec pair;
  int draws = 50;  // suite
  std::vector<double> stam_lambdas{0.0, 0.25, 0.5, 0.75, 1.0};
  double phi_lambda = 0.5;
  CheckOptions tolerances;
  std::vector<CheckSpec> checks;
};

ScenarioConfig parse_config(const nlohmann::json& j);
nlohmann::json config_to_json(const ScenarioConfig& c);
ScenarioConfig load_config_file(const std::string& path);

struct RunReport {
  int schema_version = kSchemaVersion;
  ScenarioConfig scenario;
  std::vector<InequalityReport> checks;
  nlohmann::json quantities;
  double wall_ms = 0.0;

  nlohmann::json to_json() const;
  int exit_code() const;  ///< 0 all pass, 2 any fail, 3 inconclusive only
};

/// Builds the scenario's state and executes its check list; a check that
/// throws is recorded as a failed report, never aborts the run.
RunReport run_verify(const ScenarioConfig& config);

/// Realizes the pair state of a pair-kind scenario (exposed for tests/tools).
CCQState build_pair_state(const ScenarioConfig& config);

struct SweepRow {
  double t = 0.0;
  double value = 0.0;
  double error_bar = 0.0;
};

/// entropy_flow: S(X_t|M); fisher_flow: J(X_t|M); phi: the proof functional.
std::vector<SweepRow> run_sweep(const ScenarioConfig& config, const std::string& quantity,
                                const std::vector<double>& t_grid);
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

struct ScenarioInfo {
  std::string name;
  std::string description;
};
std::vector<ScenarioInfo> list_scenarios();
ScenarioConfig bundled_scenario(const std::string& name);

}  // namespace qepi
