#pragma once

#include <json.hpp>

#include <memory>
#include <string>
#include <vector>

#include "qepi/cq_state.hpp"
#include "qepi/entropy.hpp"
#include "qepi/fisher.hpp"

namespace qepi {

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict v);

/// Machine-readable verdict for one inequality/identity. `deficit` is oriented
/// so deficit >= 0 means the statement holds; pass iff deficit >= -tolerance,
/// otherwise inconclusive when the refinement error bar covers the miss.
struct InequalityReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double deficit = 0.0;
  double tolerance = 0.0;
  double error_bar = 0.0;
  Verdict verdict = Verdict::pass;
  nlohmann::json grid;     ///< axes of the state the check ran on
  nlohmann::json details;  ///< lambda, traces, per-draw arrays, ...
  std::vector<std::string> notes;

  nlohmann::json to_json() const;
};

Verdict judge(double deficit, double tolerance, double error_bar);

/// phi(t) = S(X+Y+sqrt(t)Z|M) - λ S(X+sqrt(λt)Z1|M) - (1-λ) S(Y+sqrt((1-λ)t)Z2|M),
/// nonincreasing along the flow with limit -n(λlnλ+(1-λ)ln(1-λ))/2.
struct FlowTrace {
  double lambda = 0.5;
  std::vector<double> t;
  std::vector<double> entropy_sum;
  std::vector<double> entropy_x;
  std::vector<double> entropy_y;
  std::vector<double> phi;
  std::vector<double> slope;  ///< forward differences, nats per unit time
  double limit = 0.0;
};

struct CheckOptions {
  double tol_entropic = 1e-3;    ///< nats (relative for the entropy-power deficit)
  double tol_fisher_rel = 0.02;  ///< relative, Fisher-based checks
  double tol_ci = 1e-6;          ///< conditional-independence gate, nats
  double tol_equality = 1e-4;    ///< mutual-information chain, nats
  double phi_slope_tol = 1e-4;   ///< nats per unit time
  double concavity_tol = 1e-4;   ///< nats
  double asym_final_residual = 5e-3;
};

/// Shared derived data for every pair check: marginals, the sum variable,
/// entropies at two grid resolutions, cached Fisher estimates.
class PairAnalysis {
 public:
  explicit PairAnalysis(CCQState state, CheckOptions options = {});
  ~PairAnalysis();
  PairAnalysis(PairAnalysis&&) noexcept;

  const CCQState& state() const;
  const CheckOptions& options() const;
  const PairEntropies& entropies();
  double cmi_value();
  double cmi_error_bar();
  const CQState& margx();
  const CQState& margy();
  const CQState& sum();

  /// exp(2S(X+Y|M)/n) >= exp(2S(X|M)/n) + exp(2S(Y|M)/n); relative deficit.
  InequalityReport check_epi();
  /// S(X+Y|M) >= λS(X|M) + (1-λ)S(Y|M) - n(λlnλ+(1-λ)ln(1-λ))/2.
  InequalityReport check_linear_epi(double lambda);
  /// 1/J(X+Y|M) >= 1/J(X|M) + 1/J(Y|M); relative deficit with Fisher bars.
  InequalityReport check_stam();
  /// J(X+Y|M) <= λ² J(X|M) + (1-λ)² J(Y|M).
  InequalityReport check_linear_stam(double lambda);
  /// The four lines of the Stam-proof chain at finite t, relations (<=, =, <=, =);
  /// at t = 0 a single both-ends-vanish report. λ must be rational p/q, q <= 64.
  std::vector<InequalityReport> check_mi_chain(double lambda, double t);

  FlowTrace phi_flow_trace(double lambda, const std::vector<double>& t_grid);
  /// Nonincreasing phi, the large-t limit bound, and a Fisher spot check of phi'.
  InequalityReport check_phi_flow(double lambda, const std::vector<double>& t_grid);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Free-function forms; each builds a fresh analysis.
InequalityReport check_epi(const CCQState& s, const CheckOptions& opt = {});
InequalityReport check_linear_epi(const CCQState& s, double lambda, const CheckOptions& opt = {});
InequalityReport check_stam(const CCQState& s, const CheckOptions& opt = {});
InequalityReport check_linear_stam(const CCQState& s, double lambda,
                                   const CheckOptions& opt = {});
std::vector<InequalityReport> check_mi_chain(const CCQState& s, double lambda, double t,
                                             const CheckOptions& opt = {});
FlowTrace phi_flow(const CCQState& s, double lambda, const std::vector<double>& t_grid,
                   const CheckOptions& opt = {});

/// Second central differences of t -> S(X_t|M) stay below tolerance.
InequalityReport check_concavity(const CQState& s, const std::vector<double>& t_grid,
                                 const CheckOptions& opt = {});

/// S(X_t|M) - (n/2) ln(2πe t) -> 0: residuals decreasing in magnitude, final
/// one below the bound. t_list must span at least two decades.
InequalityReport check_asymptotic(const CQState& s, const std::vector<double>& t_list,
                                  const CheckOptions& opt = {});

/// Seeded randomized structured-state suite.
struct SuiteOptions {
  int draws = 50;
  std::uint64_t seed = 20180802;
  Axis axis_x{-10.0, 10.0, 256};
  Axis axis_y{-10.0, 10.0, 256};
  std::vector<double> stam_lambdas{0.0, 0.25, 0.5, 0.75, 1.0};
  double phi_lambda = 0.5;
  std::vector<double> phi_t_grid;  ///< default 13 points on [0, 6]
  CheckOptions checks;
};

struct SuiteResult {
  std::vector<InequalityReport> reports;
  int draws = 0;
  std::uint64_t seed = 0;
};

SuiteResult run_structured_suite(const SuiteOptions& opt);

}  // namespace qepi
