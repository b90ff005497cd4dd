#include "qepi/inequalities.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

namespace qepi {
namespace {

using testing::qubit_structured_state;

constexpr double kTwoPiE = 17.0794684453471341;

const Axis kGauss{-14.0, 14.0, 1024};
const Axis kQubit{-10.0, 10.0, 192};

CCQState gaussian_pair(double var_x, double var_y, const Axis& ax) {
  CQState x = trivial_cq(gaussian_density(0.0, var_x, ax));
  CQState y = trivial_cq(gaussian_density(0.0, var_y, ax));
  return make_product_ccq(x, y);
}

CCQState correlated_classical_pair() {
  const Axis ax{-8.0, 8.0, 128};
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(2);
  Eigen::MatrixXd cov(2, 2);
  cov << 1.0, 0.5, 0.5, 1.0;
  GridDensity joint = gaussian_density(mean, cov, Grid(ax, ax));
  auto map = [](double x, double y) {
    const double p0 = 1.0 / (1.0 + std::exp(-(0.7 * x + 0.7 * y)));
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = p0;
    m(1, 1) = 1.0 - p0;
    return m;
  };
  return make_ccq(joint, map, {1, 1});
}

TEST(Judge, VerdictBoundaries) {
  EXPECT_EQ(judge(0.5, 1e-3, 1e-6), Verdict::pass);
  EXPECT_EQ(judge(-5e-4, 1e-3, 1e-6), Verdict::pass);
  EXPECT_EQ(judge(-2e-3, 1e-3, 1e-2), Verdict::inconclusive);
  EXPECT_EQ(judge(-2e-3, 1e-3, 1e-6), Verdict::fail);
}

TEST(Epi, GaussianEqualityCase) {
  PairAnalysis a(gaussian_pair(1.0, 4.0, kGauss));
  InequalityReport r = a.check_epi();
  EXPECT_EQ(r.verdict, Verdict::pass);
  EXPECT_LE(std::abs(r.deficit), 1e-3);
  // entropy powers are 2*pi*e*sigma^2
  EXPECT_NEAR(r.lhs, kTwoPiE * 5.0, 0.01 * kTwoPiE * 5.0);
  EXPECT_NEAR(r.rhs, kTwoPiE * 5.0, 0.01 * kTwoPiE * 5.0);
}

TEST(Epi, StructuredQubitPasses) {
  PairAnalysis a(realize(qubit_structured_state(kQubit, kQubit), kQubit, kQubit));
  InequalityReport r = a.check_epi();
  EXPECT_EQ(r.verdict, Verdict::pass);
  EXPECT_GE(r.deficit, -1e-3);
}

TEST(Epi, NearDeltaSecondVariable) {
  const Axis ax{-10.0, 10.0, 1024};
  CQState x = trivial_cq(gaussian_density(0.0, 1.0, ax));
  const double tiny = std::pow(4.5 * ax.step(), 2);
  CQState y = trivial_cq(gaussian_density(0.0, tiny, ax));
  PairAnalysis a(make_product_ccq(x, y));
  InequalityReport r = a.check_epi();
  EXPECT_EQ(r.verdict, Verdict::pass);
  // adding an independent variable cannot lower the conditional entropy
  EXPECT_GE(r.lhs, std::exp(2.0 * testing::gaussian_entropy(1.0)) - 1e-6);
}

TEST(Epi, RequiresConditionalIndependence) {
  PairAnalysis a(correlated_classical_pair());
  EXPECT_THROW(a.check_epi(), NotConditionallyIndependent);
}

TEST(LinearEpi, BoundaryLambdaZero) {
  PairAnalysis a(gaussian_pair(1.0, 2.0, kGauss));
  InequalityReport r = a.check_linear_epi(0.0);
  EXPECT_EQ(r.verdict, Verdict::pass);
  EXPECT_NEAR(r.rhs, a.entropies().s_y_given_m, 1e-12);
}

TEST(LinearEpi, EqualGaussiansSaturateAtHalf) {
  PairAnalysis a(gaussian_pair(1.0, 1.0, Axis{-10.0, 10.0, 1024}));
  InequalityReport r = a.check_linear_epi(0.5);
  EXPECT_EQ(r.verdict, Verdict::pass);
  EXPECT_NEAR(r.deficit, 0.0, 1e-3);
}

TEST(LinearEpi, LambdaSweepOnQubitScenario) {
  PairAnalysis a(realize(qubit_structured_state(kQubit, kQubit), kQubit, kQubit));
  for (double l : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    InequalityReport r = a.check_linear_epi(l);
    EXPECT_EQ(r.verdict, Verdict::pass) << "lambda = " << l;
  }
  EXPECT_THROW(a.check_linear_epi(1.2), InvalidParameters);
}

TEST(Stam, GaussianEquality) {
  PairAnalysis a(gaussian_pair(1.0, 2.0, kGauss));
  InequalityReport r = a.check_stam();
  EXPECT_EQ(r.verdict, Verdict::pass);
  EXPECT_NEAR(r.lhs, 6.0, 0.12);  // 1/J(X+Y) = 2(1+2)
  EXPECT_NEAR(r.rhs, 6.0, 0.12);  // 1/J(X) + 1/J(Y) = 2 + 4
  EXPECT_LE(std::abs(r.deficit), 0.02);
}

TEST(Stam, StructuredQubitNeverFails) {
  PairAnalysis a(realize(qubit_structured_state(kQubit, kQubit), kQubit, kQubit));
  InequalityReport r = a.check_stam();
  EXPECT_NE(r.verdict, Verdict::fail);
}

TEST(LinearStam, BoundaryLambdaOne) {
  // J(X+Y|M) <= J(X|M): independent noise cannot raise Fisher information
  PairAnalysis a(gaussian_pair(1.0, 2.0, kGauss));
  InequalityReport r = a.check_linear_stam(1.0);
  EXPECT_EQ(r.verdict, Verdict::pass);
  EXPECT_GT(r.deficit, 0.5);  // J(X) = 1/2 vs J(X+Y) = 1/6, heavily slack
}

TEST(MiChain, VanishesAtZeroTime) {
  PairAnalysis a(gaussian_pair(1.0, 1.0, Axis{-10.0, 10.0, 512}));
  auto reports = a.check_mi_chain(0.5, 0.0);
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_EQ(reports[0].verdict, Verdict::pass);
  EXPECT_LE(std::abs(reports[0].details["line1"].get<double>()), 1e-8);
  EXPECT_LE(std::abs(reports[0].details["line4"].get<double>()), 1e-8);
}

TEST(MiChain, GaussianClosedFormLines) {
  const double a_var = 1.0, b_var = 2.0, lambda = 0.5, t = 0.1;
  PairAnalysis a(gaussian_pair(a_var, b_var, kGauss));
  auto reports = a.check_mi_chain(lambda, t);
  ASSERT_EQ(reports.size(), 4u);
  for (const auto& r : reports) EXPECT_EQ(r.verdict, Verdict::pass) << r.name;

  const double l2 = lambda * lambda, m2 = (1.0 - lambda) * (1.0 - lambda);
  const double det = (a_var + l2 * t) * (b_var + m2 * t) - l2 * m2 * t * t;
  const double line1 = 0.5 * std::log(1.0 + t / (a_var + b_var));
  const double line2 = 0.5 * std::log(det / (a_var * b_var));
  const double line4 =
      0.5 * std::log((1.0 + l2 * t / a_var) * (1.0 + m2 * t / b_var));
  const auto& d = reports[0].details;
  EXPECT_NEAR(d["line1"].get<double>(), line1, 1e-5);
  EXPECT_NEAR(d["line2"].get<double>(), line2, 1e-5);
  EXPECT_NEAR(d["line3"].get<double>(), line4, 1e-5);
  EXPECT_NEAR(d["line4"].get<double>(), line4, 1e-5);
}

TEST(MiChain, QubitScenarioHoldsPattern) {
  PairAnalysis a(realize(qubit_structured_state(kQubit, kQubit), kQubit, kQubit));
  for (double t : {0.05, 0.1}) {
    for (const auto& r : a.check_mi_chain(0.5, t)) {
      EXPECT_EQ(r.verdict, Verdict::pass) << r.name << " at t = " << t;
    }
  }
}

TEST(MiChain, RejectsIrrationalLambda) {
  PairAnalysis a(gaussian_pair(1.0, 1.0, Axis{-10.0, 10.0, 512}));
  EXPECT_THROW(a.check_mi_chain(1.0 / M_PI, 0.1), InvalidParameters);
}

TEST(Concavity, GaussianSecondDifferencesMatchClosedForm) {
  CQState s = trivial_cq(gaussian_density(0.0, 1.0, Axis{-10.0, 10.0, 512}));
  std::vector<double> grid;
  for (int k = 0; k < 11; ++k) grid.push_back(k * 0.5);
  InequalityReport r = check_concavity(s, grid);
  EXPECT_EQ(r.verdict, Verdict::pass);
  const auto d2 = r.details["second_differences"].get<std::vector<double>>();
  for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
    const double expected = testing::gaussian_entropy(1.0 + grid[k + 1]) -
                            2.0 * testing::gaussian_entropy(1.0 + grid[k]) +
                            testing::gaussian_entropy(1.0 + grid[k - 1]);
    EXPECT_NEAR(d2[k - 1], expected, 1e-9);
  }
}

TEST(Concavity, ValidatesTimeGrid) {
  CQState s = trivial_cq(gaussian_density(0.0, 1.0, Axis{-10.0, 10.0, 256}));
  EXPECT_THROW(check_concavity(s, {0.0, 1.0, 2.0}), InvalidParameters);
  EXPECT_THROW(check_concavity(s, {0.0, 1.0, 2.0, 4.0, 8.0}), InvalidParameters);
}

TEST(Asymptotic, GaussianResidualClosedForm) {
  CQState s = trivial_cq(gaussian_density(0.0, 1.0, Axis{-10.0, 10.0, 512}));
  InequalityReport r = check_asymptotic(s, {10.0, 100.0, 1000.0});
  EXPECT_EQ(r.verdict, Verdict::pass);
  const auto res = r.details["residuals"].get<std::vector<double>>();
  EXPECT_NEAR(res[1], 0.5 * std::log(1.01), 0.1 * 0.5 * std::log(1.01));
  EXPECT_GT(std::abs(res[0]), std::abs(res[2]));
}

TEST(Asymptotic, RequiresTwoDecades) {
  CQState s = trivial_cq(gaussian_density(0.0, 1.0, Axis{-10.0, 10.0, 256}));
  EXPECT_THROW(check_asymptotic(s, {10.0, 50.0}), InvalidParameters);
}

TEST(PhiFlow, EqualGaussiansConstantTrace) {
  PairAnalysis a(gaussian_pair(1.0, 1.0, Axis{-10.0, 10.0, 1024}));
  std::vector<double> grid;
  for (int k = 0; k < 21; ++k) grid.push_back(k * 1.0);
  FlowTrace trace = a.phi_flow_trace(0.5, grid);
  EXPECT_NEAR(trace.limit, 0.5 * std::log(2.0), 1e-15);
  EXPECT_NEAR(trace.phi.front(), 0.346574, 1e-5);
  for (double v : trace.phi) EXPECT_NEAR(v, trace.phi.front(), 1e-3);
}

TEST(PhiFlow, QubitScenarioMonotoneTowardLimit) {
  PairAnalysis a(realize(qubit_structured_state(kQubit, kQubit), kQubit, kQubit));
  std::vector<double> grid;
  for (int k = 0; k < 13; ++k) grid.push_back(k * 1.0);
  InequalityReport r = a.check_phi_flow(0.5, grid);
  EXPECT_EQ(r.verdict, Verdict::pass);
  EXPECT_GE(r.details["phi0"].get<double>(), 0.5 * std::log(2.0) - 5e-3);
  EXPECT_GE(r.details["phi_final"].get<double>(), 0.5 * std::log(2.0) - 5e-3);
}

TEST(PhiFlow, LambdaZeroBoundary) {
  PairAnalysis a(gaussian_pair(1.0, 2.0, kGauss));
  std::vector<double> grid{0.0, 0.5, 1.0, 2.0, 4.0};
  FlowTrace trace = a.phi_flow_trace(0.0, grid);
  EXPECT_EQ(trace.limit, 0.0);
  for (double v : trace.phi) EXPECT_GE(v, -1e-9);
}

TEST(Suite, SmallRunPassesAndIsDeterministic) {
  SuiteOptions opt;
  opt.draws = 3;
  opt.seed = 424242;
  opt.stam_lambdas = {0.0, 0.5, 1.0};
  SuiteResult a = run_structured_suite(opt);
  SuiteResult b = run_structured_suite(opt);
  ASSERT_EQ(a.reports.size(), b.reports.size());
  for (std::size_t i = 0; i < a.reports.size(); ++i) {
    EXPECT_NE(a.reports[i].verdict, Verdict::fail) << a.reports[i].name;
    EXPECT_EQ(a.reports[i].deficit, b.reports[i].deficit) << a.reports[i].name;
  }
}

TEST(PhiFlow, StartValueEqualsLinearEpiDeficit) {
  // phi(0) - limit is exactly the linear entropy-power deficit at the same lambda
  PairAnalysis a(realize(qubit_structured_state(kQubit, kQubit), kQubit, kQubit));
  const double lambda = 0.25;
  FlowTrace trace = a.phi_flow_trace(lambda, {0.0, 0.5, 1.0});
  InequalityReport lin = a.check_linear_epi(lambda);
  EXPECT_NEAR(trace.phi.front() - trace.limit, lin.deficit, 1e-9);
}

TEST(Reports, AlgebraicLinkBetweenEpiForms) {
  // lhs >= rhs in the power form iff the linear form at lambda* is nonnegative
  PairAnalysis a(realize(qubit_structured_state(kQubit, kQubit), kQubit, kQubit));
  InequalityReport epi = a.check_epi();
  const double lambda_star = epi.details["lambda_star"].get<double>();
  InequalityReport lin = a.check_linear_epi(lambda_star);
  EXPECT_NEAR(lin.deficit, 0.5 * std::log(epi.lhs / epi.rhs), 1e-6);
  EXPECT_EQ(lin.deficit >= 0.0, epi.deficit >= 0.0);
}

}  // namespace
}  // namespace qepi
