#include "qepi/entropy.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "qepi/fisher.hpp"
#include "qepi/heat.hpp"
#include "test_support.hpp"

namespace qepi {
namespace {

using testing::classical_cmi;
using testing::classical_conditional_entropy;
using testing::gaussian_entropy;
using testing::logistic_table;
using testing::qubit_structured_state;

const Axis kAxis{-10.0, 10.0, 256};
const Axis kFine{-10.0, 10.0, 1024};

GridDensity correlated_gaussian(double rho, const Axis& ax, const Axis& ay) {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(2);
  Eigen::MatrixXd cov(2, 2);
  cov << 1.0, rho, rho, 1.0;
  return gaussian_density(mean, cov, Grid(ax, ay));
}

TEST(DifferentialEntropy, UniformAndGaussian) {
  EXPECT_NEAR(differential_entropy(uniform_density(0.0, 1.0, Axis{0.0, 1.0, 1024})), 0.0, 1e-6);
  EXPECT_NEAR(differential_entropy(gaussian_density(0.0, 1.0, Axis{-8, 8, 1024})), 1.418939,
              1e-4);
}

TEST(DifferentialEntropy, ScalingLaw) {
  // S(aX) = S(X) + ln a
  const double s1 = differential_entropy(gaussian_density(0.0, 1.0, kFine));
  const double s2 = differential_entropy(gaussian_density(0.0, 4.0, Axis{-20.0, 20.0, 2048}));
  EXPECT_NEAR(s2 - s1, std::log(2.0), 1e-6);
}

TEST(EntropyMGivenX, PureMapIsZero) {
  CQState s = make_cq(gaussian_density(0.0, 1.0, kAxis), QubitBlochFamily{1.0, 1.0, 0.0, 0.0});
  EXPECT_NEAR(entropy_m_given_x(s), 0.0, 1e-12);
}

TEST(EntropyMGivenX, ConstantMapGivesItsEntropy) {
  DensityMatrix rho0 = DensityMatrix::validated(ComplexMatrix::Identity(2, 2) / 2.0);
  CQState s = make_cq(gaussian_density(0.0, 1.0, kAxis), ConstantFamily{rho0});
  EXPECT_NEAR(entropy_m_given_x(s), std::log(2.0), 1e-12);
}

TEST(EntropyMGivenX, DiagonalLogisticMatchesClassicalSum) {
  GridDensity p = gaussian_density(0.0, 1.0, kFine);
  Eigen::MatrixXd q = logistic_table(kFine, 1.0, 0.0);
  CQState s = embed_classical(q, p);
  // classical oracle: integral of the binary entropy of q(.|x)
  double oracle = 0.0;
  for (int i = 0; i < kFine.points; ++i) {
    oracle += testing::shannon({q(0, i), q(1, i)}) * p.values()[i] * kFine.step();
  }
  EXPECT_NEAR(entropy_m_given_x(s), oracle, 1e-6);
}

TEST(EntropyXGivenM, TrivialConditionerGivesPlainEntropy) {
  CQState s = trivial_cq(gaussian_density(0.0, 1.0, kFine));
  EXPECT_NEAR(entropy_x_given_m(s), differential_entropy(s.density), 1e-12);
}

TEST(EntropyXGivenM, PureMapChainRule) {
  CQState s = make_cq(gaussian_density(0.0, 1.0, kAxis), QubitBlochFamily{1.0, 1.0, 0.0, 0.0});
  const double s_m = von_neumann_entropy(average_state(s));
  EXPECT_NEAR(entropy_x_given_m(s), differential_entropy(s.density) - s_m, 1e-12);
  EXPECT_GT(s_m, 0.1);  // the average of distinct pure states is mixed
}

TEST(EntropyXGivenM, LogisticEmbeddingMatchesClassicalDefinition) {
  GridDensity p = gaussian_density(0.0, 1.0, kFine);
  Eigen::MatrixXd q = logistic_table(kFine, 1.0, 0.0);
  CQState s = embed_classical(q, p);
  EXPECT_NEAR(entropy_x_given_m(s), classical_conditional_entropy(q, p), 1e-6);
}

TEST(EntropyXYGivenM, ProductWithTrivialConditioner) {
  CQState x = trivial_cq(gaussian_density(0.0, 1.0, kAxis));
  CQState y = trivial_cq(gaussian_density(0.0, 2.0, kAxis));
  CCQState s = make_product_ccq(x, y);
  EXPECT_NEAR(entropy_xy_given_m(s),
              differential_entropy(x.density) + differential_entropy(y.density), 1e-9);
}

TEST(EntropyXYGivenM, StructuredSplitsAsSum) {
  const Axis ax{-10.0, 10.0, 192};
  CCQState s = realize(qubit_structured_state(ax, ax), ax, ax);
  PairEntropies e = pair_entropies(s);
  EXPECT_NEAR(e.s_xy_given_m, e.s_x_given_m + e.s_y_given_m, 1e-8);
}

TEST(Cmi, ProductVanishes) {
  CQState x = make_cq(gaussian_density(0.0, 1.0, kAxis), QubitBlochFamily{1, 1, 0, 0.3});
  CQState y = make_cq(gaussian_density(0.0, 2.0, kAxis), QubitBlochFamily{1, 1, 0.2, 0.4});
  EXPECT_NEAR(pair_entropies(make_product_ccq(x, y)).cmi, 0.0, 1e-8);
}

TEST(Cmi, CorrelatedGaussianClosedForm) {
  GridDensity joint = correlated_gaussian(0.5, Axis{-8, 8, 512}, Axis{-8, 8, 512});
  CCQState s{joint, StateTable::filled(joint.grid().size(), ComplexMatrix::Identity(1, 1)),
             {1}, {}};
  CmiResult r = cmi(s);
  EXPECT_NEAR(r.value, 0.143841, 5e-4);  // -0.5 ln(1 - rho^2)
  EXPECT_LT(std::abs(r.value - 0.14384103622589045), r.error_bar + 5e-4);
}

TEST(Cmi, ChainRuleConsistencyOnClassicalStates) {
  // I(X:Y|M) via the joint-entropy grouping equals S(X|M) - S(X|YM) classically
  const Axis ax{-8.0, 8.0, 128};
  GridDensity joint = correlated_gaussian(0.4, ax, ax);
  Eigen::MatrixXd q(2, static_cast<Eigen::Index>(joint.grid().size()));
  for (int i = 0; i < ax.points; ++i) {
    for (int j = 0; j < ax.points; ++j) {
      const double u = 0.6 * ax.coord(i) - 0.4 * ax.coord(j);
      const double p0 = 1.0 / (1.0 + std::exp(-u));
      q(0, static_cast<Eigen::Index>(i) * ax.points + j) = p0;
      q(1, static_cast<Eigen::Index>(i) * ax.points + j) = 1.0 - p0;
    }
  }
  auto map = [&](double x, double y) {
    const double u = 0.6 * x - 0.4 * y;
    const double p0 = 1.0 / (1.0 + std::exp(-u));
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = p0;
    m(1, 1) = 1.0 - p0;
    return m;
  };
  CCQState s = make_ccq(joint, map, {1, 1});
  EXPECT_NEAR(pair_entropies(s).cmi, classical_cmi(joint, q), 1e-5);
}

TEST(Cmi, PositivityUpToErrorBar) {
  const Axis ax{-10.0, 10.0, 128};
  CCQState s = realize(qubit_structured_state(ax, ax), ax, ax);
  CmiResult r = cmi(s);
  EXPECT_GE(r.value, -r.error_bar);
}

TEST(Cmi, DataProcessingUnderHeatFlow) {
  const Axis ax{-8.0, 8.0, 128};
  GridDensity joint = correlated_gaussian(0.5, ax, ax);
  CCQState s{joint, StateTable::filled(joint.grid().size(), ComplexMatrix::Identity(1, 1)),
             {1}, {}};
  double last = pair_entropies(s).cmi;
  for (double t : {0.05, 0.2, 0.5}) {
    const double cur = pair_entropies(heat_evolve_ccq_x(s, t)).cmi;
    EXPECT_LE(cur, last + 1e-6);
    last = cur;
  }
}

TEST(Cmi, GridConvergenceMonotone) {
  std::vector<double> values;
  for (int g : {128, 256, 512}) {
    GridDensity joint = correlated_gaussian(0.5, Axis{-8, 8, g}, Axis{-8, 8, g});
    CCQState s{joint, StateTable::filled(joint.grid().size(), ComplexMatrix::Identity(1, 1)),
               {1}, {}};
    values.push_back(pair_entropies(s).cmi);
  }
  const double exact = -0.5 * std::log(1.0 - 0.25);
  EXPECT_GE(std::abs(values[0] - exact) + 1e-12, std::abs(values[1] - exact));
  EXPECT_GE(std::abs(values[1] - exact) + 1e-12, std::abs(values[2] - exact));
}

TEST(CmiWithNoise, ZeroTimeVanishes) {
  CQState s = make_cq(gaussian_density(0.0, 1.0, kAxis), QubitBlochFamily{1, 1, 0, 0.3});
  EXPECT_NEAR(cmi_with_noise(make_noise_bundle(s, 0.0)), 0.0, 1e-10);
}

TEST(CmiWithNoise, GaussianClosedForm) {
  CQState s = trivial_cq(gaussian_density(0.0, 1.0, kFine));
  const double value = cmi_with_noise(make_noise_bundle(s, 0.01));
  const double exact = 0.5 * std::log(1.01);
  EXPECT_NEAR(value, exact, 0.05 * exact);
}

TEST(CmiWithNoise, AgreesWithEntropyDifference) {
  CQState s = make_cq(gaussian_density(0.0, 1.2, kFine), QubitBlochFamily{1.1, 0.9, 0.1, 0.25});
  const double t = 0.02;
  const double via_bundle = cmi_with_noise(make_noise_bundle(s, t));
  const double via_flow = entropy_x_given_m(heat_evolve_cq(s, t)) - entropy_x_given_m(s);
  EXPECT_NEAR(via_bundle, via_flow, 1e-5);
}

TEST(PointwiseEntropy, FlaggedPointsContributeZero) {
  StateTable t = StateTable::filled(4, ComplexMatrix::Identity(2, 2) / 2.0);
  std::vector<std::uint8_t> flagged{0, 1, 0, 1};
  Eigen::ArrayXd se = pointwise_entropy(t, {2}, flagged);
  EXPECT_NEAR(se[0], std::log(2.0), 1e-14);
  EXPECT_EQ(se[1], 0.0);
}

TEST(PointwiseEntropy, BlockPartitionMatchesDense) {
  std::mt19937_64 rng(31);
  ComplexMatrix a = testing::random_density(rng, 2);
  ComplexMatrix b = testing::random_density(rng, 2);
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m.topLeftCorner(2, 2) = 0.4 * a;
  m.bottomRightCorner(2, 2) = 0.6 * b;
  StateTable t = StateTable::filled(1, m);
  const double with_blocks = pointwise_entropy(t, {2, 2}, {})[0];
  const double dense = pointwise_entropy(t, {4}, {})[0];
  EXPECT_NEAR(with_blocks, dense, 1e-12);
}

}  // namespace
}  // namespace qepi
