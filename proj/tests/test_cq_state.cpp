#include "qepi/cq_state.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "qepi/entropy.hpp"
#include "test_support.hpp"

namespace qepi {
namespace {

using testing::classical_conditional_entropy;
using testing::diagonal_structured_state;
using testing::gaussian_entropy;
using testing::logistic_table;
using testing::overlap_sup_diff;
using testing::qubit_structured_state;

const Axis kAxis{-10.0, 10.0, 256};

TEST(StateFamily, QubitBlochAtOriginIsZUp) {
  QubitBlochFamily f{1.0, 1.0, 0.0, 0.0};
  ComplexMatrix m = family_eval(f, 0.0);
  EXPECT_NEAR(m(0, 0).real(), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(m(0, 1)), 0.0, 1e-14);
  EXPECT_NEAR(m(1, 1).real(), 0.0, 1e-14);
}

TEST(StateFamily, SoftmaxMatchesHandComputation) {
  DiagonalSoftmaxFamily f;
  f.weight = Eigen::Vector2d(1.0, 0.0);
  f.bias = Eigen::Vector2d(0.0, 0.0);
  const double x = 0.7;
  const double q0 = std::exp(x) / (std::exp(x) + 1.0);
  ComplexMatrix m = family_eval(StateFamily{f}, x);
  EXPECT_NEAR(m(0, 0).real(), q0, 1e-14);
  EXPECT_NEAR(m(1, 1).real(), 1.0 - q0, 1e-14);
}

TEST(StateFamily, RejectsBadParameters) {
  EXPECT_THROW(validate_family(StateFamily{QubitBlochFamily{1, 1, 0, 1.0}}), InvalidParameters);
  DiagonalSoftmaxFamily f;
  f.weight = Eigen::Vector2d(1.0, 0.0);
  f.bias = Eigen::VectorXd::Zero(3);
  EXPECT_THROW(validate_family(StateFamily{f}), InvalidParameters);
}

TEST(StateMap, ConstantMapAndContinuity) {
  ComplexMatrix rho0 = ComplexMatrix::Identity(2, 2) / 2.0;
  StateTable t = state_map(ConstantFamily{DensityMatrix::validated(rho0)}, kAxis);
  ASSERT_EQ(t.count, static_cast<std::size_t>(kAxis.points));
  for (std::size_t i = 0; i < t.count; i += 37) {
    EXPECT_NEAR((t.at(i) - rho0).cwiseAbs().maxCoeff(), 0.0, 1e-15);
  }
  // qubit map satisfies its Lipschitz continuity bound by construction
  EXPECT_NO_THROW(state_map(QubitBlochFamily{2.0, 2.0, 0.0, 0.1}, kAxis));
}

TEST(ProductState, JointMassAndZeroCmi) {
  CQState x = make_cq(gaussian_density(0.0, 1.0, kAxis), QubitBlochFamily{1, 1, 0, 0.2});
  CQState y = make_cq(gaussian_density(0.5, 1.5, kAxis), QubitBlochFamily{0.8, 1.2, 0.1, 0.3});
  CCQState s = make_product_ccq(x, y);
  EXPECT_NEAR(s.joint.mass(), 1.0, 1e-12);
  EXPECT_EQ(s.dim(), 4);
  EXPECT_NEAR(pair_entropies(s).cmi, 0.0, 1e-8);
}

TEST(ProductState, MarginalRecoversFactor) {
  CQState x = make_cq(gaussian_density(0.0, 1.0, kAxis), QubitBlochFamily{1, 1, 0, 0.2});
  CQState y = make_cq(gaussian_density(0.5, 1.5, kAxis), ConstantFamily{DensityMatrix::maximally_mixed(2)});
  CCQState s = make_product_ccq(x, y);
  CQState mx = marginal_x(s);
  EXPECT_NEAR((mx.density.values() - x.density.values()).abs().maxCoeff(), 0.0, 1e-12);
  // marginal states are rho_X(x) (x) rho_bar_Y; with maximally mixed Y factor
  // the X block content survives in the partial trace pattern
  EXPECT_EQ(mx.dim(), 4);
  EXPECT_NEAR(mx.density.mass(), 1.0, 1e-12);
}

TEST(Realize, SingleBlockConstantMapsIsProduct) {
  StructuredCIState s;
  s.blocks.push_back(StructuredBlock{1.0, gaussian_density(0.0, 1.0, kAxis),
                                     gaussian_density(0.0, 2.0, kAxis),
                                     ConstantFamily{DensityMatrix::maximally_mixed(2)},
                                     ConstantFamily{DensityMatrix::maximally_mixed(2)}});
  CCQState ccq = realize(s, kAxis, kAxis);
  EXPECT_NEAR(ccq.joint.mass(), 1.0, 1e-12);
  EXPECT_NEAR(pair_entropies(ccq).cmi, 0.0, 1e-10);
}

TEST(Realize, DiagonalBlocksMatchClassicalOracle) {
  StructuredCIState s = diagonal_structured_state(kAxis, kAxis);
  CCQState ccq = realize(s, kAxis, kAxis);
  const double quantum = pair_entropies(ccq).cmi;
  EXPECT_LE(std::abs(quantum), 1e-6);

  // all states are diagonal, so M is a classical 4-level label; rebuild the
  // table and compare against the classical conditional MI
  const int d = ccq.dim();
  Eigen::MatrixXd q(d, static_cast<Eigen::Index>(ccq.joint.grid().size()));
  for (std::size_t i = 0; i < ccq.states.count; ++i) {
    for (int m = 0; m < d; ++m) q(m, static_cast<Eigen::Index>(i)) = ccq.states.at(i)(m, m).real();
  }
  const double classical = testing::classical_cmi(ccq.joint, q);
  EXPECT_NEAR(quantum, classical, 1e-9);
}

TEST(Realize, QubitBlocksAreConditionallyIndependent) {
  StructuredCIState s;
  s.blocks.push_back(StructuredBlock{0.45, gaussian_density(-0.3, 1.0, kAxis),
                                     gaussian_density(0.4, 1.2, kAxis),
                                     QubitBlochFamily{1.0, 1.0, 0.0, 0.2},
                                     QubitBlochFamily{0.7, 1.4, 0.2, 0.35}});
  s.blocks.push_back(StructuredBlock{0.55, gaussian_density(0.6, 1.5, kAxis),
                                     gaussian_density(-0.5, 0.9, kAxis),
                                     QubitBlochFamily{1.3, 0.6, -0.2, 0.15},
                                     QubitBlochFamily{0.9, 1.0, 0.4, 0.5}});
  CCQState ccq = realize(s, kAxis, kAxis);
  EXPECT_EQ(ccq.dim(), 8);
  EXPECT_EQ(ccq.block_dims, (std::vector<int>{4, 4}));
  EXPECT_LE(std::abs(pair_entropies(ccq).cmi), 1e-6);
}

TEST(Realize, RejectsBadWeights) {
  StructuredCIState s = qubit_structured_state(kAxis, kAxis);
  s.blocks[0].weight = 0.9;
  EXPECT_THROW(realize(s, kAxis, kAxis), InvalidParameters);
}

TEST(Marginal, StructuredDensityMatchesMixture) {
  StructuredCIState s = diagonal_structured_state(kAxis, kAxis);
  CCQState ccq = realize(s, kAxis, kAxis);
  CQState mx = marginal_x(ccq);
  Eigen::ArrayXd expected = Eigen::ArrayXd::Zero(kAxis.points);
  for (const auto& b : s.blocks) expected += b.weight * b.density_x.values();
  EXPECT_NEAR((mx.density.values() - expected).abs().maxCoeff(), 0.0, 1e-12);
  EXPECT_NEAR(mx.density.mass(), 1.0, 1e-12);
}

TEST(SumPushforward, GaussianPairClosedForm) {
  const Axis fine{-10.0, 10.0, 1024};
  CQState x = trivial_cq(gaussian_density(0.0, 1.0, fine));
  CQState y = trivial_cq(gaussian_density(0.0, 1.0, fine));
  CQState sum = sum_pushforward(make_product_ccq(x, y));
  EXPECT_NEAR(sum.density.mass(), 1.0, 1e-12);
  EXPECT_NEAR(differential_entropy(sum.density), 1.765512, 2e-4);
  EXPECT_NEAR(density_variance(sum.density), 2.0, 1e-3);
}

TEST(SumPushforward, DeltaShift) {
  CQState x = make_cq(gaussian_density(0.0, 1.0, kAxis), QubitBlochFamily{1, 1, 0, 0.2});
  // Y concentrated in a single cell at y0
  Eigen::ArrayXd vy = Eigen::ArrayXd::Zero(kAxis.points);
  const int j0 = 170;
  vy[j0] = 1.0;
  CQState y = trivial_cq(GridDensity(Grid(kAxis), vy, /*renormalize=*/true));
  CQState sum = sum_pushforward(make_product_ccq(x, y));
  // the sum lattice is X's lattice translated by y0: values match at offset j0
  for (int i = 0; i < kAxis.points; i += 13) {
    EXPECT_NEAR(sum.density.values()[i + j0], x.density.values()[i], 1e-10);
  }
  const double y0 = kAxis.coord(j0);
  EXPECT_NEAR(density_mean(sum.density), density_mean(x.density) + y0, 1e-9);
}

TEST(SumPushforward, UniformsGiveTriangle) {
  const Axis unit{0.0, 1.0, 128};
  CQState x = trivial_cq(uniform_density(0.0, 1.0, unit));
  CQState y = trivial_cq(uniform_density(0.0, 1.0, unit));
  CQState sum = sum_pushforward(make_product_ccq(x, y));
  // discrete convolution oracle
  const double h = unit.step();
  for (int k = 0; k < 2 * unit.points - 1; k += 17) {
    double expected = 0.0;
    for (int i = 0; i < unit.points; ++i) {
      const int j = k - i;
      if (j >= 0 && j < unit.points) expected += x.density.values()[i] * y.density.values()[j] * h;
    }
    EXPECT_NEAR(sum.density.values()[k], expected, 1e-10);
  }
  EXPECT_NEAR(sum.density.mass(), 1.0, 1e-12);
}

TEST(SumPushforward, ResamplesUnequalSpacing) {
  CQState x = trivial_cq(gaussian_density(0.0, 1.0, Axis{-10.0, 10.0, 256}));
  CQState y = trivial_cq(gaussian_density(0.0, 1.0, Axis{-8.0, 8.0, 200}));
  CQState sum = sum_pushforward(make_product_ccq(x, y));
  EXPECT_NEAR(sum.density.mass(), 1.0, 1e-6);
  EXPECT_NEAR(differential_entropy(sum.density), gaussian_entropy(2.0), 5e-3);
}

TEST(AverageState, ConstantMapReturnsIt) {
  ComplexMatrix rho0(2, 2);
  rho0 << Complex(0.7, 0.0), Complex(0.1, 0.05), Complex(0.1, -0.05), Complex(0.3, 0.0);
  CQState s = make_cq(gaussian_density(0.0, 1.0, kAxis),
                      ConstantFamily{DensityMatrix::validated(rho0)});
  EXPECT_NEAR((average_state(s).matrix() - rho0).cwiseAbs().maxCoeff(), 0.0, 1e-12);
}

TEST(AverageState, SymmetricBlochAverageIsDiagonal) {
  // theta odd in x and the density even: the sin component integrates to zero
  CQState s = make_cq(gaussian_density(0.0, 1.0, kAxis), QubitBlochFamily{1.0, 1.0, 0.0, 0.2});
  DensityMatrix avg = average_state(s);
  EXPECT_NEAR(std::abs(avg.matrix()(0, 1)), 0.0, 1e-12);
}

TEST(AverageState, TwoPointMixture) {
  Eigen::ArrayXd v = Eigen::ArrayXd::Zero(kAxis.points);
  const int i1 = 60, i2 = 190;
  const double h = kAxis.step();
  v[i1] = 0.3 / h;
  v[i2] = 0.7 / h;
  QubitBlochFamily fam{1.0, 1.0, 0.0, 0.2};
  CQState s = make_cq(GridDensity(Grid(kAxis), v), fam);
  ComplexMatrix expected = 0.3 * family_eval(fam, kAxis.coord(i1)) +
                           0.7 * family_eval(fam, kAxis.coord(i2));
  EXPECT_NEAR((average_state(s).matrix() - expected).cwiseAbs().maxCoeff(), 0.0, 1e-12);
}

TEST(AverageState, MarginalAverageEqualsJointAverage) {
  CCQState ccq = realize(qubit_structured_state(kAxis, kAxis), kAxis, kAxis);
  ComplexMatrix via_joint = average_state(ccq).matrix();
  ComplexMatrix via_marginal = average_state(marginal_x(ccq)).matrix();
  EXPECT_NEAR((via_joint - via_marginal).cwiseAbs().maxCoeff(), 0.0, 1e-10);
}

TEST(EmbedClassical, IndependentTableGivesFullEntropy) {
  GridDensity p = gaussian_density(0.0, 1.0, kAxis);
  Eigen::MatrixXd q(2, kAxis.points);
  q.row(0).setConstant(0.3);
  q.row(1).setConstant(0.7);
  CQState s = embed_classical(q, p);
  EXPECT_NEAR(entropy_x_given_m(s), differential_entropy(p), 1e-12);
}

TEST(EmbedClassical, LogisticMatchesClassicalOracle) {
  GridDensity p = gaussian_density(0.0, 1.0, Axis{-10.0, 10.0, 1024});
  Eigen::MatrixXd q = logistic_table(p.grid().axes[0], 1.3, -0.2);
  CQState s = embed_classical(q, p);
  const double oracle = classical_conditional_entropy(q, p);
  EXPECT_NEAR(entropy_x_given_m(s), oracle, 1e-6);
}

TEST(EmbedClassical, DeterministicLabel) {
  GridDensity p = gaussian_density(0.0, 1.0, kAxis);
  Eigen::MatrixXd q(2, kAxis.points);
  for (int i = 0; i < kAxis.points; ++i) {
    const bool positive = kAxis.coord(i) >= 0.0;
    q(0, i) = positive ? 1.0 : 0.0;
    q(1, i) = positive ? 0.0 : 1.0;
  }
  CQState s = embed_classical(q, p);
  EXPECT_NEAR(entropy_m_given_x(s), 0.0, 1e-12);
  const double s_m = von_neumann_entropy(average_state(s));
  EXPECT_NEAR(entropy_x_given_m(s), differential_entropy(p) - s_m, 1e-12);
}

TEST(EmbedClassical, RejectsBadTable) {
  GridDensity p = gaussian_density(0.0, 1.0, kAxis);
  Eigen::MatrixXd q = Eigen::MatrixXd::Constant(2, kAxis.points, 0.3);
  EXPECT_THROW(embed_classical(q, p), NotAProbabilityTable);
}

TEST(RandomStructured, DeterministicGivenSeed) {
  std::mt19937_64 a(99), b(99);
  CCQState s1 = realize(random_structured_state(a, kAxis, kAxis), kAxis, kAxis);
  CCQState s2 = realize(random_structured_state(b, kAxis, kAxis), kAxis, kAxis);
  ASSERT_EQ(s1.dim(), s2.dim());
  EXPECT_NEAR((s1.joint.values() - s2.joint.values()).abs().maxCoeff(), 0.0, 0.0);
}

TEST(RandomStructured, DrawsAreConditionallyIndependent) {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 3; ++rep) {
    CCQState s = realize(random_structured_state(rng, kAxis, kAxis), kAxis, kAxis);
    EXPECT_LE(std::abs(pair_entropies(s).cmi), 1e-6);
  }
}

}  // namespace
}  // namespace qepi
