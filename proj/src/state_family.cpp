#include "qepi/state_family.hpp"

#include <fmt/format.h>

#include <cmath>

namespace qepi {

namespace {

Eigen::VectorXd softmax_probs(const DiagonalSoftmaxFamily& f, double x) {
  Eigen::VectorXd score = f.weight * x + f.bias;
  const double m = score.maxCoeff();
  Eigen::VectorXd p = (score.array() - m).exp();
  return p / p.sum();
}

Eigen::VectorXd table_probs(const DiagonalTableFamily& f, double x) {
  // Clamped linear interpolation between columns; convex mixes of probability
  // vectors stay probability vectors.
  const double h = f.axis.step();
  double u = (x - f.axis.lo) / h - 0.5;
  const int last = static_cast<int>(f.table.cols()) - 1;
  if (u <= 0.0) return f.table.col(0);
  if (u >= last) return f.table.col(last);
  const int i = static_cast<int>(u);
  const double w = u - i;
  return (1.0 - w) * f.table.col(i) + w * f.table.col(i + 1);
}

ComplexMatrix bloch_state(const QubitBlochFamily& f, double x) {
  const double th = f.alpha * std::atan(f.beta * x) + f.gamma;
  const double r = 1.0 - f.mu;
  const double rx = r * std::sin(th);
  const double rz = r * std::cos(th);
  ComplexMatrix m(2, 2);
  m(0, 0) = 0.5 * (1.0 + rz);
  m(1, 1) = 0.5 * (1.0 - rz);
  m(0, 1) = 0.5 * rx;
  m(1, 0) = 0.5 * rx;
  return m;
}

}  // namespace

int family_dim(const StateFamily& f) {
  return std::visit(
      [](const auto& fam) -> int {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, ConstantFamily>) return fam.rho.dim();
        if constexpr (std::is_same_v<T, DiagonalSoftmaxFamily>)
          return static_cast<int>(fam.weight.size());
        if constexpr (std::is_same_v<T, DiagonalTableFamily>)
          return static_cast<int>(fam.table.rows());
        if constexpr (std::is_same_v<T, QubitBlochFamily>) return 2;
      },
      f);
}

ComplexMatrix family_eval(const StateFamily& f, double x) {
  return std::visit(
      [x](const auto& fam) -> ComplexMatrix {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, ConstantFamily>) {
          return fam.rho.matrix();
        } else if constexpr (std::is_same_v<T, DiagonalSoftmaxFamily>) {
          const Eigen::VectorXcd q = softmax_probs(fam, x).template cast<Complex>();
          return q.asDiagonal();
        } else if constexpr (std::is_same_v<T, DiagonalTableFamily>) {
          const Eigen::VectorXcd q = table_probs(fam, x).template cast<Complex>();
          return q.asDiagonal();
        } else {
          return bloch_state(fam, x);
        }
      },
      f);
}

double family_lipschitz(const StateFamily& f) {
  return std::visit(
      [](const auto& fam) -> double {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, ConstantFamily>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, DiagonalSoftmaxFamily>) {
          // |dq_m/dx| = q_m |w_m - <w>| summed over m is at most 2 max|w|.
          return 2.0 * fam.weight.cwiseAbs().maxCoeff();
        } else if constexpr (std::is_same_v<T, DiagonalTableFamily>) {
          double c = 0.0;
          const double h = fam.axis.step();
          for (int j = 0; j + 1 < fam.table.cols(); ++j) {
            c = std::max(c, (fam.table.col(j + 1) - fam.table.col(j)).cwiseAbs().sum() / h);
          }
          return c;
        } else {
          // ||drho/dx||_1 = (1-mu)|th'(x)|, th' = alpha beta / (1 + (beta x)^2).
          return (1.0 - fam.mu) * std::abs(fam.alpha * fam.beta);
        }
      },
      f);
}

std::vector<int> family_block_dims(const StateFamily& f) {
  const int d = family_dim(f);
  if (std::holds_alternative<DiagonalSoftmaxFamily>(f) ||
      std::holds_alternative<DiagonalTableFamily>(f)) {
    return std::vector<int>(static_cast<std::size_t>(d), 1);
  }
  return {d};
}

void validate_family(const StateFamily& f) {
  std::visit(
      [](const auto& fam) {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, DiagonalSoftmaxFamily>) {
          if (fam.weight.size() < 1 || fam.weight.size() != fam.bias.size()) {
            throw InvalidParameters("diagonal_classical: weight/bias sizes mismatch");
          }
        } else if constexpr (std::is_same_v<T, DiagonalTableFamily>) {
          if (fam.table.cols() != fam.axis.points) {
            throw InvalidParameters(
                fmt::format("diagonal table has {} columns for a {}-point axis", fam.table.cols(),
                            fam.axis.points));
          }
          for (int j = 0; j < fam.table.cols(); ++j) {
            if (fam.table.col(j).minCoeff() < -1e-12 ||
                std::abs(fam.table.col(j).sum() - 1.0) > 1e-9) {
              throw NotAProbabilityTable(fmt::format("column {} is not a probability vector", j));
            }
          }
        } else if constexpr (std::is_same_v<T, QubitBlochFamily>) {
          if (!(fam.mu >= 0.0 && fam.mu < 1.0)) {
            throw InvalidParameters(fmt::format("qubit_bloch: mu = {} outside [0, 1)", fam.mu));
          }
        }
      },
      f);
}

std::string family_name(const StateFamily& f) {
  if (std::holds_alternative<ConstantFamily>(f)) return "constant";
  if (std::holds_alternative<QubitBlochFamily>(f)) return "qubit_bloch";
  return "diagonal_classical";
}

}  // namespace qepi
