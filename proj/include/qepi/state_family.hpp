#pragma once

#include <Eigen/Core>
#include <string>
#include <variant>

#include "qepi/density_matrix.hpp"
#include "qepi/grid.hpp"

namespace qepi {

// Declared parametric families for x -> rho(x). All are trace-norm continuous,
// a hypothesis every check here relies on for the conditional state map.

/// rho(x) = rho0.
struct ConstantFamily {
  DensityMatrix rho = DensityMatrix::maximally_mixed(1);
};

/// rho(x) = diag(softmax(w_m x + b_m)). A two-row instance with weights
/// {a, 0}, biases {b, 0} is the logistic family q(0|x) = logistic(ax + b).
struct DiagonalSoftmaxFamily {
  Eigen::VectorXd weight;
  Eigen::VectorXd bias;
};

/// Diagonal states tabulated per grid point (column x of `table` is q(.|x)).
struct DiagonalTableFamily {
  Eigen::MatrixXd table;  // d rows, axis.points columns
  Axis axis;
};

/// Qubit with Bloch vector (1-mu)(sin th, 0, cos th), th(x) = alpha*atan(beta x) + gamma.
/// Pure for mu = 0.
struct QubitBlochFamily {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 0.0;
  double mu = 0.0;
};

using StateFamily =
    std::variant<ConstantFamily, DiagonalSoftmaxFamily, DiagonalTableFamily, QubitBlochFamily>;

int family_dim(const StateFamily& f);
ComplexMatrix family_eval(const StateFamily& f, double x);

/// Bound C with ||rho(x) - rho(y)||_1 <= C |x - y| (table family: measured on its grid).
double family_lipschitz(const StateFamily& f);

/// Diagonal block sizes of the family's states ({1,...,1} for diagonal families).
std::vector<int> family_block_dims(const StateFamily& f);

/// Throws InvalidParameters when parameters leave the declared ranges.
void validate_family(const StateFamily& f);

std::string family_name(const StateFamily& f);

}  // namespace qepi
