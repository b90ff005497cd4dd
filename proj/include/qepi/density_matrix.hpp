#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "qepi/errors.hpp"

namespace qepi {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

// Numerical tolerances of the state algebra. Spectral decompositions of nearly
// pure states produce tiny negative eigenvalues; anything in
// [-kPsdTol, kEigenvalueClamp] counts as zero.
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kEigenvalueClamp = 1e-12;

/// Hermitian, positive semidefinite, unit-trace operator on C^d.
class DensityMatrix {
 public:
  /// Checks the three state invariants and returns the matrix as a state.
  /// Eigenvalues within kPsdTol of zero are clamped to [0, 1] and the trace
  /// renormalized. Throws NotHermitian / NotPositive / TraceNotOne with the
  /// violation magnitude.
  static DensityMatrix validated(ComplexMatrix a);

  /// Wraps a matrix that is valid by construction (no spectral check).
  static DensityMatrix trusted(ComplexMatrix a) { return DensityMatrix(std::move(a)); }

  int dim() const { return static_cast<int>(mat_.rows()); }
  const ComplexMatrix& matrix() const { return mat_; }

  static DensityMatrix maximally_mixed(int d);
  static DensityMatrix pure_z_up();  ///< qubit |0><0|

 private:
  explicit DensityMatrix(ComplexMatrix m) : mat_(std::move(m)) {}
  ComplexMatrix mat_;
};

/// Direct-sum layout of structured states: block i carries H_i^X (x) H_i^Y.
struct BlockStructure {
  struct Block {
    int dim_x = 1;
    int dim_y = 1;
    int dim() const { return dim_x * dim_y; }
  };
  std::vector<Block> blocks;

  int total_dim() const;
  std::vector<int> block_dims() const;  ///< sizes of the diagonal blocks
};

/// -sum_k lambda_k ln lambda_k over the spectrum, 0 ln 0 := 0. Result in [0, ln d].
double von_neumann_entropy(const DensityMatrix& rho);

/// Eigenvalues of a Hermitian matrix, ascending, appended to `out`.
/// Closed forms for d <= 2, Eigen solver above.
void hermitian_eigenvalues(const Eigen::Ref<const ComplexMatrix>& m, std::vector<double>& out);

/// Entropy of an eigenvalue list with the clamp rule; throws NotPositive below -kPsdTol.
double entropy_from_eigenvalues(const std::vector<double>& eigs);

/// Kronecker product; entropy is additive over the factors.
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

/// Block-diagonal assembly  ⊕_i r(i)·part_i.  Entropy obeys
/// S = H(r) + sum_i r(i) S(part_i), used as a test oracle.
DensityMatrix direct_sum(const std::vector<double>& weights,
                         const std::vector<DensityMatrix>& parts,
                         const BlockStructure& structure);

}  // namespace qepi
