#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "qepi/density_matrix.hpp"
#include "qepi/grid.hpp"
#include "qepi/state_family.hpp"

namespace qepi {

/// Contiguous storage for one d x d complex matrix per grid point
/// (column-major within a point).
struct StateTable {
  int dim = 1;
  std::size_t count = 0;
  std::vector<Complex> data;

  static StateTable zeros(std::size_t count, int dim);
  static StateTable filled(std::size_t count, const ComplexMatrix& m);

  Eigen::Map<const ComplexMatrix> at(std::size_t i) const {
    return {data.data() + i * static_cast<std::size_t>(dim) * dim, dim, dim};
  }
  Eigen::Map<ComplexMatrix> at(std::size_t i) {
    return {data.data() + i * static_cast<std::size_t>(dim) * dim, dim, dim};
  }
};

/// Classical-quantum state: p(x) on a 1D or 2D grid plus rho(x) per point.
/// `block_dims` records a diagonal block partition every state respects
/// (sum = dim); `flagged` marks zero-mass points carrying the placeholder
/// maximally mixed state.
struct CQState {
  GridDensity density;
  StateTable states;
  std::vector<int> block_dims;
  std::vector<std::uint8_t> flagged;

  int dim() const { return states.dim; }
  std::size_t size() const { return states.count; }
};

/// Classical-classical-quantum state of (X, Y, M): 2-axis grid, x-major layout.
struct CCQState {
  GridDensity joint;
  StateTable states;
  std::vector<int> block_dims;
  std::vector<std::uint8_t> flagged;

  int dim() const { return states.dim; }
  const Axis& axis_x() const { return joint.grid().axes[0]; }
  const Axis& axis_y() const { return joint.grid().axes[1]; }
};

/// The (X' = X + sqrt(t) Z, Z, M) joint used by the Fisher-information
/// estimators; axis 0 is X', axis 1 is Z.
struct NoiseBundle {
  CCQState state;
  double t = 0.0;
};

/// Direct-sum normal form of a conditionally independent (X, Y, M) state.
struct StructuredBlock {
  double weight = 1.0;
  GridDensity density_x;
  GridDensity density_y;
  StateFamily map_x;
  StateFamily map_y;
};

struct StructuredCIState {
  std::vector<StructuredBlock> blocks;

  BlockStructure structure() const;
  int total_dim() const;
};

/// Tabulates a family on an axis and checks trace-norm continuity between
/// adjacent points against the family's Lipschitz bound.
StateTable state_map(const StateFamily& family, const Axis& axis);

CQState make_cq(GridDensity density, const StateFamily& family);

/// Trivial quantum side (d = 1): conditional entropies reduce to classical ones.
CQState trivial_cq(GridDensity density);

/// CCQ state from an explicit map defined on every joint point.
CCQState make_ccq(GridDensity joint,
                  const std::function<ComplexMatrix(double, double)>& map,
                  std::vector<int> block_dims = {});

/// Product state rho(x, y) = rho_X(x) (x) rho_Y(y) with p(x, y) = p(x) p(y).
CCQState make_product_ccq(const CQState& x, const CQState& y);

/// Assembles rho(x,y) = ⊕_i r(i) p(x|i) p(y|i) rho_i^X(x) (x) rho_i^Y(y) / p(x,y)
/// with p(x,y) the mixture of the per-block product densities. Zero-mass points
/// get a flagged maximally mixed state.
CCQState realize(const StructuredCIState& s, const Axis& grid_x, const Axis& grid_y);

CQState marginal_x(const CCQState& s);
CQState marginal_y(const CCQState& s);

/// Law of S = X + Y with its conditional states; requires equal axis spacing
/// (Y is linearly resampled to X's spacing otherwise).
CQState sum_pushforward(const CCQState& s);

/// rho_bar = sum_x rho(x) p(x) h^n, validated.
DensityMatrix average_state(const CQState& s);
DensityMatrix average_state(const CCQState& s);

/// Diagonal embedding of a classical conditional table q(m|x) (d rows,
/// one column per grid point). All quantum functionals reduce to their
/// classical counterparts on the result.
CQState embed_classical(const Eigen::MatrixXd& q, const GridDensity& p);

/// Half-resolution copies for grid-refinement error bars.
CQState coarsen(const CQState& s);
CCQState coarsen(const CCQState& s);

/// Deterministic uniform in [0, 1) from raw generator bits (identical across
/// standard libraries, unlike std::uniform_real_distribution).
double uniform01(std::mt19937_64& rng);

/// Random structured state from the declared parameter ranges: N in {1,2},
/// factor dims in {1,2}, qubit_bloch maps on dim-2 factors, Gaussian block
/// densities.
StructuredCIState random_structured_state(std::mt19937_64& rng, const Axis& grid_x,
                                          const Axis& grid_y);

}  // namespace qepi
