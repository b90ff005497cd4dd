#include "qepi/density_matrix.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numeric>

namespace qepi {

DensityMatrix DensityMatrix::validated(ComplexMatrix a) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    throw DimensionMismatch(fmt::format("expected a square matrix, got {}x{}", a.rows(), a.cols()));
  }
  const double herm = (a - a.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTol) {
    throw NotHermitian(fmt::format("max |A - A^dag| = {:.3e} exceeds {:.1e}", herm, kHermitianTol));
  }
  a = ((a + a.adjoint()) / 2.0).eval();

  const double tr = a.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) {
    throw TraceNotOne(fmt::format("|Tr - 1| = {:.3e} exceeds {:.1e}", std::abs(tr - 1.0), kTraceTol));
  }

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a);
  const Eigen::VectorXd evs = es.eigenvalues();
  const double min_ev = evs.minCoeff();
  if (min_ev < -kPsdTol) {
    throw NotPositive(fmt::format("smallest eigenvalue {:.3e} below -{:.1e}", min_ev, kPsdTol));
  }
  if (min_ev < 0.0 || evs.maxCoeff() > 1.0) {
    Eigen::VectorXd clamped = evs.cwiseMax(0.0).cwiseMin(1.0);
    a = es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().adjoint();
    a /= a.trace().real();
  } else if (std::abs(tr - 1.0) > 0.0) {
    a /= tr;
  }
  return DensityMatrix(std::move(a));
}

DensityMatrix DensityMatrix::maximally_mixed(int d) {
  return DensityMatrix(ComplexMatrix::Identity(d, d) / static_cast<double>(d));
}

DensityMatrix DensityMatrix::pure_z_up() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 1.0;
  return DensityMatrix(std::move(m));
}

int BlockStructure::total_dim() const {
  int d = 0;
  for (const auto& b : blocks) d += b.dim();
  return d;
}

std::vector<int> BlockStructure::block_dims() const {
  std::vector<int> dims;
  dims.reserve(blocks.size());
  for (const auto& b : blocks) dims.push_back(b.dim());
  return dims;
}

void hermitian_eigenvalues(const Eigen::Ref<const ComplexMatrix>& m, std::vector<double>& out) {
  const int d = static_cast<int>(m.rows());
  if (d == 1) {
    out.push_back(m(0, 0).real());
    return;
  }
  if (d == 2) {
    const double a = m(0, 0).real();
    const double c = m(1, 1).real();
    const double mean = 0.5 * (a + c);
    const double disc = std::hypot(0.5 * (a - c), std::abs(m(0, 1)));
    out.push_back(mean - disc);
    out.push_back(mean + disc);
    return;
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
  for (int k = 0; k < d; ++k) out.push_back(es.eigenvalues()[k]);
}

double entropy_from_eigenvalues(const std::vector<double>& eigs) {
  double s = 0.0;
  for (double ev : eigs) {
    if (ev < -kPsdTol) {
      throw NotPositive(fmt::format("eigenvalue {:.3e} below -{:.1e}", ev, kPsdTol));
    }
    if (ev > kEigenvalueClamp) s -= ev * std::log(ev);
  }
  return s;
}

double von_neumann_entropy(const DensityMatrix& rho) {
  std::vector<double> evs;
  evs.reserve(static_cast<std::size_t>(rho.dim()));
  hermitian_eigenvalues(rho.matrix(), evs);
  return entropy_from_eigenvalues(evs);
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  const int da = a.dim(), db = b.dim();
  ComplexMatrix out(da * db, da * db);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < da; ++j)
      out.block(i * db, j * db, db, db) = a.matrix()(i, j) * b.matrix();
  return DensityMatrix::trusted(std::move(out));
}

DensityMatrix direct_sum(const std::vector<double>& weights,
                         const std::vector<DensityMatrix>& parts,
                         const BlockStructure& structure) {
  if (weights.size() != parts.size() || weights.size() != structure.blocks.size()) {
    throw DimensionMismatch(fmt::format("direct_sum: {} weights, {} parts, {} blocks",
                                        weights.size(), parts.size(), structure.blocks.size()));
  }
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(wsum - 1.0) > 1e-12) {
    throw InvalidParameters(fmt::format("direct_sum: weights sum to {} (must be 1)", wsum));
  }
  const int d = structure.total_dim();
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  int offset = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const int bd = structure.blocks[i].dim();
    if (parts[i].dim() != bd) {
      throw DimensionMismatch(fmt::format("direct_sum: part {} has dim {}, block expects {}", i,
                                          parts[i].dim(), bd));
    }
    out.block(offset, offset, bd, bd) = weights[i] * parts[i].matrix();
    offset += bd;
  }
  return DensityMatrix::trusted(std::move(out));
}

}  // namespace qepi
