#include "qepi/entropy.hpp"

#include <fmt/format.h>

#include <cmath>
#include <exception>

namespace qepi {

double differential_entropy(const GridDensity& p) {
  const double cell = p.grid().cell();
  double s = 0.0;
  const auto& v = p.values();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] > 0.0) s -= v[i] * std::log(v[i]);
  }
  return s * cell;
}

Eigen::ArrayXd pointwise_entropy(const StateTable& states, const std::vector<int>& block_dims,
                                 const std::vector<std::uint8_t>& flagged) {
  const std::size_t n = states.count;
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(n));
  if (states.dim == 1) return out;

  std::vector<int> blocks = block_dims;
  if (blocks.empty()) blocks = {states.dim};

  std::exception_ptr first_error = nullptr;
#ifdef _OPENMP
#pragma omp parallel
#endif
  {
    std::vector<double> evs;
    evs.reserve(static_cast<std::size_t>(states.dim));
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
      if (first_error) continue;
      const std::size_t idx = static_cast<std::size_t>(i);
      if (!flagged.empty() && flagged[idx]) continue;
      try {
        evs.clear();
        const auto m = states.at(idx);
        int off = 0;
        for (int b : blocks) {
          hermitian_eigenvalues(m.block(off, off, b, b), evs);
          off += b;
        }
        out[i] = entropy_from_eigenvalues(evs);
      } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
        {
          if (!first_error) first_error = std::current_exception();
        }
      }
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

double entropy_m_given_x(const CQState& s) {
  const Eigen::ArrayXd se = pointwise_entropy(s.states, s.block_dims, s.flagged);
  return (se * s.density.values()).sum() * s.density.grid().cell();
}

double entropy_x_given_m(const CQState& s) {
  const double s_m_given_x = entropy_m_given_x(s);
  const double s_x = differential_entropy(s.density);
  const double s_m = von_neumann_entropy(average_state(s));
  return s_m_given_x + s_x - s_m;
}

double entropy_m_given_xy(const CCQState& s) {
  const Eigen::ArrayXd se = pointwise_entropy(s.states, s.block_dims, s.flagged);
  return (se * s.joint.values()).sum() * s.joint.grid().cell();
}

double entropy_xy_given_m(const CCQState& s) {
  const double s_m_given_xy = entropy_m_given_xy(s);
  const double s_xy = differential_entropy(s.joint);
  const double s_m = von_neumann_entropy(average_state(s));
  return s_m_given_xy + s_xy - s_m;
}

PairEntropies pair_entropies(const CCQState& s) {
  PairEntropies e;
  e.s_m = von_neumann_entropy(average_state(s));
  e.s_xy = differential_entropy(s.joint);
  e.s_m_given_xy = entropy_m_given_xy(s);
  e.s_xy_given_m = e.s_m_given_xy + e.s_xy - e.s_m;

  const CQState mx = marginal_x(s);
  const CQState my = marginal_y(s);
  e.s_x = differential_entropy(mx.density);
  e.s_y = differential_entropy(my.density);
  e.s_m_given_x = entropy_m_given_x(mx);
  e.s_m_given_y = entropy_m_given_x(my);
  e.s_x_given_m = e.s_m_given_x + e.s_x - e.s_m;
  e.s_y_given_m = e.s_m_given_y + e.s_y - e.s_m;

  e.cmi = e.s_x_given_m + e.s_y_given_m - e.s_xy_given_m;
  return e;
}

CmiResult cmi(const CCQState& s) {
  const PairEntropies fine = pair_entropies(s);
  const PairEntropies coarse = pair_entropies(coarsen(s));
  return {fine.cmi, std::abs(fine.cmi - coarse.cmi) + 1e-12};
}

double cmi_with_noise(const NoiseBundle& bundle) { return pair_entropies(bundle.state).cmi; }

}  // namespace qepi
