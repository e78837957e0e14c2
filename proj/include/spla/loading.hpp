#ifndef SPLA_LOADING_HPP
#define SPLA_LOADING_HPP

#include <cmath>
#include <string_view>

#include "spla/matrix.hpp"

namespace spla {

enum class LoadingSource { PenalizedDecomposition, ElasticNet, Eigenvectors, Manual };

constexpr std::string_view to_string(LoadingSource s) noexcept {
  switch (s) {
    case LoadingSource::PenalizedDecomposition: return "penalized_decomposition";
    case LoadingSource::ElasticNet: return "elastic_net";
    case LoadingSource::Eigenvectors: return "eigenvectors";
    case LoadingSource::Manual: return "manual";
  }
  return "unknown";
}

/// Columns of u are the loadings u_1..u_M. Entries with |u_ij| <= zero_tol
/// count as structural zeros.
struct LoadingMatrix {
  Matrix u;
  double zero_tol = 1e-9;
  LoadingSource source = LoadingSource::Manual;

  Index dim() const noexcept { return u.rows(); }
  bool in_support(Index i, Index j) const { return std::abs(u(i, j)) > zero_tol; }

  Index nonzero_count() const {
    Index n = 0;
    for (double x : u.data())
      if (std::abs(x) > zero_tol) ++n;
    return n;
  }
};

}  // namespace spla

#endif  // SPLA_LOADING_HPP
