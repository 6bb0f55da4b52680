#pragma once

#include <string>
#include <vector>

#include "openkrotov/core.hpp"

namespace openkrotov {

/// Caveat attached to every rank report.
inline constexpr const char* kClosedSystemCaveat =
    "closed-system criterion only: with dissipation present, full Lie rank does not by itself "
    "establish controllability";

struct LieClosureReport {
  Index generated_dimension = 0;
  Index full_dimension = 0;  ///< d^2 - 1
  bool controllable = false;
  int generations = 0;       ///< commutator depth taken
  bool depth_cap_hit = false;
  /// Orthonormal (Hilbert-Schmidt) traceless Hermitian basis H_k of the
  /// generated algebra, which is spanned by the i H_k.
  std::vector<Matrix> basis;
};

/// Dimension of the Lie algebra generated by i H0 and i H_j, traceless parts
/// only. `depth_cap` <= 0 selects 2 d^2.
LieClosureReport lie_rank(const Matrix& h0, const std::vector<Matrix>& controls, int depth_cap = 0);

struct ConnectivityReport {
  std::vector<std::vector<Index>> adjacency;
  std::vector<std::vector<Index>> components;
};

/// Basis states a, b are adjacent iff some generator has |H_ab| > 1e-12.
ConnectivityReport connectivity_graph(const Matrix& h0, const std::vector<Matrix>& controls);

}  // namespace openkrotov
