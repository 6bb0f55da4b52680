#pragma once

// Independent oracle for the Lie rank: enumerate every nested commutator
// [X_a1, [X_a2, ... X_ak]] of the generators up to the given depth, without
// pruning, and take the real rank of the collected matrices.

#include <Eigen/Dense>

#include "openkrotov/core.hpp"

namespace testutil {

inline Eigen::Index brute_force_lie_dimension(const openkrotov::Matrix& h0,
                                              const std::vector<openkrotov::Matrix>& controls,
                                              int depth) {
  using openkrotov::Complex;
  using openkrotov::Matrix;
  const Eigen::Index d = h0.rows();
  std::vector<Matrix> gens;
  auto traceless = [d](const Matrix& m) {
    return Matrix(m - m.trace() / double(d) * Matrix::Identity(d, d));
  };
  gens.push_back(Complex(0, 1) * traceless(h0));
  for (const auto& c : controls) gens.push_back(Complex(0, 1) * traceless(c));

  std::vector<Matrix> all = gens;
  std::vector<Matrix> level = gens;
  for (int k = 1; k <= depth; ++k) {
    std::vector<Matrix> next;
    for (const auto& g : gens)
      for (const auto& x : level) next.push_back(g * x - x * g);
    all.insert(all.end(), next.begin(), next.end());
    level = std::move(next);
  }
  Eigen::MatrixXd cols(2 * d * d, static_cast<Eigen::Index>(all.size()));
  for (std::size_t j = 0; j < all.size(); ++j) {
    for (Eigen::Index k = 0; k < d * d; ++k) {
      cols(k, j) = all[j](k).real();
      cols(d * d + k, j) = all[j](k).imag();
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cols);
  const auto& s = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > 1e-9 * std::max(1.0, s(0))) ++rank;
  }
  return rank;
}

}  // namespace testutil
