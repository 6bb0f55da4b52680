#pragma once

#include <vector>

#include "openkrotov/core.hpp"

namespace openkrotov {

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
///
/// The argument is scaled so its 1-norm is at most 1/2 and the series degree
/// is chosen from the scaled norm to reach double precision.
Matrix expm(const Matrix& a);

struct ExpmWithDerivatives {
  Matrix value;                     ///< exp(A)
  std::vector<Matrix> derivatives;  ///< d/de exp(A + e E_c) at e = 0, one per direction
};

/// exp(A) together with its Frechet derivatives along each direction E_c.
ExpmWithDerivatives expm_frechet(const Matrix& a, const std::vector<Matrix>& directions);

}  // namespace openkrotov
