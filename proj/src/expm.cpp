#include "openkrotov/expm.hpp"

#include <cmath>
#include <limits>

namespace openkrotov {

namespace {

struct Scaling {
  int squarings = 0;
  int degree = 1;
  double factor = 1.0;
};

double one_norm(const Matrix& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

// Pick s with ||A|| / 2^s <= 1/2, then the smallest Taylor degree whose
// remainder bound x^(m+1)/(m+1)! * e^x falls below unit roundoff.
Scaling choose_scaling(double norm, int extra_degree) {
  if (!std::isfinite(norm)) {
    throw std::domain_error("matrix exponential of a non-finite matrix");
  }
  Scaling s;
  if (norm > 0.5) s.squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  s.factor = std::ldexp(1.0, -s.squarings);
  const double x = norm * s.factor;
  const double eps = std::numeric_limits<double>::epsilon() / 2;
  int m = 1;
  double term = x * x / 2.0;  // x^(m+1)/(m+1)!
  while (term * std::exp(x) > eps && m < 30) {
    ++m;
    term *= x / (m + 1);
  }
  s.degree = m + extra_degree;
  return s;
}

}  // namespace

Matrix expm(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("matrix exponential needs a square matrix");
  const Index n = a.rows();
  if (n == 0) return a;
  const Scaling s = choose_scaling(one_norm(a), 0);
  const Matrix x = a * s.factor;
  const Matrix id = Matrix::Identity(n, n);
  Matrix p = id;
  for (int k = s.degree; k >= 1; --k) {
    p = id + (x * p) / static_cast<double>(k);
  }
  for (int i = 0; i < s.squarings; ++i) p = p * p;
  return p;
}

ExpmWithDerivatives expm_frechet(const Matrix& a, const std::vector<Matrix>& directions) {
  if (a.rows() != a.cols()) throw DimensionError("matrix exponential needs a square matrix");
  const Index n = a.rows();
  for (const auto& e : directions) {
    if (e.rows() != n || e.cols() != n) throw DimensionError("direction dimension mismatch");
  }
  double norm = one_norm(a);
  for (const auto& e : directions) {
    if (!std::isfinite(one_norm(e))) throw std::domain_error("non-finite Frechet direction");
  }
  const Scaling s = choose_scaling(norm, 1);
  const Matrix x = a * s.factor;
  const Matrix id = Matrix::Identity(n, n);

  std::vector<Matrix> y;
  y.reserve(directions.size());
  for (const auto& e : directions) y.push_back(e * s.factor);

  // Horner recursion on the pair (T_k, dT_k) of the truncated series.
  Matrix p = id;
  std::vector<Matrix> dp(directions.size(), Matrix::Zero(n, n));
  for (int k = s.degree; k >= 1; --k) {
    const double inv = 1.0 / static_cast<double>(k);
    for (std::size_t c = 0; c < y.size(); ++c) {
      dp[c] = (y[c] * p + x * dp[c]) * inv;
    }
    p = id + (x * p) * inv;
  }
  for (int i = 0; i < s.squarings; ++i) {
    for (auto& d : dp) d = p * d + d * p;
    p = p * p;
  }
  return {std::move(p), std::move(dp)};
}

}  // namespace openkrotov
