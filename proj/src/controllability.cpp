#include "openkrotov/controllability.hpp"

#include <algorithm>
#include <numeric>

namespace openkrotov {

namespace {

constexpr double kRankThreshold = 1e-10;

Matrix traceless(const Matrix& h) {
  const Index d = h.rows();
  return h - Matrix::Identity(d, d) * (h.trace() / static_cast<double>(d));
}

// Real coordinates of a Hermitian matrix (real and imaginary parts of all
// entries). Hilbert-Schmidt inner products of Hermitian matrices are real, so
// Euclidean geometry here matches Tr{A B}.
Eigen::VectorXd coords(const Matrix& h) {
  const Index n = h.size();
  Eigen::VectorXd v(2 * n);
  for (Index k = 0; k < n; ++k) {
    v(k) = h.data()[k].real();
    v(n + k) = h.data()[k].imag();
  }
  return v;
}

Matrix from_coords(const Eigen::VectorXd& v, Index d) {
  const Index n = d * d;
  Matrix h(d, d);
  for (Index k = 0; k < n; ++k) h.data()[k] = Complex(v(k), v(n + k));
  return h;
}

class OrthonormalSet {
 public:
  /// Adds the component of `h` orthogonal to the span if it exceeds
  /// kRankThreshold * scale. The threshold is absolute on purpose: a
  /// commutator that vanishes up to roundoff must not be renormalized.
  bool add(const Matrix& h, double scale) {
    Eigen::VectorXd v = coords(0.5 * (h + h.adjoint()));
    // two Gram-Schmidt passes
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : vectors_) v -= q.dot(v) * q;
    }
    const double residual = v.norm();
    if (!(residual > kRankThreshold * scale)) return false;
    vectors_.push_back(v / residual);
    return true;
  }

  std::size_t size() const { return vectors_.size(); }
  const std::vector<Eigen::VectorXd>& vectors() const { return vectors_; }

 private:
  std::vector<Eigen::VectorXd> vectors_;
};

void validate(const Matrix& h0, const std::vector<Matrix>& controls) {
  const Index d = h0.rows();
  if (d < 1 || h0.cols() != d) throw DimensionError("drift must be square");
  auto check = [&](const Matrix& h) {
    if (h.rows() != d || h.cols() != d) throw DimensionError("generator dimension mismatch");
    if (hermiticity_defect(h) > kAlgebraTol) throw std::invalid_argument("generator is not Hermitian");
  };
  check(h0);
  for (const auto& c : controls) check(c);
}

}  // namespace

LieClosureReport lie_rank(const Matrix& h0, const std::vector<Matrix>& controls, int depth_cap) {
  validate(h0, controls);
  const Index d = h0.rows();
  if (depth_cap <= 0) depth_cap = static_cast<int>(2 * d * d);

  // Work with Hermitian H where the algebra element is iH:
  // [iA, iB] = i (-i [A, B]), so the Hermitian image of a commutator is -i[A, B].
  std::vector<Matrix> generators;
  generators.push_back(traceless(h0));
  for (const auto& c : controls) generators.push_back(traceless(c));

  LieClosureReport report;
  report.full_dimension = d * d - 1;

  double scale = 0.0;
  for (const auto& g : generators) scale = std::max(scale, g.norm());

  OrthonormalSet span;
  std::vector<Matrix> frontier;
  for (const auto& g : generators) {
    if (span.add(g, scale)) frontier.push_back(from_coords(span.vectors().back(), d));
  }
  const std::size_t full = static_cast<std::size_t>(report.full_dimension);
  while (!frontier.empty() && span.size() < full) {
    if (report.generations >= depth_cap) {
      report.depth_cap_hit = true;
      break;
    }
    ++report.generations;
    std::vector<Matrix> next;
    for (const auto& b : frontier) {
      for (const auto& g : generators) {
        const Matrix c = Complex(0, -1) * commutator(g, b);
        // frontier elements have unit norm, so |[g, b]| <= 2 |g|
        if (span.add(c, 2.0 * scale)) next.push_back(from_coords(span.vectors().back(), d));
        if (span.size() >= full) break;
      }
      if (span.size() >= full) break;
    }
    frontier = std::move(next);
  }

  report.generated_dimension = static_cast<Index>(span.size());
  report.controllable = report.generated_dimension == report.full_dimension;
  for (const auto& v : span.vectors()) report.basis.push_back(from_coords(v, d));
  return report;
}

ConnectivityReport connectivity_graph(const Matrix& h0, const std::vector<Matrix>& controls) {
  validate(h0, controls);
  const Index d = h0.rows();
  std::vector<const Matrix*> gens{&h0};
  for (const auto& c : controls) gens.push_back(&c);

  ConnectivityReport report;
  report.adjacency.resize(static_cast<std::size_t>(d));
  std::vector<Index> parent(static_cast<std::size_t>(d));
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (Index a = 0; a < d; ++a) {
    for (Index b = a + 1; b < d; ++b) {
      const bool coupled = std::any_of(gens.begin(), gens.end(), [&](const Matrix* h) {
        return std::abs((*h)(a, b)) > 1e-12 || std::abs((*h)(b, a)) > 1e-12;
      });
      if (!coupled) continue;
      report.adjacency[a].push_back(b);
      report.adjacency[b].push_back(a);
      parent[find(a)] = find(b);
    }
  }
  std::vector<std::vector<Index>> groups(static_cast<std::size_t>(d));
  for (Index a = 0; a < d; ++a) groups[find(a)].push_back(a);
  for (auto& g : groups) {
    if (!g.empty()) report.components.push_back(std::move(g));
  }
  std::sort(report.components.begin(), report.components.end());
  return report;
}

}  // namespace openkrotov
