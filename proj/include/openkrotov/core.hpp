#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace openkrotov {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Tolerance for algebraic identities (Hermiticity, trace).
inline constexpr double kAlgebraTol = 1e-12;
/// Tolerance for spectral checks (eigenvalue positivity).
inline constexpr double kSpectrumTol = 1e-10;

/// Raised when operands have incompatible dimensions or counts.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Largest entrywise |M - M^dagger|.
double hermiticity_defect(const Matrix& m);

Matrix commutator(const Matrix& a, const Matrix& b);
Matrix anticommutator(const Matrix& a, const Matrix& b);
Matrix kron(const Matrix& a, const Matrix& b);

/// |k><l| in dimension d.
Matrix matrix_unit(Index d, Index k, Index l);

namespace pauli {
Matrix identity(Index d = 2);
Matrix x();
Matrix y();
Matrix z();
}  // namespace pauli

/// A dense d x d operator. The hermitian flag is a checked promise.
class OperatorMatrix {
 public:
  OperatorMatrix() = default;
  explicit OperatorMatrix(Matrix m);

  /// Throws std::invalid_argument unless `m` is Hermitian within kAlgebraTol.
  static OperatorMatrix hermitian(Matrix m);

  const Matrix& matrix() const { return m_; }
  Index dim() const { return m_.rows(); }
  bool is_hermitian() const { return hermitian_; }

 private:
  Matrix m_;
  bool hermitian_ = false;
};

/// Density operator or co-state.
///
/// Physical states are Hermitian, trace one and positive semidefinite.
/// Co-states keep Hermiticity but may carry any trace.
class DensityOperator {
 public:
  static DensityOperator physical(Matrix m);
  static DensityOperator costate(Matrix m);
  static DensityOperator pure(Index d, Index k);
  static DensityOperator maximally_mixed(Index d);

  const Matrix& matrix() const { return m_; }
  Index dim() const { return m_.rows(); }
  bool is_physical() const { return physical_; }

 private:
  DensityOperator(Matrix m, bool physical) : m_(std::move(m)), physical_(physical) {}
  Matrix m_;
  bool physical_;
};

struct Channel {
  OperatorMatrix op;
  double rate = 0.0;
};

/// Drift and control Hamiltonians (hbar = 1) plus Lindblad channels.
class LindbladGenerator {
 public:
  LindbladGenerator(OperatorMatrix drift, std::vector<OperatorMatrix> controls,
                    std::vector<Channel> channels);

  Index dim() const { return drift_.dim(); }
  std::size_t num_controls() const { return controls_.size(); }
  const OperatorMatrix& drift() const { return drift_; }
  const std::vector<OperatorMatrix>& controls() const { return controls_; }
  const std::vector<Channel>& channels() const { return channels_; }

  /// H0 + sum_j u_j H_j.
  Matrix hamiltonian(std::span<const double> u) const;

 private:
  OperatorMatrix drift_;
  std::vector<OperatorMatrix> controls_;
  std::vector<Channel> channels_;
};

/// Tr{a^dagger b}.
Complex hilbert_schmidt_inner(const Matrix& a, const Matrix& b);

/// Tr{rho^2}.
double purity(const DensityOperator& rho);

/// sum_k gamma_k (A rho A^dagger - 1/2 {A^dagger A, rho}).
Matrix apply_dissipator(const LindbladGenerator& gen, const Matrix& rho);

/// -i[H(u), rho] + dissipator(rho).
Matrix apply_liouvillian(const LindbladGenerator& gen, std::span<const double> u,
                         const Matrix& rho);

}  // namespace openkrotov
