#include "openkrotov/core.hpp"

#include <cmath>

namespace openkrotov {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionError(std::string(what) + " must be a non-empty square matrix");
  }
}

void require_same_dim(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("operator dimensions differ: " + std::to_string(a.rows()) + " vs " +
                         std::to_string(b.rows()));
  }
}

}  // namespace

double hermiticity_defect(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

Matrix anticommutator(const Matrix& a, const Matrix& b) { return a * b + b * a; }

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix matrix_unit(Index d, Index k, Index l) {
  Matrix m = Matrix::Zero(d, d);
  m(k, l) = 1.0;
  return m;
}

namespace pauli {
Matrix identity(Index d) { return Matrix::Identity(d, d); }
Matrix x() {
  Matrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}
Matrix y() {
  Matrix m(2, 2);
  m << 0.0, Complex(0, -1), Complex(0, 1), 0.0;
  return m;
}
Matrix z() {
  Matrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}
}  // namespace pauli

OperatorMatrix::OperatorMatrix(Matrix m) : m_(std::move(m)) {
  require_square(m_, "operator");
}

OperatorMatrix OperatorMatrix::hermitian(Matrix m) {
  OperatorMatrix op(std::move(m));
  if (hermiticity_defect(op.m_) > kAlgebraTol) {
    throw std::invalid_argument("operator is not Hermitian");
  }
  op.hermitian_ = true;
  return op;
}

DensityOperator DensityOperator::physical(Matrix m) {
  require_square(m, "density operator");
  if (hermiticity_defect(m) > kAlgebraTol) {
    throw std::invalid_argument("density operator is not Hermitian");
  }
  if (std::abs(m.trace() - Complex(1.0)) > kAlgebraTol) {
    throw std::invalid_argument("density operator trace differs from one");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kSpectrumTol) {
    throw std::invalid_argument("density operator has a negative eigenvalue");
  }
  return DensityOperator(std::move(m), true);
}

DensityOperator DensityOperator::costate(Matrix m) {
  require_square(m, "co-state");
  if (hermiticity_defect(m) > kAlgebraTol) {
    throw std::invalid_argument("co-state is not Hermitian");
  }
  return DensityOperator(std::move(m), false);
}

DensityOperator DensityOperator::pure(Index d, Index k) {
  if (k < 0 || k >= d) throw std::out_of_range("basis index out of range");
  return DensityOperator(matrix_unit(d, k, k), true);
}

DensityOperator DensityOperator::maximally_mixed(Index d) {
  return DensityOperator(Matrix::Identity(d, d) / static_cast<double>(d), true);
}

LindbladGenerator::LindbladGenerator(OperatorMatrix drift, std::vector<OperatorMatrix> controls,
                                     std::vector<Channel> channels)
    : drift_(std::move(drift)), controls_(std::move(controls)), channels_(std::move(channels)) {
  const Index d = drift_.dim();
  for (const auto& c : controls_) {
    if (c.dim() != d) throw DimensionError("control operator dimension differs from drift");
  }
  for (const auto& ch : channels_) {
    if (ch.op.dim() != d) throw DimensionError("channel operator dimension differs from drift");
    if (!(ch.rate >= 0.0) || !std::isfinite(ch.rate)) {
      throw std::invalid_argument("channel rate must be finite and nonnegative");
    }
  }
}

Matrix LindbladGenerator::hamiltonian(std::span<const double> u) const {
  if (u.size() != controls_.size()) {
    throw DimensionError("expected " + std::to_string(controls_.size()) + " control values, got " +
                         std::to_string(u.size()));
  }
  Matrix h = drift_.matrix();
  for (std::size_t j = 0; j < u.size(); ++j) h += u[j] * controls_[j].matrix();
  return h;
}

Complex hilbert_schmidt_inner(const Matrix& a, const Matrix& b) {
  require_same_dim(a, b);
  // Tr{a^dagger b} = sum_ij conj(a_ij) b_ij
  return (a.conjugate().cwiseProduct(b)).sum();
}

double purity(const DensityOperator& rho) {
  return hilbert_schmidt_inner(rho.matrix(), rho.matrix()).real();
}

Matrix apply_dissipator(const LindbladGenerator& gen, const Matrix& rho) {
  if (rho.rows() != gen.dim() || rho.cols() != gen.dim()) {
    throw DimensionError("state dimension differs from generator dimension");
  }
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (const auto& ch : gen.channels()) {
    if (ch.rate == 0.0) continue;
    const Matrix& a = ch.op.matrix();
    const Matrix ada = a.adjoint() * a;
    out += ch.rate * (a * rho * a.adjoint() - 0.5 * anticommutator(ada, rho));
  }
  return out;
}

Matrix apply_liouvillian(const LindbladGenerator& gen, std::span<const double> u,
                         const Matrix& rho) {
  const Matrix h = gen.hamiltonian(u);
  return Complex(0, -1) * commutator(h, rho) + apply_dissipator(gen, rho);
}

}  // namespace openkrotov
