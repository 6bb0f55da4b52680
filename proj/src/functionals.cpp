#include "openkrotov/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace openkrotov {

std::string to_string(BasisStrategy s) {
  switch (s) {
    case BasisStrategy::FullBasis: return "full";
    case BasisStrategy::Reduced3: return "reduced3";
    case BasisStrategy::DPlus1: return "dplus1";
    case BasisStrategy::DPlus2: return "dplus2";
  }
  return "unknown";
}

BasisStrategy basis_strategy_from_string(const std::string& s) {
  if (s == "full") return BasisStrategy::FullBasis;
  if (s == "reduced3") return BasisStrategy::Reduced3;
  if (s == "dplus1") return BasisStrategy::DPlus1;
  if (s == "dplus2") return BasisStrategy::DPlus2;
  throw std::invalid_argument("unknown basis strategy '" + s + "'");
}

namespace {

void require_dim(Index d) {
  if (d < 2) throw std::invalid_argument("basis construction needs d >= 2");
}

BasisSet with_normalizations(std::vector<Matrix> states) {
  BasisSet b{std::move(states), {}};
  for (const auto& s : b.states) b.normalizations.push_back((s * s).trace().real());
  return b;
}

Matrix phase_state(Index d) {
  return Matrix::Constant(d, d, Complex(1.0 / static_cast<double>(d), 0.0));
}

std::vector<Index> logical_indices(const GateTarget& gate) {
  if (!gate.logical.empty()) return gate.logical;
  std::vector<Index> idx(static_cast<std::size_t>(gate.gate.rows()));
  std::iota(idx.begin(), idx.end(), Index{0});
  return idx;
}

Matrix embed(const Matrix& m, const std::vector<Index>& logical, Index full_dim) {
  Matrix out = Matrix::Zero(full_dim, full_dim);
  for (std::size_t a = 0; a < logical.size(); ++a) {
    for (std::size_t b = 0; b < logical.size(); ++b) out(logical[a], logical[b]) = m(a, b);
  }
  return out;
}

Matrix restrict_to(const Matrix& m, const std::vector<Index>& logical) {
  const auto n = static_cast<Index>(logical.size());
  Matrix out(n, n);
  for (Index a = 0; a < n; ++a) {
    for (Index b = 0; b < n; ++b) out(a, b) = m(logical[a], logical[b]);
  }
  return out;
}

// Co-states on the logical subspace.
std::vector<Matrix> logical_costates(const GateTarget& gate, const BasisSet& basis) {
  const Matrix& o = gate.gate;
  const auto m = basis.states.size();
  const double d = static_cast<double>(o.rows());
  std::vector<Matrix> out;
  out.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    const Matrix image = o * basis.states[j] * o.adjoint();
    if (gate.basis == BasisStrategy::FullBasis) {
      // Average gate fidelity: the identity on diagonal units adds the trace
      // term, which is what makes a perfect gate score 1.
      Matrix sigma = image;
      if (basis.states[j].trace() != 0.0) sigma += Matrix::Identity(o.rows(), o.rows());
      out.push_back(sigma / (d * (d + 1.0)));
    } else {
      const double w = gate.weights.empty() ? 1.0 : gate.weights[j];
      out.push_back(image * (w / (static_cast<double>(m) * basis.normalizations[j])));
    }
  }
  return out;
}

}  // namespace

std::vector<double> basis_state_spectrum(Index d) {
  std::vector<double> lambda;
  const double dd = static_cast<double>(d);
  for (Index i = 1; i <= d; ++i) {
    lambda.push_back(2.0 * (dd + 1.0 - static_cast<double>(i)) / (dd * (dd + 1.0)));
  }
  return lambda;
}

BasisSet full_basis(Index d) {
  require_dim(d);
  std::vector<Matrix> states;
  for (Index k = 0; k < d; ++k) {
    for (Index l = 0; l < d; ++l) states.push_back(matrix_unit(d, k, l));
  }
  return with_normalizations(std::move(states));
}

BasisSet reduced3_basis(Index d) {
  require_dim(d);
  const auto lambda = basis_state_spectrum(d);
  Matrix basis_fixing = Matrix::Zero(d, d);
  for (Index i = 0; i < d; ++i) basis_fixing(i, i) = lambda[static_cast<std::size_t>(i)];
  return with_normalizations(
      {basis_fixing, phase_state(d), Matrix::Identity(d, d) / static_cast<double>(d)});
}

BasisSet dplus1_basis(Index d) {
  require_dim(d);
  std::vector<Matrix> states;
  for (Index i = 0; i < d; ++i) states.push_back(matrix_unit(d, i, i));
  states.push_back(phase_state(d));
  return with_normalizations(std::move(states));
}

BasisSet dplus2_basis(Index d) {
  BasisSet b = dplus1_basis(d);
  b.states.push_back(Matrix::Identity(d, d) / static_cast<double>(d));
  b.normalizations.push_back(1.0 / static_cast<double>(d));
  return b;
}

BasisSet make_basis(BasisStrategy strategy, Index d) {
  switch (strategy) {
    case BasisStrategy::FullBasis: return full_basis(d);
    case BasisStrategy::Reduced3: return reduced3_basis(d);
    case BasisStrategy::DPlus1: return dplus1_basis(d);
    case BasisStrategy::DPlus2: return dplus2_basis(d);
  }
  throw std::invalid_argument("unknown basis strategy");
}

double state_fidelity(const Matrix& final_state, const Matrix& target, double* imag_residual) {
  if (final_state.rows() != target.rows() || final_state.cols() != target.cols()) {
    throw DimensionError("state and target dimensions differ");
  }
  const Complex overlap = (final_state * target).trace();
  if (imag_residual) *imag_residual = std::abs(overlap.imag());
  return overlap.real();
}

void validate_gate(const GateTarget& gate, Index full_dim) {
  const Index d = gate.gate.rows();
  if (d < 2 || gate.gate.cols() != d) throw std::invalid_argument("gate must be square with d >= 2");
  const double defect = (gate.gate.adjoint() * gate.gate - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (defect > 1e-10) throw std::invalid_argument("gate target is not unitary");
  const auto logical = logical_indices(gate);
  if (static_cast<Index>(logical.size()) != d) {
    throw DimensionError("logical subspace has " + std::to_string(logical.size()) +
                         " indices but the gate has dimension " + std::to_string(d));
  }
  auto sorted = logical;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("logical indices must be distinct");
  }
  if (sorted.front() < 0 || sorted.back() >= full_dim) {
    throw std::out_of_range("logical index outside the Hilbert space");
  }
  if (!gate.weights.empty()) {
    if (gate.basis == BasisStrategy::FullBasis) {
      throw std::invalid_argument("weights are only supported for the reduced basis strategies");
    }
    const auto m = make_basis(gate.basis, d).states.size();
    if (gate.weights.size() != m) {
      throw DimensionError("expected " + std::to_string(m) + " weights, got " +
                           std::to_string(gate.weights.size()));
    }
    double sum = 0.0;
    for (double w : gate.weights) {
      if (!(w > 0.0)) throw std::invalid_argument("weights must be positive");
      sum += w;
    }
    if (std::abs(sum - static_cast<double>(m)) > 1e-10) {
      throw std::invalid_argument("weights must sum to the number of basis states");
    }
  }
}

std::vector<Matrix> target_costates(const ControlObjective& objective, const BasisSet& basis,
                                    Index full_dim) {
  if (const auto* s = std::get_if<StateToState>(&objective)) {
    if (s->target.rows() != full_dim) throw DimensionError("target dimension mismatch");
    return {s->target};
  }
  const auto& gate = std::get<GateTarget>(objective);
  validate_gate(gate, full_dim);
  if (basis.states.size() != make_basis(gate.basis, gate.gate.rows()).states.size()) {
    throw DimensionError("basis size does not match the gate's basis strategy");
  }
  const auto logical = logical_indices(gate);
  std::vector<Matrix> out;
  for (const auto& s : logical_costates(gate, basis)) out.push_back(embed(s, logical, full_dim));
  return out;
}

std::vector<Matrix> initial_states(const ControlObjective& objective, const BasisSet& basis,
                                   Index full_dim) {
  if (const auto* s = std::get_if<StateToState>(&objective)) {
    if (s->initial.rows() != full_dim) throw DimensionError("initial state dimension mismatch");
    return {s->initial};
  }
  const auto logical = logical_indices(std::get<GateTarget>(objective));
  std::vector<Matrix> out;
  for (const auto& s : basis.states) out.push_back(embed(s, logical, full_dim));
  return out;
}

FidelityValue gate_fidelity_detail(const GateTarget& gate, const std::vector<Matrix>& evolved) {
  const Index d = gate.gate.rows();
  const BasisSet basis = make_basis(gate.basis, d);
  if (evolved.size() != basis.states.size()) {
    throw DimensionError("expected " + std::to_string(basis.states.size()) +
                         " evolved basis states, got " + std::to_string(evolved.size()));
  }
  const auto logical = logical_indices(gate);
  const auto costates = logical_costates(gate, basis);
  Complex total = 0.0;
  for (std::size_t j = 0; j < evolved.size(); ++j) {
    const Matrix& e = evolved[j];
    const Matrix block = e.rows() == d ? e : restrict_to(e, logical);
    total += hilbert_schmidt_inner(costates[j], block);
  }
  return {total.real(), std::abs(total.imag())};
}

double gate_fidelity(const GateTarget& gate, const std::vector<Matrix>& evolved) {
  return gate_fidelity_detail(gate, evolved).value;
}

double pairing_functional(const std::vector<Matrix>& costates, const std::vector<Matrix>& finals) {
  if (costates.size() != finals.size()) throw DimensionError("co-state count mismatch");
  double f = 0.0;
  for (std::size_t j = 0; j < finals.size(); ++j) {
    f += hilbert_schmidt_inner(costates[j], finals[j]).real();
  }
  return f;
}

PreparedObjective prepare_objective(const ControlObjective& objective, Index full_dim) {
  PreparedObjective p;
  if (const auto* s = std::get_if<StateToState>(&objective)) {
    p.initial = {s->initial};
    p.costates = target_costates(objective, {}, full_dim);
    p.state_target = s->target;
    if (s->initial.rows() != full_dim) throw DimensionError("initial state dimension mismatch");
    return p;
  }
  const auto& gate = std::get<GateTarget>(objective);
  validate_gate(gate, full_dim);
  const BasisSet basis = make_basis(gate.basis, gate.gate.rows());
  p.initial = initial_states(objective, basis, full_dim);
  p.costates = target_costates(objective, basis, full_dim);
  return p;
}

}  // namespace openkrotov
