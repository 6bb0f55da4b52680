#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "openkrotov/core.hpp"

namespace openkrotov {

/// Which basis states are propagated to certify a gate.
enum class BasisStrategy {
  FullBasis,  ///< all d^2 matrix units E_kl
  Reduced3,   ///< non-degenerate diagonal state, uniform superposition, I/d
  DPlus1,     ///< d canonical projectors plus the uniform superposition
  DPlus2,     ///< DPlus1 plus I/d
};

std::string to_string(BasisStrategy s);
BasisStrategy basis_strategy_from_string(const std::string& s);

struct StateToState {
  Matrix initial;
  Matrix target;
};

/// Unitary target on a logical subspace of the full Hilbert space.
struct GateTarget {
  Matrix gate;
  BasisStrategy basis = BasisStrategy::Reduced3;
  std::vector<double> weights;  ///< empty means all ones
  std::vector<Index> logical;   ///< indices in the full space; empty means 0..d-1
};

using ControlObjective = std::variant<StateToState, GateTarget>;

struct BasisSet {
  std::vector<Matrix> states;
  std::vector<double> normalizations;  ///< Tr{rho_j^2}
};

BasisSet full_basis(Index d);
BasisSet reduced3_basis(Index d);
BasisSet dplus1_basis(Index d);
BasisSet dplus2_basis(Index d);
BasisSet make_basis(BasisStrategy strategy, Index d);

/// Eigenvalues 2(d+1-i)/(d(d+1)), i = 1..d, of the basis-fixing state.
std::vector<double> basis_state_spectrum(Index d);

/// Re Tr{final * target}; `imag_residual` receives |Im Tr{...}| when given.
double state_fidelity(const Matrix& final_state, const Matrix& target,
                      double* imag_residual = nullptr);

/// Throws unless the target is unitary, its logical indices are valid for a
/// space of dimension `full_dim`, and the weights match the strategy.
void validate_gate(const GateTarget& gate, Index full_dim);

/// Terminal co-states sigma_j(T) in the full space, such that the figure of
/// merit is Re sum_j Tr{sigma_j^dagger rho_j(T)}.
std::vector<Matrix> target_costates(const ControlObjective& objective, const BasisSet& basis,
                                    Index full_dim);

/// Initial states rho_j(0) embedded in the full space.
std::vector<Matrix> initial_states(const ControlObjective& objective, const BasisSet& basis,
                                   Index full_dim);

struct FidelityValue {
  double value = 0.0;
  double imag_residual = 0.0;
};

/// Gate figure of merit for forward-propagated images of the basis states
/// (full-space operators, restricted to the logical block).
///
/// FullBasis: average gate fidelity over the d^2 matrix units,
///   [Re sum_kl Tr{(O E_kl O^dagger)^dagger D(E_kl)} + Re sum_k Tr D(E_kk)] / (d (d + 1)).
/// For unitary V this is (|Tr O^dagger V|^2 + d) / (d (d + 1)).
/// Reduced3 / DPlus1 / DPlus2: (1/M) sum_j w_j Re Tr{(O rho_j O^dagger)^dagger D(rho_j)} / Tr{rho_j^2}.
FidelityValue gate_fidelity_detail(const GateTarget& gate, const std::vector<Matrix>& evolved);
double gate_fidelity(const GateTarget& gate, const std::vector<Matrix>& evolved);

/// Re sum_j Tr{sigma_j^dagger rho_j}.
double pairing_functional(const std::vector<Matrix>& costates, const std::vector<Matrix>& finals);

/// Everything the optimizer needs from an objective.
struct PreparedObjective {
  std::vector<Matrix> initial;
  std::vector<Matrix> costates;
  std::optional<Matrix> state_target;  ///< set for state-to-state objectives
};

PreparedObjective prepare_objective(const ControlObjective& objective, Index full_dim);

}  // namespace openkrotov
