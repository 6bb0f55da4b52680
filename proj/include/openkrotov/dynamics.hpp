#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "openkrotov/core.hpp"

namespace openkrotov {

/// Two interleaved grids: states live on t_i = i*dt (N+1 points), controls on
/// the midpoints t_i + dt/2 (N points). Control sample i governs [t_i, t_i+1].
class TimeGrid {
 public:
  TimeGrid(double t_final, Index n_steps);

  double t_final() const { return t_final_; }
  Index n_steps() const { return n_steps_; }
  double dt() const { return t_final_ / static_cast<double>(n_steps_); }
  double state_time(Index i) const { return static_cast<double>(i) * dt(); }
  double control_time(Index i) const { return (static_cast<double>(i) + 0.5) * dt(); }

  bool operator==(const TimeGrid&) const = default;

 private:
  double t_final_;
  Index n_steps_;
};

/// Piecewise-constant real controls sampled on the midpoint grid.
class ControlField {
 public:
  /// `samples` is (number of controls) x N.
  ControlField(TimeGrid grid, Eigen::MatrixXd samples);
  static ControlField zeros(TimeGrid grid, Index n_controls);

  const TimeGrid& grid() const { return grid_; }
  Index num_controls() const { return samples_.rows(); }
  const Eigen::MatrixXd& samples() const { return samples_; }

  /// Control values on interval i.
  std::span<const double> at(Index i) const {
    return {samples_.col(i).data(), static_cast<std::size_t>(samples_.rows())};
  }
  double operator()(Index control, Index i) const { return samples_(control, i); }
  void set(Index control, Index i, double value) { samples_(control, i) = value; }

 private:
  TimeGrid grid_;
  Eigen::MatrixXd samples_;
};

/// States (or co-states) on the state grid.
struct Trajectory {
  TimeGrid grid;
  std::vector<Matrix> states;
};

/// Column-stacking Liouville-space representation of a generator:
/// L(u) = L_0 + sum_j u_j L_j acting on vec(rho).
class Liouvillian {
 public:
  explicit Liouvillian(const LindbladGenerator& gen);

  Index hilbert_dim() const { return dim_; }
  std::size_t num_controls() const { return control_parts_.size(); }
  const Matrix& static_part() const { return static_part_; }
  const std::vector<Matrix>& control_parts() const { return control_parts_; }
  Matrix at(std::span<const double> u) const;

  /// Superoperator of the backward (adjoint) generator.
  Matrix adjoint_at(std::span<const double> u) const { return at(u).adjoint(); }

 private:
  Index dim_;
  Matrix static_part_;
  std::vector<Matrix> control_parts_;
};

/// Apply a d^2 x d^2 superoperator to a d x d operator.
Matrix apply_superoperator(const Matrix& super, const Matrix& op);
/// Apply the Hermitian adjoint of a superoperator.
Matrix apply_superoperator_adjoint(const Matrix& super, const Matrix& op);

/// exp(L(u) dt) for piecewise-constant control u.
Matrix step_propagator(const LindbladGenerator& gen, std::span<const double> u, double dt);
Matrix step_propagator(const Liouvillian& liou, std::span<const double> u, double dt);

/// One exact step propagator per control interval.
std::vector<Matrix> step_propagators(const Liouvillian& liou, const ControlField& field);

Trajectory propagate_forward(const LindbladGenerator& gen, const ControlField& field,
                             const Matrix& rho0);
Trajectory propagate_forward(const std::vector<Matrix>& propagators, const TimeGrid& grid,
                             const Matrix& rho0);

/// Integrates the adjoint equation from t = T down to t = 0. The stored
/// co-states satisfy Tr{sigma(t_i)^dagger rho(t_i)} = const for every forward
/// trajectory rho driven by the same field.
Trajectory propagate_backward(const LindbladGenerator& gen, const ControlField& field,
                              const Matrix& sigma_final);
Trajectory propagate_backward(const std::vector<Matrix>& propagators, const TimeGrid& grid,
                              const Matrix& sigma_final);

struct ObservableRow {
  double t = 0.0;
  std::vector<double> populations;
  double purity = 0.0;
  std::optional<double> fidelity;
};

/// One row per state-grid point. If `target` is given, the fidelity column is
/// Re Tr{rho(t) target}.
std::vector<ObservableRow> observables(const Trajectory& traj,
                                       const std::optional<Matrix>& target = std::nullopt);

/// CSV with header `t,p_0,...,p_{d-1},purity[,fidelity]`.
void write_observables_csv(std::ostream& out, const std::vector<ObservableRow>& rows);
std::vector<ObservableRow> read_observables_csv(std::istream& in);

/// CSV with header `t,re_00,im_00,re_01,...`, entries in row-major order.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

/// Pulse CSV with header `t,u_1[,u_2,...]` on the midpoint grid.
void write_pulse_csv(std::ostream& out, const ControlField& field);
/// Reads a pulse file; the grid is reconstructed from the midpoint times.
ControlField read_pulse_csv(std::istream& in);

}  // namespace openkrotov
