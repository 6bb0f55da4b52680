#include "openkrotov/dynamics.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "openkrotov/csv.hpp"
#include "openkrotov/expm.hpp"

namespace openkrotov {

TimeGrid::TimeGrid(double t_final, Index n_steps) : t_final_(t_final), n_steps_(n_steps) {
  if (!(t_final > 0.0) || !std::isfinite(t_final)) {
    throw std::invalid_argument("grid duration must be positive and finite");
  }
  if (n_steps < 1) throw std::invalid_argument("grid needs at least one time step");
}

ControlField::ControlField(TimeGrid grid, Eigen::MatrixXd samples)
    : grid_(grid), samples_(std::move(samples)) {
  if (samples_.cols() != grid_.n_steps()) {
    throw DimensionError("control field has " + std::to_string(samples_.cols()) +
                         " samples, grid has " + std::to_string(grid_.n_steps()) + " intervals");
  }
  if (!samples_.allFinite()) throw std::invalid_argument("control field has non-finite samples");
}

ControlField ControlField::zeros(TimeGrid grid, Index n_controls) {
  return ControlField(grid, Eigen::MatrixXd::Zero(n_controls, grid.n_steps()));
}

Liouvillian::Liouvillian(const LindbladGenerator& gen) : dim_(gen.dim()) {
  const Index d = dim_;
  const Matrix id = Matrix::Identity(d, d);
  const Complex minus_i(0, -1);
  // vec(A X B) = (B^T kron A) vec(X)
  auto hamiltonian_part = [&](const Matrix& h) -> Matrix {
    return minus_i * (kron(id, h) - kron(h.transpose(), id));
  };
  static_part_ = hamiltonian_part(gen.drift().matrix());
  for (const auto& ch : gen.channels()) {
    if (ch.rate == 0.0) continue;
    const Matrix& a = ch.op.matrix();
    const Matrix ada = a.adjoint() * a;
    static_part_ += ch.rate * (kron(a.conjugate(), a) - 0.5 * kron(id, ada) -
                               0.5 * kron(ada.transpose(), id));
  }
  for (const auto& c : gen.controls()) control_parts_.push_back(hamiltonian_part(c.matrix()));
}

Matrix Liouvillian::at(std::span<const double> u) const {
  if (u.size() != control_parts_.size()) {
    throw DimensionError("expected " + std::to_string(control_parts_.size()) +
                         " control values, got " + std::to_string(u.size()));
  }
  Matrix l = static_part_;
  for (std::size_t j = 0; j < u.size(); ++j) l += u[j] * control_parts_[j];
  return l;
}

Matrix apply_superoperator(const Matrix& super, const Matrix& op) {
  const Index d = op.rows();
  if (super.rows() != d * d || op.cols() != d) throw DimensionError("superoperator size mismatch");
  Matrix out(d, d);
  Eigen::Map<Vector>(out.data(), d * d) = super * Eigen::Map<const Vector>(op.data(), d * d);
  return out;
}

Matrix apply_superoperator_adjoint(const Matrix& super, const Matrix& op) {
  const Index d = op.rows();
  if (super.rows() != d * d || op.cols() != d) throw DimensionError("superoperator size mismatch");
  Matrix out(d, d);
  Eigen::Map<Vector>(out.data(), d * d) =
      super.adjoint() * Eigen::Map<const Vector>(op.data(), d * d);
  return out;
}

Matrix step_propagator(const Liouvillian& liou, std::span<const double> u, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  for (double x : u) {
    if (!std::isfinite(x)) throw std::domain_error("non-finite control value");
  }
  Matrix l = liou.at(u) * dt;
  if (!l.allFinite()) throw std::domain_error("non-finite generator entries");
  return expm(l);
}

Matrix step_propagator(const LindbladGenerator& gen, std::span<const double> u, double dt) {
  return step_propagator(Liouvillian(gen), u, dt);
}

std::vector<Matrix> step_propagators(const Liouvillian& liou, const ControlField& field) {
  if (static_cast<std::size_t>(field.num_controls()) != liou.num_controls()) {
    throw DimensionError("control field and generator disagree on the number of controls");
  }
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(field.grid().n_steps()));
  const double dt = field.grid().dt();
  for (Index i = 0; i < field.grid().n_steps(); ++i) {
    out.push_back(step_propagator(liou, field.at(i), dt));
  }
  return out;
}

Trajectory propagate_forward(const std::vector<Matrix>& propagators, const TimeGrid& grid,
                             const Matrix& rho0) {
  if (static_cast<Index>(propagators.size()) != grid.n_steps()) {
    throw DimensionError("propagator count differs from grid steps");
  }
  Trajectory traj{grid, {}};
  traj.states.reserve(propagators.size() + 1);
  traj.states.push_back(rho0);
  for (const auto& p : propagators) {
    traj.states.push_back(apply_superoperator(p, traj.states.back()));
  }
  return traj;
}

Trajectory propagate_forward(const LindbladGenerator& gen, const ControlField& field,
                             const Matrix& rho0) {
  if (rho0.rows() != gen.dim() || rho0.cols() != gen.dim()) {
    throw DimensionError("initial state dimension differs from generator dimension");
  }
  return propagate_forward(step_propagators(Liouvillian(gen), field), field.grid(), rho0);
}

Trajectory propagate_backward(const std::vector<Matrix>& propagators, const TimeGrid& grid,
                              const Matrix& sigma_final) {
  if (static_cast<Index>(propagators.size()) != grid.n_steps()) {
    throw DimensionError("propagator count differs from grid steps");
  }
  const std::size_t n = propagators.size();
  Trajectory traj{grid, std::vector<Matrix>(n + 1)};
  traj.states[n] = sigma_final;
  for (std::size_t i = n; i-- > 0;) {
    traj.states[i] = apply_superoperator_adjoint(propagators[i], traj.states[i + 1]);
  }
  return traj;
}

Trajectory propagate_backward(const LindbladGenerator& gen, const ControlField& field,
                              const Matrix& sigma_final) {
  if (sigma_final.rows() != gen.dim() || sigma_final.cols() != gen.dim()) {
    throw DimensionError("co-state dimension differs from generator dimension");
  }
  return propagate_backward(step_propagators(Liouvillian(gen), field), field.grid(),
                            sigma_final);
}

std::vector<ObservableRow> observables(const Trajectory& traj, const std::optional<Matrix>& target) {
  std::vector<ObservableRow> rows;
  rows.reserve(traj.states.size());
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const Matrix& rho = traj.states[i];
    ObservableRow row;
    row.t = traj.grid.state_time(static_cast<Index>(i));
    row.populations.resize(static_cast<std::size_t>(rho.rows()));
    for (Index k = 0; k < rho.rows(); ++k) row.populations[k] = rho(k, k).real();
    row.purity = (rho * rho).trace().real();
    if (target) row.fidelity = (rho * *target).trace().real();
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_observables_csv(std::ostream& out, const std::vector<ObservableRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("no observables to write");
  const bool has_fidelity = rows.front().fidelity.has_value();
  std::vector<std::string> header{"t"};
  for (std::size_t k = 0; k < rows.front().populations.size(); ++k) {
    header.push_back("p_" + std::to_string(k));
  }
  header.emplace_back("purity");
  if (has_fidelity) header.emplace_back("fidelity");
  csv::write_row(out, header);
  for (const auto& row : rows) {
    std::vector<double> values{row.t};
    values.insert(values.end(), row.populations.begin(), row.populations.end());
    values.push_back(row.purity);
    if (has_fidelity) values.push_back(row.fidelity.value_or(std::nan("")));
    csv::write_row(out, values);
  }
}

std::vector<ObservableRow> read_observables_csv(std::istream& in) {
  const csv::Table table = csv::read(in);
  const std::size_t purity_col = table.column("purity");
  const bool has_fidelity = table.header.back() == "fidelity";
  std::vector<ObservableRow> rows;
  for (const auto& cells : table.rows) {
    ObservableRow row;
    row.t = csv::parse_number(cells[0]);
    for (std::size_t k = 1; k < purity_col; ++k) row.populations.push_back(csv::parse_number(cells[k]));
    row.purity = csv::parse_number(cells[purity_col]);
    if (has_fidelity) row.fidelity = csv::parse_number(cells.back());
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  if (traj.states.empty()) throw std::invalid_argument("empty trajectory");
  const Index d = traj.states.front().rows();
  std::vector<std::string> header{"t"};
  for (Index k = 0; k < d; ++k) {
    for (Index l = 0; l < d; ++l) {
      const std::string idx = std::to_string(k) + std::to_string(l);
      header.push_back("re_" + idx);
      header.push_back("im_" + idx);
    }
  }
  csv::write_row(out, header);
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    std::vector<double> values{traj.grid.state_time(static_cast<Index>(i))};
    const Matrix& rho = traj.states[i];
    for (Index k = 0; k < d; ++k) {
      for (Index l = 0; l < d; ++l) {
        values.push_back(rho(k, l).real());
        values.push_back(rho(k, l).imag());
      }
    }
    csv::write_row(out, values);
  }
}

void write_pulse_csv(std::ostream& out, const ControlField& field) {
  std::vector<std::string> header{"t"};
  for (Index j = 0; j < field.num_controls(); ++j) header.push_back("u_" + std::to_string(j + 1));
  csv::write_row(out, header);
  for (Index i = 0; i < field.grid().n_steps(); ++i) {
    std::vector<double> values{field.grid().control_time(i)};
    for (Index j = 0; j < field.num_controls(); ++j) values.push_back(field(j, i));
    csv::write_row(out, values);
  }
}

ControlField read_pulse_csv(std::istream& in) {
  const csv::Table table = csv::read(in);
  if (table.header.size() < 2 || table.header[0] != "t") {
    throw std::runtime_error("pulse CSV must start with a 't' column and have at least one control");
  }
  const Index n = static_cast<Index>(table.rows.size());
  if (n == 0) throw std::runtime_error("pulse CSV has no samples");
  const Index nc = static_cast<Index>(table.header.size()) - 1;
  Eigen::MatrixXd samples(nc, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < nc; ++j) samples(j, i) = csv::parse_number(table.rows[i][j + 1]);
  }
  // Midpoints (i + 1/2) dt: first + last = N dt. Rounding T to the file's
  // precision makes write -> read -> write reproduce the time column.
  const double t_first = csv::parse_number(table.rows.front()[0]);
  const double t_last = csv::parse_number(table.rows.back()[0]);
  const double t_final = csv::parse_number(csv::format_number(t_first + t_last));
  return ControlField(TimeGrid(t_final, n), std::move(samples));
}

}  // namespace openkrotov
