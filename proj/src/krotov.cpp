#include "openkrotov/krotov.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "openkrotov/csv.hpp"
#include "openkrotov/expm.hpp"
#include "openkrotov/parallel.hpp"

namespace openkrotov {

namespace {

constexpr double kMonotoneSlack = 1e-12;

// Step propagator and its derivatives with respect to each control.
struct StepData {
  Matrix propagator;
  std::vector<Matrix> derivatives;
};

class Propagation {
 public:
  Propagation(const LindbladGenerator& gen, const TimeGrid& grid, bool derivatives)
      : liou_(gen), dt_(grid.dt()), derivatives_(derivatives) {
    for (const auto& c : liou_.control_parts()) scaled_controls_.push_back(c * dt_);
  }

  StepData step(std::span<const double> u) const {
    for (double x : u) {
      if (!std::isfinite(x)) throw std::domain_error("non-finite control value");
    }
    const Matrix l = liou_.at(u) * dt_;
    if (!derivatives_) return {expm(l), {}};
    auto r = expm_frechet(l, scaled_controls_);
    return {std::move(r.value), std::move(r.derivatives)};
  }

  std::vector<StepData> steps(const ControlField& field) const {
    std::vector<StepData> out;
    out.reserve(static_cast<std::size_t>(field.grid().n_steps()));
    for (Index i = 0; i < field.grid().n_steps(); ++i) out.push_back(step(field.at(i)));
    return out;
  }

  const Liouvillian& liouvillian() const { return liou_; }

 private:
  Liouvillian liou_;
  double dt_;
  bool derivatives_;
  std::vector<Matrix> scaled_controls_;
};

std::vector<Matrix> final_states(const std::vector<StepData>& steps,
                                 const std::vector<Matrix>& initial, std::size_t threads) {
  std::vector<Matrix> out(initial.size());
  parallel_for(initial.size(), threads, [&](std::size_t j) {
    Matrix rho = initial[j];
    for (const auto& s : steps) rho = apply_superoperator(s.propagator, rho);
    out[j] = std::move(rho);
  });
  return out;
}

// Backward pass. For StepExact, slot [i][c][j] holds D_{i,c}^dagger sigma_j(t_{i+1}) / dt;
// for Local, slot [i][0][j] holds sigma_j(t_i).
using CostateTable = std::vector<std::vector<std::vector<Matrix>>>;

CostateTable backward_pass(const std::vector<StepData>& steps, const std::vector<Matrix>& terminal,
                           GradientRule rule, std::size_t n_controls, double dt,
                           std::size_t threads) {
  const std::size_t n = steps.size();
  const std::size_t m = terminal.size();
  const std::size_t slots = rule == GradientRule::StepExact ? n_controls : 1;
  CostateTable table(n, std::vector<std::vector<Matrix>>(slots, std::vector<Matrix>(m)));
  parallel_for(m, threads, [&](std::size_t j) {
    Matrix sigma = terminal[j];
    for (std::size_t i = n; i-- > 0;) {
      if (rule == GradientRule::StepExact) {
        for (std::size_t c = 0; c < n_controls; ++c) {
          table[i][c][j] = apply_superoperator_adjoint(steps[i].derivatives[c], sigma) / dt;
        }
      }
      sigma = apply_superoperator_adjoint(steps[i].propagator, sigma);
      if (rule == GradientRule::Local) table[i][0][j] = sigma;
    }
  });
  return table;
}

double clamp_control(double u, const std::optional<double>& bound) {
  if (!bound) return u;
  return std::clamp(u, -*bound, *bound);
}

bool is_constant(const std::vector<double>& s) {
  if (s.empty()) return true;
  const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
  return *hi - *lo <= 1e-12;
}

}  // namespace

double ShapeFunction::operator()(double t, double t_final) const {
  switch (kind) {
    case Kind::SinSquared: {
      const double s = std::sin(std::numbers::pi * t / t_final);
      return s * s;
    }
    case Kind::FlatWithRamps: {
      const double ramp = ramp_fraction * t_final;
      auto edge = [&](double x) {
        const double s = std::sin(0.5 * std::numbers::pi * x / ramp);
        return s * s;
      };
      if (t <= 0.0 || t >= t_final) return 0.0;
      if (t < ramp) return edge(t);
      if (t > t_final - ramp) return edge(t_final - t);
      return 1.0;
    }
    case Kind::Tabulated: {
      if (samples.empty()) throw std::invalid_argument("tabulated shape has no samples");
      const auto n = static_cast<double>(samples.size());
      auto i = static_cast<std::size_t>(std::clamp(std::floor(t / t_final * n), 0.0, n - 1.0));
      return samples[i];
    }
  }
  return 0.0;
}

std::vector<double> ShapeFunction::on_grid(const TimeGrid& grid) const {
  if (kind == Kind::Tabulated) {
    if (static_cast<Index>(samples.size()) != grid.n_steps()) {
      throw DimensionError("tabulated shape needs one value per control interval");
    }
    return samples;
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(grid.n_steps()));
  for (Index i = 0; i < grid.n_steps(); ++i) {
    out.push_back((*this)(grid.control_time(i), grid.t_final()));
  }
  return out;
}

void validate(const KrotovOptions& o) {
  if (!(o.lambda > 0.0) || !std::isfinite(o.lambda)) {
    throw std::invalid_argument("lambda must be positive");
  }
  if (o.max_iterations < 0) throw std::invalid_argument("max_iterations must be >= 0");
  if (!(o.fidelity_goal > 0.0 && o.fidelity_goal <= 1.0)) {
    throw std::invalid_argument("fidelity_goal must lie in (0, 1]");
  }
  if (!(o.delta_f_tolerance >= 0.0)) throw std::invalid_argument("delta_f_tolerance must be >= 0");
  if (o.shape.kind == ShapeFunction::Kind::FlatWithRamps &&
      !(o.shape.ramp_fraction > 0.0 && o.shape.ramp_fraction <= 0.5)) {
    throw std::invalid_argument("ramp_fraction must lie in (0, 0.5]");
  }
  for (double s : o.shape.samples) {
    if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("shape samples must lie in [0, 1]");
  }
  if (o.amplitude_bound && !(*o.amplitude_bound > 0.0)) {
    throw std::invalid_argument("amplitude bound must be positive");
  }
  if (o.threads < 0) throw std::invalid_argument("threads must be >= 0");
  if (o.max_rejections < 0) throw std::invalid_argument("max_rejections must be >= 0");
}

double local_update(const Matrix& sigma, const Matrix& rho, const Matrix& control_op, double shape,
                    double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  return shape / lambda * hilbert_schmidt_inner(sigma, commutator(control_op, rho)).imag();
}

double evaluate_objective(const LindbladGenerator& gen, const ControlObjective& objective,
                          const ControlField& field) {
  const PreparedObjective prepared = prepare_objective(objective, gen.dim());
  const Propagation prop(gen, field.grid(), false);
  if (static_cast<std::size_t>(field.num_controls()) != gen.num_controls()) {
    throw DimensionError("control field and generator disagree on the number of controls");
  }
  const auto finals = final_states(prop.steps(field), prepared.initial, 1);
  return pairing_functional(prepared.costates, finals);
}

Eigen::MatrixXd control_gradient(const LindbladGenerator& gen, const ControlObjective& objective,
                                 const ControlField& field) {
  const PreparedObjective prepared = prepare_objective(objective, gen.dim());
  const Propagation prop(gen, field.grid(), true);
  const auto steps = prop.steps(field);
  const double dt = field.grid().dt();
  const auto nc = gen.num_controls();
  const auto table =
      backward_pass(steps, prepared.costates, GradientRule::StepExact, nc, dt, 1);
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(static_cast<Index>(nc), field.grid().n_steps());
  std::vector<Matrix> rho = prepared.initial;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    for (std::size_t c = 0; c < nc; ++c) {
      double g = 0.0;
      for (std::size_t j = 0; j < rho.size(); ++j) {
        g += hilbert_schmidt_inner(table[i][c][j], rho[j]).real();
      }
      grad(static_cast<Index>(c), static_cast<Index>(i)) = g * dt;
    }
    for (auto& r : rho) r = apply_superoperator(steps[i].propagator, r);
  }
  return grad;
}

OptimizationRecord krotov_iterate(const LindbladGenerator& gen, const ControlObjective& objective,
                                  const ControlField& guess, const KrotovOptions& options,
                                  const std::optional<SpectralSpec>& constraint) {
  using Clock = std::chrono::steady_clock;
  validate(options);
  if (static_cast<std::size_t>(guess.num_controls()) != gen.num_controls()) {
    throw DimensionError("guess and generator disagree on the number of controls");
  }
  const PreparedObjective prepared = prepare_objective(objective, gen.dim());
  const TimeGrid& grid = guess.grid();
  const std::size_t n = static_cast<std::size_t>(grid.n_steps());
  const std::size_t nc = gen.num_controls();
  const double dt = grid.dt();
  const std::size_t threads = resolve_threads(options.threads);
  const bool exact = options.gradient == GradientRule::StepExact;
  const Propagation prop(gen, grid, exact);
  const std::vector<double> shape = options.shape.on_grid(grid);

  std::optional<SpectralFilter> filter;
  if (constraint) filter = SpectralFilter::from_spec(*constraint, grid);

  OptimizationRecord rec{.iterations = {}, .field = guess, .converged = false, .reason = {}};
  rec.constraint_warning = filter.has_value() && !is_constant(shape);

  auto start = Clock::now();
  std::vector<StepData> steps = prop.steps(guess);
  double fidelity = pairing_functional(prepared.costates, final_states(steps, prepared.initial, threads));
  rec.iterations.push_back({0, fidelity, 0.0, 0.0, 0.0,
                            std::chrono::duration<double>(Clock::now() - start).count(),
                            options.lambda, true});
  if (fidelity >= options.fidelity_goal) {
    rec.converged = true;
    rec.reason = "fidelity goal reached";
    return rec;
  }

  double lambda = options.lambda;
  const auto& controls = gen.controls();
  int iteration = 1;
  int rejections = 0;
  while (iteration <= options.max_iterations) {
    start = Clock::now();
    const CostateTable table = backward_pass(steps, prepared.costates, options.gradient, nc, dt, threads);

    // Sequential sweep: each interval's update uses the already-updated states.
    ControlField updated = rec.field;
    std::vector<StepData> new_steps;
    new_steps.reserve(n);
    std::vector<Matrix> rho = prepared.initial;
    std::string failure;
    for (std::size_t i = 0; i < n && failure.empty(); ++i) {
      const auto ii = static_cast<Index>(i);
      for (std::size_t c = 0; c < nc; ++c) {
        double du = 0.0;
        for (std::size_t j = 0; j < rho.size(); ++j) {
          if (exact) {
            du += shape[i] / lambda * hilbert_schmidt_inner(table[i][c][j], rho[j]).real();
          } else {
            du += local_update(table[i][0][j], rho[j], controls[c].matrix(), shape[i], lambda);
          }
        }
        if (!std::isfinite(du)) {
          failure = "non-finite update at t=" + csv::format_number(grid.control_time(ii)) +
                    " for control " + std::to_string(c + 1);
          break;
        }
        const auto ci = static_cast<Index>(c);
        updated.set(ci, ii, clamp_control(rec.field(ci, ii) + du, options.amplitude_bound));
      }
      if (!failure.empty()) break;
      new_steps.push_back(prop.step(updated.at(ii)));
      for (auto& r : rho) r = apply_superoperator(new_steps.back().propagator, r);
    }
    if (!failure.empty()) {
      rec.reason = failure;
      return rec;
    }

    double j_spec = 0.0;
    std::vector<Matrix> finals = std::move(rho);
    if (filter) {
      for (std::size_t c = 0; c < nc; ++c) {
        const auto ci = static_cast<Index>(c);
        std::vector<double> raw(n);
        for (std::size_t i = 0; i < n; ++i) {
          raw[i] = updated(ci, static_cast<Index>(i)) - rec.field(ci, static_cast<Index>(i));
        }
        const auto smooth = filtered_update(*filter, raw);
        j_spec += spectral_penalty(*filter, smooth);
        for (std::size_t i = 0; i < n; ++i) {
          const auto ii = static_cast<Index>(i);
          updated.set(ci, ii, clamp_control(rec.field(ci, ii) + smooth[i], options.amplitude_bound));
        }
      }
      new_steps = prop.steps(updated);
      finals = final_states(new_steps, prepared.initial, threads);
    }

    const double new_fidelity = pairing_functional(prepared.costates, finals);
    const double max_du = (updated.samples() - rec.field.samples()).cwiseAbs().maxCoeff();
    const double delta_f = new_fidelity - fidelity;
    const bool monotone = delta_f >= -kMonotoneSlack;

    if (iteration == 1 && max_du == 0.0) {
      rec.reason = "stationary guess";
      return rec;
    }
    if (!monotone && options.lambda_adaptation == LambdaAdaptation::HalveOnNonMonotone &&
        rejections < options.max_rejections) {
      ++rejections;
      ++rec.rejected_steps;
      lambda *= 2.0;
      continue;
    }
    rejections = 0;

    rec.field = std::move(updated);
    steps = std::move(new_steps);
    fidelity = new_fidelity;
    rec.monotone = rec.monotone && monotone;
    rec.iterations.push_back({iteration, fidelity, delta_f, j_spec, max_du,
                              std::chrono::duration<double>(Clock::now() - start).count(), lambda,
                              monotone});
    if (fidelity >= options.fidelity_goal) {
      rec.converged = true;
      rec.reason = "fidelity goal reached";
      return rec;
    }
    if (max_du == 0.0) {
      rec.reason = "stationary control";
      return rec;
    }
    if (options.delta_f_tolerance > 0.0 && std::abs(delta_f) < options.delta_f_tolerance) {
      rec.reason = "delta_f below tolerance";
      return rec;
    }
    ++iteration;
  }
  rec.reason = "maximum iterations reached";
  return rec;
}

std::vector<ScanRow> scan_duration(const LindbladGenerator& gen, const ControlObjective& objective,
                                   const ControlField& reference_guess,
                                   const std::vector<double>& durations,
                                   const KrotovOptions& options,
                                   const std::optional<SpectralSpec>& constraint) {
  if (durations.empty()) throw std::invalid_argument("duration list is empty");
  for (std::size_t k = 1; k < durations.size(); ++k) {
    if (!(durations[k] > durations[k - 1])) {
      throw std::invalid_argument("durations must be strictly increasing (no duplicates)");
    }
  }
  const double t_ref = reference_guess.grid().t_final();
  const Index n = reference_guess.grid().n_steps();
  std::vector<ScanRow> rows;
  for (double t : durations) {
    ScanRow row{t, std::numeric_limits<double>::quiet_NaN(), 0, "ok"};
    try {
      const TimeGrid grid(t, n);
      ControlField guess(grid, reference_guess.samples() * (t_ref / t));
      const auto rec = krotov_iterate(gen, objective, guess, options, constraint);
      row.fidelity = rec.final_fidelity();
      row.iterations = rec.iterations.back().iteration;
      if (rec.reason.rfind("non-finite", 0) == 0) {
        row.fidelity = std::numeric_limits<double>::quiet_NaN();
        row.status = rec.reason;
      }
    } catch (const std::exception& e) {
      row.status = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_convergence_csv(std::ostream& out, const OptimizationRecord& record) {
  csv::write_row(out, std::vector<std::string>{"iter", "F", "dF", "J_spec", "max_du", "seconds"});
  for (const auto& it : record.iterations) {
    csv::write_row(out, std::vector<double>{static_cast<double>(it.iteration), it.fidelity,
                                            it.delta_f, it.j_spec, it.max_du, it.seconds});
  }
}

void write_scan_csv(std::ostream& out, const std::vector<ScanRow>& rows) {
  csv::write_row(out, std::vector<std::string>{"T", "F", "iters", "status"});
  for (const auto& r : rows) {
    std::string status = r.status;
    for (auto& ch : status) {
      if (ch == ',' || ch == '\n') ch = ';';
    }
    csv::write_row(out, std::vector<std::string>{csv::format_number(r.t_final),
                                                 csv::format_number(r.fidelity),
                                                 std::to_string(r.iterations), status});
  }
}

}  // namespace openkrotov
