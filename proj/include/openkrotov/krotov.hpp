#pragma once

#include <optional>
#include <string>
#include <vector>

#include "openkrotov/core.hpp"
#include "openkrotov/dynamics.hpp"
#include "openkrotov/functionals.hpp"
#include "openkrotov/spectral.hpp"

namespace openkrotov {

/// Envelope S(t) in [0, 1] restricting where the control may change.
struct ShapeFunction {
  enum class Kind { SinSquared, FlatWithRamps, Tabulated };

  Kind kind = Kind::SinSquared;
  double ramp_fraction = 0.1;   ///< FlatWithRamps: ramp length as a fraction of T, in (0, 0.5]
  std::vector<double> samples;  ///< Tabulated: one value per control interval

  static ShapeFunction sin_squared() { return {}; }
  static ShapeFunction flat_with_ramps(double fraction) { return {Kind::FlatWithRamps, fraction, {}}; }
  static ShapeFunction tabulated(std::vector<double> values) {
    return {Kind::Tabulated, 0.1, std::move(values)};
  }

  double operator()(double t, double t_final) const;
  /// Values on the control midpoints.
  std::vector<double> on_grid(const TimeGrid& grid) const;

  bool operator==(const ShapeFunction&) const = default;
};

enum class LambdaAdaptation {
  Fixed,
  /// Reject a non-monotone iteration and retry it with half the step (2 lambda).
  HalveOnNonMonotone,
};

enum class GradientRule {
  /// Exact derivative of each step propagator, paired with sigma(t_{i+1}).
  StepExact,
  /// (S/lambda) Im Tr{sigma(t_i)^dagger [H_j, rho(t_i)]}.
  Local,
};

struct KrotovOptions {
  double lambda = 1.0;
  int max_iterations = 100;
  double fidelity_goal = 0.999;
  /// Stop when |dF| of an accepted iteration falls below this; 0 disables.
  double delta_f_tolerance = 0.0;
  ShapeFunction shape;
  LambdaAdaptation lambda_adaptation = LambdaAdaptation::Fixed;
  GradientRule gradient = GradientRule::StepExact;
  /// Controls are clipped to [-bound, bound] when set.
  std::optional<double> amplitude_bound;
  int max_rejections = 30;
  int threads = 1;

  bool operator==(const KrotovOptions&) const = default;
};

void validate(const KrotovOptions& options);

struct IterationRecord {
  int iteration = 0;
  double fidelity = 0.0;
  double delta_f = 0.0;
  double j_spec = 0.0;
  double max_du = 0.0;
  double seconds = 0.0;
  double lambda = 0.0;
  bool monotone = true;
};

struct OptimizationRecord {
  std::vector<IterationRecord> iterations;  ///< iteration 0 evaluates the guess
  ControlField field;
  bool converged = false;
  std::string reason;
  bool monotone = true;
  bool constraint_warning = false;
  int rejected_steps = 0;

  double final_fidelity() const { return iterations.back().fidelity; }
};

/// (S/lambda) Im Tr{sigma^dagger [H_ctrl, rho]}.
double local_update(const Matrix& sigma, const Matrix& rho, const Matrix& control_op, double shape,
                    double lambda);

/// Forward-propagates the objective's states under `field` and returns F_T.
double evaluate_objective(const LindbladGenerator& gen, const ControlObjective& objective,
                          const ControlField& field);

/// Sequential-in-time Krotov iteration.
OptimizationRecord krotov_iterate(const LindbladGenerator& gen, const ControlObjective& objective,
                                  const ControlField& guess, const KrotovOptions& options,
                                  const std::optional<SpectralSpec>& constraint = std::nullopt);

/// Control gradient dF/du(c, i) of the discretized problem, from the
/// co-state pairing with exact step derivatives.
Eigen::MatrixXd control_gradient(const LindbladGenerator& gen, const ControlObjective& objective,
                                 const ControlField& field);

struct ScanRow {
  double t_final = 0.0;
  double fidelity = 0.0;  ///< NaN for failed entries
  int iterations = 0;
  std::string status;  ///< "ok" or failure reason
};

/// Runs the optimizer for each duration with the guess rescaled in time
/// (same sample count, amplitude scaled by T_ref/T to keep the pulse area).
std::vector<ScanRow> scan_duration(const LindbladGenerator& gen, const ControlObjective& objective,
                                   const ControlField& reference_guess,
                                   const std::vector<double>& durations,
                                   const KrotovOptions& options,
                                   const std::optional<SpectralSpec>& constraint = std::nullopt);

void write_convergence_csv(std::ostream& out, const OptimizationRecord& record);
void write_scan_csv(std::ostream& out, const std::vector<ScanRow>& rows);

}  // namespace openkrotov
