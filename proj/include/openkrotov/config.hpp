#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "openkrotov/core.hpp"
#include "openkrotov/dynamics.hpp"
#include "openkrotov/functionals.hpp"
#include "openkrotov/krotov.hpp"
#include "openkrotov/models.hpp"
#include "openkrotov/spectral.hpp"

namespace openkrotov {

/// Invalid or inconsistent run description. Maps to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExplicitModel {
  Matrix drift;
  std::vector<Matrix> controls;
  std::vector<std::pair<Matrix, double>> channels;
};

/// Parametric guess for one control, or a pulse file covering all controls.
struct GuessSpec {
  enum class Kind { Constant, Gaussian, SinSquaredSinusoid, Random, File };

  Kind kind = Kind::Constant;
  double amplitude = 0.0;
  double center = 0.0;     ///< Gaussian
  double width = 1.0;      ///< Gaussian
  double frequency = 0.0;  ///< SinSquaredSinusoid: a sin^2(pi t/T) cos(frequency t + phase)
  double phase = 0.0;
  std::string path;        ///< File
  Eigen::MatrixXd file_samples;
};

struct RunConfig {
  std::optional<ModelSpec> model;
  std::optional<ExplicitModel> matrices;
  double t_final = 1.0;
  Index n_steps = 100;
  std::optional<Matrix> initial_state;
  std::optional<ControlObjective> objective;
  std::vector<GuessSpec> guess;
  KrotovOptions options;
  std::optional<SpectralSpec> spectral;
  std::vector<double> scan_durations;
  std::string output_dir = "out";
  std::uint64_t seed = 0;

  TimeGrid grid() const { return TimeGrid(t_final, n_steps); }
  LindbladGenerator generator() const;
  ControlField guess_field() const;
};

/// Structural equality (matrices compared exactly).
bool same_config(const RunConfig& a, const RunConfig& b);

/// Parses a configuration document. Relative file references are resolved
/// against `base_dir`. Throws ConfigError on any problem.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

/// Canonical document; same_config(parse_config(to_json(c)), c) holds.
nlohmann::json to_json(const RunConfig& config);

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");

/// Common single-qubit and two-qubit gates by name (X, Y, Z, H, S, T, CNOT, CZ, SWAP, I2, I4).
Matrix named_gate(const std::string& name);

}  // namespace openkrotov
