#include "openkrotov/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>

namespace openkrotov {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw ConfigError(what + " must be a number");
  return j.get<double>();
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON in '" + path.string() + "': " + e.what());
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw ConfigError("matrix entries must be [re, im] pairs or real numbers");
}

Matrix state_from_json(const json& j, Index d, const fs::path& base) {
  if (j.is_object() && j.contains("pure")) {
    check_keys(j, {"pure"}, "state");
    const auto k = j["pure"].get<Index>();
    if (k < 0 || k >= d) throw ConfigError("pure-state index out of range");
    return matrix_unit(d, k, k);
  }
  if (j.is_string() && j.get<std::string>() == "mixed") return Matrix::Identity(d, d) / static_cast<double>(d);
  Matrix m = matrix_from_json(j, base);
  try {
    (void)DensityOperator::physical(m);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid state: ") + e.what());
  }
  if (m.rows() != d) throw ConfigError("state dimension differs from the model dimension");
  return m;
}

ShapeFunction shape_from_json(const json& j) {
  check_keys(j, {"type", "ramp_fraction", "samples"}, "options.shape");
  const std::string type = j.value("type", "sin_squared");
  if (type == "sin_squared") return ShapeFunction::sin_squared();
  if (type == "flat_with_ramps") return ShapeFunction::flat_with_ramps(j.value("ramp_fraction", 0.1));
  if (type == "tabulated") return ShapeFunction::tabulated(j.at("samples").get<std::vector<double>>());
  throw ConfigError("unknown shape type '" + type + "'");
}

json shape_to_json(const ShapeFunction& s) {
  switch (s.kind) {
    case ShapeFunction::Kind::SinSquared: return {{"type", "sin_squared"}};
    case ShapeFunction::Kind::FlatWithRamps:
      return {{"type", "flat_with_ramps"}, {"ramp_fraction", s.ramp_fraction}};
    case ShapeFunction::Kind::Tabulated: return {{"type", "tabulated"}, {"samples", s.samples}};
  }
  return {};
}

KrotovOptions options_from_json(const json& j) {
  check_keys(j, {"lambda", "max_iterations", "fidelity_goal", "delta_f_tolerance", "shape",
                 "lambda_adaptation", "gradient", "amplitude_bound", "max_rejections", "threads"},
             "options");
  KrotovOptions o;
  o.lambda = number(j.value("lambda", json(o.lambda)), "options.lambda");
  o.max_iterations = j.value("max_iterations", o.max_iterations);
  o.fidelity_goal = number(j.value("fidelity_goal", json(o.fidelity_goal)), "options.fidelity_goal");
  o.delta_f_tolerance = j.value("delta_f_tolerance", o.delta_f_tolerance);
  if (j.contains("shape")) o.shape = shape_from_json(j["shape"]);
  const std::string adapt = j.value("lambda_adaptation", "fixed");
  if (adapt == "fixed") {
    o.lambda_adaptation = LambdaAdaptation::Fixed;
  } else if (adapt == "halve_on_non_monotone") {
    o.lambda_adaptation = LambdaAdaptation::HalveOnNonMonotone;
  } else {
    throw ConfigError("unknown lambda_adaptation '" + adapt + "'");
  }
  const std::string grad = j.value("gradient", "step_exact");
  if (grad == "step_exact") {
    o.gradient = GradientRule::StepExact;
  } else if (grad == "local") {
    o.gradient = GradientRule::Local;
  } else {
    throw ConfigError("unknown gradient rule '" + grad + "'");
  }
  if (j.contains("amplitude_bound")) o.amplitude_bound = number(j["amplitude_bound"], "amplitude_bound");
  o.max_rejections = j.value("max_rejections", o.max_rejections);
  o.threads = j.value("threads", o.threads);
  try {
    validate(o);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid options: ") + e.what());
  }
  return o;
}

json options_to_json(const KrotovOptions& o) {
  json j = {{"lambda", o.lambda},
            {"max_iterations", o.max_iterations},
            {"fidelity_goal", o.fidelity_goal},
            {"delta_f_tolerance", o.delta_f_tolerance},
            {"shape", shape_to_json(o.shape)},
            {"lambda_adaptation",
             o.lambda_adaptation == LambdaAdaptation::Fixed ? "fixed" : "halve_on_non_monotone"},
            {"gradient", o.gradient == GradientRule::StepExact ? "step_exact" : "local"},
            {"max_rejections", o.max_rejections},
            {"threads", o.threads}};
  if (o.amplitude_bound) j["amplitude_bound"] = *o.amplitude_bound;
  return j;
}

GuessSpec guess_from_json(const json& j, const fs::path& base) {
  check_keys(j, {"type", "amplitude", "center", "width", "frequency", "phase", "path"}, "guess");
  GuessSpec g;
  const std::string type = j.value("type", "constant");
  g.amplitude = j.value("amplitude", 0.0);
  if (type == "constant") {
    g.kind = GuessSpec::Kind::Constant;
  } else if (type == "gaussian") {
    g.kind = GuessSpec::Kind::Gaussian;
    g.center = j.value("center", 0.0);
    g.width = j.value("width", 1.0);
    if (!(g.width > 0.0)) throw ConfigError("gaussian guess width must be positive");
  } else if (type == "sinsq_sinusoid") {
    g.kind = GuessSpec::Kind::SinSquaredSinusoid;
    g.frequency = j.value("frequency", 0.0);
    g.phase = j.value("phase", 0.0);
  } else if (type == "random") {
    g.kind = GuessSpec::Kind::Random;
  } else if (type == "file") {
    g.kind = GuessSpec::Kind::File;
    g.path = j.at("path").get<std::string>();
    const fs::path p = resolve(base, g.path);
    std::ifstream in(p);
    if (!in) throw ConfigError("cannot open pulse file '" + p.string() + "'");
    g.file_samples = read_pulse_csv(in).samples();
  } else {
    throw ConfigError("unknown guess type '" + type + "'");
  }
  return g;
}

json guess_to_json(const GuessSpec& g) {
  switch (g.kind) {
    case GuessSpec::Kind::Constant: return {{"type", "constant"}, {"amplitude", g.amplitude}};
    case GuessSpec::Kind::Gaussian:
      return {{"type", "gaussian"}, {"amplitude", g.amplitude}, {"center", g.center}, {"width", g.width}};
    case GuessSpec::Kind::SinSquaredSinusoid:
      return {{"type", "sinsq_sinusoid"},
              {"amplitude", g.amplitude},
              {"frequency", g.frequency},
              {"phase", g.phase}};
    case GuessSpec::Kind::Random: return {{"type", "random"}, {"amplitude", g.amplitude}};
    case GuessSpec::Kind::File: return {{"type", "file"}, {"path", g.path}};
  }
  return {};
}

ControlObjective objective_from_json(const json& j, Index d, const std::optional<ModelSpec>& model,
                                     const fs::path& base) {
  const std::string type = j.value("type", "");
  if (type == "state") {
    check_keys(j, {"type", "initial", "target"}, "objective");
    return StateToState{state_from_json(j.at("initial"), d, base), state_from_json(j.at("target"), d, base)};
  }
  if (type == "gate") {
    check_keys(j, {"type", "gate", "basis", "weights", "logical"}, "objective");
    GateTarget g;
    const json& gj = j.at("gate");
    g.gate = gj.is_string() && !gj.get<std::string>().ends_with(".json") ? named_gate(gj.get<std::string>())
                                                                        : matrix_from_json(gj, base);
    g.basis = basis_strategy_from_string(j.value("basis", "reduced3"));
    g.weights = j.value("weights", std::vector<double>{});
    if (j.contains("logical")) {
      g.logical = j["logical"].get<std::vector<Index>>();
    } else if (g.gate.rows() == d) {
      for (Index k = 0; k < d; ++k) g.logical.push_back(k);
    } else if (model) {
      g.logical = logical_subspace(*model);
    } else {
      throw ConfigError("gate dimension differs from the system; give 'logical' indices");
    }
    validate_gate(g, d);
    return g;
  }
  throw ConfigError("objective type must be 'state' or 'gate'");
}

json objective_to_json(const ControlObjective& obj) {
  if (const auto* s = std::get_if<StateToState>(&obj)) {
    return {{"type", "state"}, {"initial", matrix_to_json(s->initial)}, {"target", matrix_to_json(s->target)}};
  }
  const auto& g = std::get<GateTarget>(obj);
  json j = {{"type", "gate"},
            {"gate", matrix_to_json(g.gate)},
            {"basis", to_string(g.basis)},
            {"logical", g.logical}};
  if (!g.weights.empty()) j["weights"] = g.weights;
  return j;
}

bool same_matrix(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

bool same_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

bool same_objective(const ControlObjective& a, const ControlObjective& b) {
  if (a.index() != b.index()) return false;
  if (const auto* s = std::get_if<StateToState>(&a)) {
    const auto& t = std::get<StateToState>(b);
    return same_matrix(s->initial, t.initial) && same_matrix(s->target, t.target);
  }
  const auto& g = std::get<GateTarget>(a);
  const auto& h = std::get<GateTarget>(b);
  return same_matrix(g.gate, h.gate) && g.basis == h.basis && g.weights == h.weights &&
         g.logical == h.logical;
}

bool same_guess(const GuessSpec& a, const GuessSpec& b) {
  return a.kind == b.kind && a.amplitude == b.amplitude && a.center == b.center &&
         a.width == b.width && a.frequency == b.frequency && a.phase == b.phase &&
         a.path == b.path && same_matrix(a.file_samples, b.file_samples);
}

bool same_explicit(const ExplicitModel& a, const ExplicitModel& b) {
  if (!same_matrix(a.drift, b.drift) || a.controls.size() != b.controls.size() ||
      a.channels.size() != b.channels.size()) {
    return false;
  }
  for (std::size_t k = 0; k < a.controls.size(); ++k) {
    if (!same_matrix(a.controls[k], b.controls[k])) return false;
  }
  for (std::size_t k = 0; k < a.channels.size(); ++k) {
    if (!same_matrix(a.channels[k].first, b.channels[k].first) ||
        a.channels[k].second != b.channels[k].second) {
      return false;
    }
  }
  return true;
}

template <typename T, typename Eq>
bool same_optional(const std::optional<T>& a, const std::optional<T>& b, Eq eq) {
  if (a.has_value() != b.has_value()) return false;
  return !a || eq(*a, *b);
}

// Uniform on [-1, 1) from raw mt19937_64 output; std distributions are
// implementation-defined and would break cross-platform reproducibility.
double uniform_pm1(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
}

RunConfig parse_impl(const json& doc, const fs::path& base) {
  check_keys(doc, {"model", "matrices", "grid", "initial_state", "objective", "guess", "options",
                   "spectral_filter", "scan", "output_dir", "seed"},
             "config");
  RunConfig c;
  if (doc.contains("model") == doc.contains("matrices")) {
    throw ConfigError("config needs exactly one of 'model' or 'matrices'");
  }
  if (doc.contains("model")) {
    const json& m = doc["model"];
    check_keys(m, {"name", "params"}, "model");
    ModelSpec spec;
    spec.name = model_name_from_string(m.at("name").get<std::string>());
    if (m.contains("params")) spec.params = m["params"].get<std::map<std::string, double>>();
    c.model = spec;
  } else {
    const json& m = doc["matrices"];
    check_keys(m, {"drift", "controls", "channels"}, "matrices");
    ExplicitModel e;
    e.drift = matrix_from_json(m.at("drift"), base);
    for (const auto& cj : m.value("controls", json::array())) e.controls.push_back(matrix_from_json(cj, base));
    for (const auto& ch : m.value("channels", json::array())) {
      check_keys(ch, {"operator", "rate"}, "channel");
      e.channels.emplace_back(matrix_from_json(ch.at("operator"), base), number(ch.at("rate"), "channel rate"));
    }
    c.matrices = std::move(e);
  }
  const LindbladGenerator gen = c.generator();
  const Index d = gen.dim();

  const json& grid = doc.at("grid");
  check_keys(grid, {"T", "N"}, "grid");
  c.t_final = number(grid.at("T"), "grid.T");
  c.n_steps = grid.at("N").get<Index>();
  (void)c.grid();

  if (doc.contains("initial_state")) c.initial_state = state_from_json(doc["initial_state"], d, base);
  if (doc.contains("objective")) c.objective = objective_from_json(doc["objective"], d, c.model, base);

  if (doc.contains("guess")) {
    const json& g = doc["guess"];
    if (g.is_array()) {
      for (const auto& gj : g) c.guess.push_back(guess_from_json(gj, base));
    } else {
      c.guess.push_back(guess_from_json(g, base));
    }
  }
  if (doc.contains("options")) c.options = options_from_json(doc["options"]);
  if (doc.contains("spectral_filter")) {
    const json& s = doc["spectral_filter"];
    check_keys(s, {"alpha", "bands"}, "spectral_filter");
    SpectralSpec spec;
    spec.alpha = number(s.at("alpha"), "spectral_filter.alpha");
    for (const auto& b : s.at("bands")) {
      if (!b.is_array() || b.size() != 3) throw ConfigError("spectral bands are [omega_min, omega_max, value]");
      spec.bands.push_back({b[0].get<double>(), b[1].get<double>(), b[2].get<double>()});
    }
    (void)SpectralFilter::from_spec(spec, c.grid());
    c.spectral = std::move(spec);
  }
  if (doc.contains("scan")) {
    check_keys(doc["scan"], {"durations"}, "scan");
    c.scan_durations = doc["scan"].at("durations").get<std::vector<double>>();
    for (std::size_t k = 0; k < c.scan_durations.size(); ++k) {
      if (!(c.scan_durations[k] > 0.0)) throw ConfigError("scan durations must be positive");
      if (k > 0 && !(c.scan_durations[k] > c.scan_durations[k - 1])) {
        throw ConfigError("scan durations must be strictly increasing without duplicates");
      }
    }
  }
  c.output_dir = doc.value("output_dir", c.output_dir);
  c.seed = doc.value("seed", c.seed);
  (void)c.guess_field();
  return c;
}

}  // namespace

LindbladGenerator RunConfig::generator() const {
  if (model) return build_model(*model);
  if (!matrices) throw ConfigError("no model defined");
  std::vector<OperatorMatrix> controls;
  for (const auto& m : matrices->controls) controls.push_back(OperatorMatrix::hermitian(m));
  std::vector<Channel> channels;
  for (const auto& [op, rate] : matrices->channels) channels.push_back({OperatorMatrix(op), rate});
  return LindbladGenerator(OperatorMatrix::hermitian(matrices->drift), std::move(controls),
                           std::move(channels));
}

ControlField RunConfig::guess_field() const {
  const TimeGrid g = grid();
  const auto nc = static_cast<Index>(generator().num_controls());
  if (guess.size() == 1 && guess.front().kind == GuessSpec::Kind::File) {
    const auto& s = guess.front().file_samples;
    if (s.rows() != nc || s.cols() != g.n_steps()) {
      throw ConfigError("pulse file '" + guess.front().path + "' has " + std::to_string(s.rows()) +
                        " controls x " + std::to_string(s.cols()) + " samples, expected " +
                        std::to_string(nc) + " x " + std::to_string(g.n_steps()));
    }
    return ControlField(g, s);
  }
  if (guess.size() > 1 && static_cast<Index>(guess.size()) != nc) {
    throw ConfigError("guess list has " + std::to_string(guess.size()) + " entries for " +
                      std::to_string(nc) + " controls");
  }
  Eigen::MatrixXd samples = Eigen::MatrixXd::Zero(nc, g.n_steps());
  for (Index j = 0; j < nc && !guess.empty(); ++j) {
    const GuessSpec& spec = guess.size() == 1 ? guess.front() : guess[static_cast<std::size_t>(j)];
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(j));
    for (Index i = 0; i < g.n_steps(); ++i) {
      const double t = g.control_time(i);
      double u = 0.0;
      switch (spec.kind) {
        case GuessSpec::Kind::Constant: u = spec.amplitude; break;
        case GuessSpec::Kind::Gaussian: {
          const double x = (t - spec.center) / spec.width;
          u = spec.amplitude * std::exp(-0.5 * x * x);
          break;
        }
        case GuessSpec::Kind::SinSquaredSinusoid: {
          const double s = std::sin(std::numbers::pi * t / g.t_final());
          u = spec.amplitude * s * s * std::cos(spec.frequency * t + spec.phase);
          break;
        }
        case GuessSpec::Kind::Random: u = spec.amplitude * uniform_pm1(rng); break;
        case GuessSpec::Kind::File: throw ConfigError("a pulse file guess must be the only guess entry");
      }
      samples(j, i) = u;
    }
  }
  return ControlField(g, std::move(samples));
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const fs::path& base_dir) {
  if (j.is_string()) {
    const json file = read_json_file(resolve(base_dir, j.get<std::string>()));
    return matrix_from_json(file.is_object() && file.contains("matrix") ? file["matrix"] : file, base_dir);
  }
  if (!j.is_array() || j.empty()) throw ConfigError("matrix must be a non-empty array of rows");
  const auto rows = static_cast<Index>(j.size());
  Matrix m(rows, rows);
  for (Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != rows) throw ConfigError("matrix must be square");
    for (Index c = 0; c < rows; ++c) m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
  }
  if (!m.allFinite()) throw ConfigError("matrix has non-finite entries");
  return m;
}

Matrix named_gate(const std::string& name) {
  const double r = 1.0 / std::sqrt(2.0);
  Matrix m;
  if (name == "I2") return pauli::identity(2);
  if (name == "I4") return pauli::identity(4);
  if (name == "X") return pauli::x();
  if (name == "Y") return pauli::y();
  if (name == "Z") return pauli::z();
  if (name == "H") {
    m.resize(2, 2);
    m << r, r, r, -r;
    return m;
  }
  if (name == "S") {
    m = Matrix::Identity(2, 2);
    m(1, 1) = Complex(0, 1);
    return m;
  }
  if (name == "T") {
    m = Matrix::Identity(2, 2);
    m(1, 1) = std::polar(1.0, std::numbers::pi / 4);
    return m;
  }
  if (name == "CNOT") {
    m = Matrix::Zero(4, 4);
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
    return m;
  }
  if (name == "CZ") {
    m = Matrix::Identity(4, 4);
    m(3, 3) = -1.0;
    return m;
  }
  if (name == "SWAP") {
    m = Matrix::Zero(4, 4);
    m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
    return m;
  }
  throw ConfigError("unknown gate name '" + name + "'");
}

RunConfig parse_config(const json& doc, const fs::path& base_dir) {
  try {
    return parse_impl(doc, base_dir);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

RunConfig load_config(const fs::path& path) {
  return parse_config(read_json_file(path), path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

json to_json(const RunConfig& c) {
  json doc;
  if (c.model) {
    doc["model"] = {{"name", to_string(c.model->name)}, {"params", c.model->params}};
  } else if (c.matrices) {
    json controls = json::array();
    for (const auto& m : c.matrices->controls) controls.push_back(matrix_to_json(m));
    json channels = json::array();
    for (const auto& [op, rate] : c.matrices->channels) {
      channels.push_back({{"operator", matrix_to_json(op)}, {"rate", rate}});
    }
    doc["matrices"] = {{"drift", matrix_to_json(c.matrices->drift)},
                       {"controls", controls},
                       {"channels", channels}};
  }
  doc["grid"] = {{"T", c.t_final}, {"N", c.n_steps}};
  if (c.initial_state) doc["initial_state"] = matrix_to_json(*c.initial_state);
  if (c.objective) doc["objective"] = objective_to_json(*c.objective);
  if (!c.guess.empty()) {
    json g = json::array();
    for (const auto& s : c.guess) g.push_back(guess_to_json(s));
    doc["guess"] = g;
  }
  doc["options"] = options_to_json(c.options);
  if (c.spectral) {
    json bands = json::array();
    for (const auto& b : c.spectral->bands) bands.push_back({b.omega_min, b.omega_max, b.value});
    doc["spectral_filter"] = {{"alpha", c.spectral->alpha}, {"bands", bands}};
  }
  if (!c.scan_durations.empty()) doc["scan"] = {{"durations", c.scan_durations}};
  doc["output_dir"] = c.output_dir;
  doc["seed"] = c.seed;
  return doc;
}

bool same_config(const RunConfig& a, const RunConfig& b) {
  return a.model == b.model && same_optional(a.matrices, b.matrices, same_explicit) &&
         a.t_final == b.t_final && a.n_steps == b.n_steps &&
         same_optional(a.initial_state, b.initial_state,
                       [](const Matrix& x, const Matrix& y) { return same_matrix(x, y); }) &&
         same_optional(a.objective, b.objective, same_objective) &&
         a.guess.size() == b.guess.size() &&
         std::equal(a.guess.begin(), a.guess.end(), b.guess.begin(), same_guess) &&
         a.options == b.options && a.spectral == b.spectral &&
         a.scan_durations == b.scan_durations && a.output_dir == b.output_dir && a.seed == b.seed;
}

}  // namespace openkrotov
