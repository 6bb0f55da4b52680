#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "openkrotov/config.hpp"
#include "test_util.hpp"

using namespace openkrotov;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json gate_doc() {
  return json::parse(R"({
    "model": {"name": "TwoQubitDephasing", "params": {"J": 0.8, "gamma_phi": 1e-4}},
    "grid": {"T": 10.0, "N": 200},
    "objective": {"type": "gate", "gate": "CNOT", "basis": "reduced3", "weights": [1.5, 1.0, 0.5]},
    "guess": [{"type": "sinsq_sinusoid", "amplitude": 0.3, "frequency": 1.3, "phase": 0.1},
              {"type": "random", "amplitude": 0.05}],
    "options": {"lambda": 2.0, "max_iterations": 50, "fidelity_goal": 0.99,
                "shape": {"type": "flat_with_ramps", "ramp_fraction": 0.2},
                "lambda_adaptation": "halve_on_non_monotone", "gradient": "local",
                "amplitude_bound": 2.0, "threads": 2},
    "spectral_filter": {"alpha": 50, "bands": [[3.0, 1e9, 1.0]]},
    "scan": {"durations": [5, 10, 20]},
    "output_dir": "runs/cnot",
    "seed": 42
  })");
}

json state_doc() {
  return json::parse(R"({
    "matrices": {
      "drift": [[[0.5, 0], [0, 0]], [[0, 0], [-0.5, 0]]],
      "controls": [[[[0, 0], [1, 0]], [[1, 0], [0, 0]]]],
      "channels": [{"operator": [[[0, 0], [1, 0]], [[0, 0], [0, 0]]], "rate": 0.3}]
    },
    "grid": {"T": 5, "N": 50},
    "initial_state": {"pure": 1},
    "objective": {"type": "state", "initial": {"pure": 0}, "target": "mixed"},
    "guess": {"type": "gaussian", "amplitude": 0.4, "center": 2.5, "width": 1.0}
  })");
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("openkrotov_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("parse a gate configuration") {
  const RunConfig c = parse_config(gate_doc());
  REQUIRE(c.model.has_value());
  CHECK(c.model->name == ModelName::TwoQubitDephasing);
  CHECK(c.grid().n_steps() == 200);
  const auto& gate = std::get<GateTarget>(*c.objective);
  CHECK(gate.gate == named_gate("CNOT"));
  CHECK(gate.logical == std::vector<Index>{0, 1, 2, 3});
  CHECK(c.options.lambda == 2.0);
  CHECK(c.options.gradient == GradientRule::Local);
  CHECK(c.options.amplitude_bound == 2.0);
  CHECK(c.spectral->alpha == 50.0);
  CHECK(c.scan_durations.size() == 3);
  CHECK(c.seed == 42u);
  const auto field = c.guess_field();
  CHECK(field.num_controls() == 2);
  CHECK(field.samples().row(1).cwiseAbs().maxCoeff() <= 0.05);
}

TEST_CASE("parse an explicit-matrix configuration") {
  const RunConfig c = parse_config(state_doc());
  const auto gen = c.generator();
  CHECK(gen.dim() == 2);
  CHECK(gen.channels().size() == 1);
  CHECK(*c.initial_state == matrix_unit(2, 1, 1));
  const auto& s = std::get<StateToState>(*c.objective);
  CHECK(s.target == pauli::identity() / 2.0);
  const auto field = c.guess_field();
  CHECK(field(0, 24) == doctest::Approx(0.4 * std::exp(-0.5 * 0.05 * 0.05)));
}

TEST_CASE("round trip parse -> serialize -> parse") {
  for (const json& doc : {gate_doc(), state_doc()}) {
    const RunConfig a = parse_config(doc);
    const RunConfig b = parse_config(to_json(a));
    CHECK(same_config(a, b));
    CHECK(to_json(a).dump() == to_json(b).dump());
  }
}

TEST_CASE("random guesses are reproducible per seed") {
  json doc = gate_doc();
  const auto a = parse_config(doc).guess_field();
  const auto b = parse_config(doc).guess_field();
  CHECK(a.samples() == b.samples());
  doc["seed"] = 43;
  CHECK(parse_config(doc).guess_field().samples() != a.samples());
}

TEST_CASE("matrices and pulses from files") {
  const fs::path dir = scratch_dir("files");
  {
    std::ofstream(dir / "drift.json") << R"({"matrix": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]]})";
    std::ofstream(dir / "pulse.csv") << "t,u_1\n0.5,0.1\n1.5,0.2\n";
  }
  json doc = state_doc();
  doc["matrices"]["drift"] = "drift.json";
  doc["grid"] = {{"T", 2.0}, {"N", 2}};
  doc["guess"] = {{"type", "file"}, {"path", "pulse.csv"}};
  const RunConfig c = parse_config(doc, dir);
  CHECK(c.generator().drift().matrix() == pauli::z());
  CHECK(c.guess_field()(0, 1) == 0.2);
  CHECK(same_config(c, parse_config(to_json(c), dir)));

  doc["matrices"]["drift"] = "missing.json";
  try {
    parse_config(doc, dir);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("missing.json") != std::string::npos);
  }
  fs::remove_all(dir);
}

TEST_CASE("invalid configurations are rejected") {
  auto rejects = [](const json& doc) { CHECK_THROWS_AS(parse_config(doc), ConfigError); };
  json d = gate_doc();
  d["options"]["lambda"] = -1.0;
  rejects(d);
  d = gate_doc();
  d["bogus"] = 1;
  rejects(d);
  d = gate_doc();
  d["options"]["bogus"] = 1;
  rejects(d);
  d = gate_doc();
  d["objective"]["gate"] = "FOO";
  rejects(d);
  d = gate_doc();
  d["objective"]["weights"] = {1.0, 1.0};
  rejects(d);
  d = gate_doc();
  d["scan"]["durations"] = {5, 5};
  rejects(d);
  d = gate_doc();
  d["grid"]["T"] = 0;
  rejects(d);
  d = gate_doc();
  d["model"]["params"]["gamma_phi"] = -1;
  rejects(d);
  d = gate_doc();
  d["spectral_filter"]["alpha"] = 0;
  rejects(d);
  d = state_doc();
  d["matrices"]["drift"] = json::parse(R"([[[0, 0], [1, 0]], [[0, 0], [0, 0]]])");  // not Hermitian
  rejects(d);
  d = state_doc();
  d["initial_state"] = {{"pure", 5}};
  rejects(d);
  d = state_doc();
  d["model"] = {{"name", "TwoLevelDamping"}};
  rejects(d);  // both model and matrices
  d = state_doc();
  d["guess"] = json::array({{{"type", "constant"}}, {{"type", "constant"}}});
  rejects(d);  // two guesses for one control
}

TEST_CASE("named gates are unitary") {
  for (const char* name : {"I2", "I4", "X", "Y", "Z", "H", "S", "T", "CNOT", "CZ", "SWAP"}) {
    const Matrix g = named_gate(name);
    CHECK(testutil::max_abs(g.adjoint() * g - Matrix::Identity(g.rows(), g.rows())) < 1e-15);
  }
}

TEST_CASE("matrix json round trip is exact") {
  std::mt19937_64 rng(3);
  const Matrix m = testutil::random_complex(3, 3, rng);
  CHECK(matrix_from_json(json::parse(matrix_to_json(m).dump())) == m);
}
