// Acceptance checks. Prints one PASS/FAIL line per criterion.
//
// Exit status is 0 when every criterion passes. `--known-failures 8,..` makes
// the run succeed when exactly the listed criteria fail; they still print FAIL.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "brute_force_lie.hpp"
#include "openkrotov/commands.hpp"
#include "openkrotov/config.hpp"
#include "openkrotov/controllability.hpp"
#include "openkrotov/krotov.hpp"
#include "openkrotov/models.hpp"
#include "openkrotov/spectral.hpp"
#include "test_util.hpp"

using namespace openkrotov;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = OPENKROTOV_CONFIG_DIR;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

RunConfig config(const std::string& name) { return load_config(kConfigs / name); }

Outcome cptp() {
  std::mt19937_64 rng(1);
  const ModelSpec specs[] = {
      {ModelName::TwoLevelDamping, {{"gamma", 0.5}}},
      {ModelName::TwoLevelDephasing, {{"gamma_phi", 0.2}}},
      {ModelName::LambdaDecay, {{"gamma0", 0.1}, {"gamma1", 0.2}}},
      {ModelName::AnharmonicLadder, {{"levels", 5}, {"gamma", 0.1}}},
      {ModelName::TwoQubitDephasing, {{"gamma_phi", 0.1}}},
  };
  double trace_err = 0.0, min_eig = 1.0;
  for (const auto& spec : specs) {
    const auto gen = build_model(spec);
    const TimeGrid grid(5.0, 200);
    const auto field = testutil::random_field(grid, gen.num_controls(), 1.0, rng);
    const auto traj = propagate_forward(gen, field, testutil::random_density(gen.dim(), rng));
    for (const auto& rho : traj.states) {
      trace_err = std::max(trace_err, std::abs(rho.trace() - 1.0));
      min_eig = std::min(min_eig, testutil::min_eigenvalue(rho));
    }
  }
  return {trace_err < 1e-10 && min_eig >= -1e-8, fmt("max |Tr-1| = %.2e, min eigenvalue = %.2e", trace_err, min_eig)};
}

Outcome decay() {
  const auto gen = build_model({ModelName::TwoLevelDamping, {{"gamma", 1.0}}});
  const auto traj = propagate_forward(gen, ControlField::zeros(TimeGrid(1.0, 100), 1), matrix_unit(2, 1, 1));
  const double p1 = traj.states.back()(1, 1).real();
  const double err = std::abs(p1 - std::exp(-1.0));
  return {err < 1e-6, fmt("p1(T) = %.10f, error %.1e", p1, err)};
}

Outcome pairing() {
  std::mt19937_64 rng(2);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Index d = 2 + trial % 3;
    const auto gen = testutil::random_generator(d, 2, 2, rng);
    const TimeGrid grid(3.0, 60);
    const auto field = testutil::random_field(grid, 2, 2.0, rng);
    const auto fwd = propagate_forward(gen, field, testutil::random_density(d, rng));
    const Matrix sigma = testutil::random_hermitian(d, rng);
    const auto bwd = propagate_backward(gen, field, sigma);
    const Complex ref = hilbert_schmidt_inner(sigma, fwd.states.back());
    for (std::size_t i = 0; i < fwd.states.size(); ++i) {
      const Complex p = hilbert_schmidt_inner(bwd.states[i], fwd.states[i]);
      worst = std::max(worst, std::abs(p - ref) / std::max(1.0, std::abs(ref)));
    }
  }
  return {worst <= 1e-8, fmt("20 tuples, worst relative drift %.2e", worst)};
}

Outcome gradient() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 12; ++trial) {
    const Index d = 2 + trial % 2;
    const auto gen = testutil::random_generator(d, 2, 1, rng);
    const TimeGrid grid(2.0, 10 + 10 * (trial % 5));
    const auto field = testutil::random_field(grid, 2, 1.0, rng);
    ControlObjective objective = StateToState{testutil::random_density(d, rng), testutil::random_density(d, rng)};
    if (trial % 3 == 2) objective = GateTarget{testutil::haar_unitary(2, rng), BasisStrategy::Reduced3, {}, {}};
    Eigen::MatrixXd dir(2, grid.n_steps());
    for (Index c = 0; c < 2; ++c)
      for (Index i = 0; i < grid.n_steps(); ++i) dir(c, i) = unit(rng);
    const double analytic = (control_gradient(gen, objective, field).array() * dir.array()).sum();
    const double h = 1e-6;
    const double fp = evaluate_objective(gen, objective, ControlField(grid, field.samples() + h * dir));
    const double fm = evaluate_objective(gen, objective, ControlField(grid, field.samples() - h * dir));
    const double numeric = (fp - fm) / (2 * h);
    worst = std::max(worst, std::abs(analytic - numeric) / std::abs(numeric));
  }

  // The update itself points along the gradient once lambda dominates.
  const auto gen = build_model({ModelName::TwoLevelDephasing, {{"gamma_phi", 1e-3}}});
  const StateToState flip{matrix_unit(2, 0, 0), matrix_unit(2, 1, 1)};
  const TimeGrid grid(5.0, 50);
  const auto guess = testutil::random_field(grid, 1, 0.2, rng);
  KrotovOptions o;
  o.lambda = 1e6;
  o.max_iterations = 1;
  o.fidelity_goal = 1.0;
  const Eigen::MatrixXd du = krotov_iterate(gen, flip, guess, o).field.samples() - guess.samples();
  const auto shape = o.shape.on_grid(grid);
  Eigen::MatrixXd expected = control_gradient(gen, flip, guess) / (o.lambda * grid.dt());
  for (Index i = 0; i < grid.n_steps(); ++i) expected(0, i) *= shape[i];
  const double update_err = (du - expected).norm() / expected.norm();
  return {worst <= 1e-4 && update_err <= 1e-4,
          fmt("gradient vs FD worst %.2e; update vs gradient %.2e", worst, update_err)};
}

Outcome monotone() {
  struct Bench {
    const char* name;
    const char* file;
    double threshold;
  };
  bool ok = true;
  std::string detail;
  for (const Bench& b : {Bench{"a", "two_level_transfer.json", 0.99}, Bench{"b", "lambda_transfer.json", 0.95},
                         Bench{"c", "cnot_dephasing.json", 0.95}}) {
    const RunConfig c = config(b.file);
    const auto rec = krotov_iterate(c.generator(), *c.objective, c.guess_field(), c.options, c.spectral);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < rec.iterations.size(); ++k) worst = std::min(worst, rec.iterations[k].delta_f);
    const int iters = static_cast<int>(rec.iterations.size()) - 1;
    const bool pass = worst >= -1e-12 && rec.final_fidelity() >= b.threshold && iters <= 500;
    ok = ok && pass;
    detail += std::string(detail.empty() ? "" : "; ") + b.name +
              fmt(": F = %.4f after %.0f iterations, min dF = %.1e", rec.final_fidelity(), iters, worst);
  }
  return {ok, detail};
}

Outcome functionals() {
  std::mt19937_64 rng(6);
  const BasisStrategy strategies[] = {BasisStrategy::FullBasis, BasisStrategy::Reduced3, BasisStrategy::DPlus1};
  auto evolve = [](BasisStrategy s, const Matrix& v) {
    std::vector<Matrix> out;
    for (const auto& rho : make_basis(s, v.rows()).states) out.push_back(v * rho * v.adjoint());
    return out;
  };
  double worst_match = 0.0, best_miss = 0.0;
  for (Index d : {2, 4}) {
    for (int trial = 0; trial < 100; ++trial) {
      const Matrix o = testutil::haar_unitary(d, rng);
      const Matrix other = testutil::haar_unitary(d, rng);
      const Complex phase = std::polar(1.0, 2.0 * std::numbers::pi * trial / 100.0);
      for (auto s : strategies) {
        const GateTarget gate{o, s, {}, {}};
        worst_match = std::max(worst_match, std::abs(gate_fidelity(gate, evolve(s, phase * o)) - 1.0));
        best_miss = std::max(best_miss, gate_fidelity(gate, evolve(s, other)));
      }
    }
  }
  const GateTarget id{pauli::identity(), BasisStrategy::FullBasis, {}, {}};
  std::vector<Matrix> depolarized;
  for (const auto& e : full_basis(2).states) depolarized.push_back(e.trace() * pauli::identity() / 2.0);
  const double dep = gate_fidelity(id, depolarized);
  return {worst_match <= 1e-9 && best_miss < 1.0 - 1e-6 && std::abs(dep - 0.5) < 1e-12,
          fmt("|F-1| at target <= %.1e; max F off target %.6f; depolarizing %.15f", worst_match, best_miss, dep)};
}

Outcome spectral() {
  const RunConfig c = config("two_level_spectral.json");
  const auto rec = krotov_iterate(c.generator(), *c.objective, c.guess_field(), c.options, c.spectral);
  const auto filter = SpectralFilter::from_spec(*c.spectral, c.grid());
  const auto row = rec.field.samples().row(0);
  const double frac = stopband_power_fraction(filter, std::vector<double>(row.begin(), row.end()));
  const double db = 10.0 * std::log10(frac);
  return {db <= -20.0 && rec.final_fidelity() >= 0.98,
          fmt("out-of-band power %.1f dB, F = %.4f", db, rec.final_fidelity())};
}

Outcome lie() {
  const Matrix i2 = pauli::identity();
  struct Case {
    std::string label;
    Matrix h0;
    std::vector<Matrix> controls;
    Index dim;
    bool controllable;
  };
  const std::vector<Case> cases{
      {"{sz; sx}", pauli::z(), {pauli::x()}, 3, true},
      {"{sz; sz}", pauli::z(), {pauli::z()}, 1, false},
      {"{zz; xi, ix}", kron(pauli::z(), pauli::z()), {kron(pauli::x(), i2), kron(i2, pauli::x())}, 15, true},
  };
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    const auto rep = lie_rank(c.h0, c.controls);
    const auto brute = testutil::brute_force_lie_dimension(c.h0, c.controls, 6);
    const bool pass = rep.generated_dimension == c.dim && rep.controllable == c.controllable &&
                      rep.generated_dimension == brute;
    ok = ok && pass;
    detail += (detail.empty() ? "" : "; ") + c.label + " -> " + std::to_string(rep.generated_dimension) + "/" +
              std::to_string(rep.full_dimension) + " (brute force " + std::to_string(brute) + ", expected " +
              std::to_string(c.dim) + ")";
  }
  return {ok, detail};
}

Outcome speed_limit() {
  const RunConfig c = config("speed_limit_scan.json");
  const double t_min = std::numbers::pi / 2.0;
  const auto rows = scan_duration(c.generator(), *c.objective, c.guess_field(), {0.5 * t_min, 2.0 * t_min},
                                  c.options, c.spectral);
  return {rows.size() == 2 && rows[0].fidelity < 0.9 && rows[1].fidelity > 0.99,
          fmt("F(Tmin/2) = %.4f, F(2 Tmin) = %.5f", rows[0].fidelity, rows[1].fidelity)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string mask_seconds(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + '\n';
  return out;
}

int cli(const std::string& cmd, const std::string& cfg, const fs::path& out, const std::string& threads) {
  std::vector<std::string> args{"openkrotov", cmd, "--config", (kConfigs / cfg).string(), "--out", out.string(),
                                "--threads", threads};
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream sink;
  return run_cli(static_cast<int>(argv.size()), argv.data(), sink, sink);
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "openkrotov_acceptance";
  fs::remove_all(root);
  struct Run {
    const char* cmd;
    const char* cfg;
  };
  int compared = 0;
  std::vector<std::string> mismatched;
  for (const Run& r : {Run{"optimize", "two_level_transfer.json"}, Run{"optimize", "two_level_spectral.json"},
                       Run{"optimize", "lambda_transfer.json"}, Run{"optimize", "cnot_dephasing.json"},
                       Run{"propagate", "damping_propagate.json"}, Run{"scan", "speed_limit_scan.json"}}) {
    const fs::path a = root / (std::string(r.cfg) + ".1");
    const fs::path b = root / (std::string(r.cfg) + ".2");
    // Second run uses automatic threading to show results do not depend on it.
    if (cli(r.cmd, r.cfg, a, "1") != kExitOk || cli(r.cmd, r.cfg, b, "0") != kExitOk) {
      mismatched.push_back(std::string(r.cfg) + " (run failed)");
      continue;
    }
    for (const auto& entry : fs::directory_iterator(a)) {
      const auto name = entry.path().filename();
      std::string x = slurp(a / name), y = slurp(b / name);
      if (name == "convergence.csv") x = mask_seconds(x), y = mask_seconds(y);
      ++compared;
      if (x != y) mismatched.push_back(std::string(r.cfg) + "/" + name.string());
    }
  }
  fs::remove_all(root);
  std::string detail = std::to_string(compared) + " files compared";
  for (const auto& m : mismatched) detail += ", differs: " + m;
  return {mismatched.empty() && compared > 0, detail};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> known;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--known-failures") {
      std::stringstream list(argv[i + 1]);
      for (std::string item; std::getline(list, item, ',');) known.insert(std::stoi(item));
    }
  }
  const std::pair<const char*, Outcome (*)()> criteria[] = {
      {"CPTP propagation", cptp},
      {"analytic decay", decay},
      {"adjoint pairing", pairing},
      {"gradient consistency", gradient},
      {"monotonic convergence", monotone},
      {"fidelity functional equivalence", functionals},
      {"spectral constraint", spectral},
      {"Lie rank oracle", lie},
      {"speed-limit scan", speed_limit},
      {"determinism", determinism},
  };
  std::set<int> failed;
  for (int k = 0; k < 10; ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) failed.insert(k + 1);
    std::cout << (o.pass ? "PASS " : "FAIL ") << k + 1 << " " << criteria[k].first << ": " << o.detail
              << std::endl;
  }
  std::cout << (10 - failed.size()) << "/10 criteria pass" << std::endl;
  if (failed.empty()) return 0;
  return failed == known ? 0 : 1;
}
