#include <doctest.h>

#include "openkrotov/functionals.hpp"
#include "test_util.hpp"

using namespace openkrotov;
using testutil::max_abs;

namespace {

std::vector<Matrix> conjugated(const BasisSet& basis, const Matrix& v) {
  std::vector<Matrix> out;
  for (const auto& s : basis.states) out.push_back(v * s * v.adjoint());
  return out;
}

double fidelity_under(const Matrix& target, const Matrix& v, BasisStrategy strategy) {
  const GateTarget gate{target, strategy, {}, {}};
  return gate_fidelity(gate, conjugated(make_basis(strategy, target.rows()), v));
}

const BasisStrategy kStrategies[] = {BasisStrategy::FullBasis, BasisStrategy::Reduced3,
                                     BasisStrategy::DPlus1, BasisStrategy::DPlus2};

}  // namespace

TEST_CASE("state fidelity examples") {
  CHECK(state_fidelity(matrix_unit(2, 0, 0), matrix_unit(2, 0, 0)) == doctest::Approx(1.0));
  CHECK(state_fidelity(matrix_unit(2, 0, 0), matrix_unit(2, 1, 1)) == 0.0);
  CHECK(state_fidelity(pauli::identity() / 2.0, matrix_unit(2, 0, 0)) == doctest::Approx(0.5));
  CHECK_THROWS_AS(state_fidelity(matrix_unit(2, 0, 0), matrix_unit(3, 0, 0)), DimensionError);
}

TEST_CASE("basis sets") {
  const auto full = full_basis(2);
  REQUIRE(full.states.size() == 4);
  CHECK(full.states[1] == matrix_unit(2, 0, 1));
  CHECK(full.states[2] == matrix_unit(2, 1, 0));
  CHECK(full_basis(3).states.size() == 9);

  const auto r3 = reduced3_basis(2);
  REQUIRE(r3.states.size() == 3);
  CHECK(r3.states[0](0, 0).real() == doctest::Approx(2.0 / 3.0));
  CHECK(r3.states[0](1, 1).real() == doctest::Approx(1.0 / 3.0));
  CHECK(max_abs(r3.states[1] - Matrix::Constant(2, 2, 0.5)) < 1e-15);
  for (Index d : {2, 3, 5}) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(reduced3_basis(d).states[2]);
    for (Index k = 0; k < d; ++k) CHECK(es.eigenvalues()(k) == doctest::Approx(1.0 / double(d)));
  }

  CHECK(dplus1_basis(2).states.size() == 3);
  CHECK(dplus1_basis(4).states.size() == 5);
  const auto dp = dplus1_basis(2);
  CHECK(dp.states[0] == matrix_unit(2, 0, 0));
  CHECK(dp.states[1] == matrix_unit(2, 1, 1));
  CHECK(max_abs(dp.states[2] - Matrix::Constant(2, 2, 0.5)) < 1e-15);
  CHECK(dplus2_basis(4).states.size() == 6);
}

TEST_CASE("basis-fixing spectrum is strictly decreasing and normalized") {
  for (Index d = 2; d <= 12; ++d) {
    // Integer form: sum_i 2 (d + 1 - i) = d (d + 1).
    long long num = 0;
    for (long long i = 1; i <= d; ++i) num += 2 * (d + 1 - i);
    CHECK(num == d * (d + 1));
    const auto l = basis_state_spectrum(d);
    double sum = 0.0;
    for (std::size_t i = 0; i < l.size(); ++i) {
      sum += l[i];
      if (i > 0) CHECK(l[i] < l[i - 1]);
    }
    CHECK(std::abs(sum - 1.0) < 1e-15);
  }
}

TEST_CASE("gate fidelity examples") {
  std::mt19937_64 rng(17);
  const Matrix o = testutil::haar_unitary(3, rng);
  const Complex phase = std::polar(1.0, 0.77);
  for (auto s : kStrategies) {
    CHECK(fidelity_under(o, o, s) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fidelity_under(o, phase * o, s) == doctest::Approx(1.0).epsilon(1e-12));
    // global phase on the target itself
    CHECK(std::abs(fidelity_under(phase * o, o, s) - fidelity_under(o, o, s)) < 1e-12);
  }

  // Completely depolarizing channel at d = 2: every input maps to Tr(rho) I/2.
  const GateTarget id_full{pauli::identity(), BasisStrategy::FullBasis, {}, {}};
  std::vector<Matrix> depolarized;
  for (const auto& e : full_basis(2).states) depolarized.push_back(e.trace() * pauli::identity() / 2.0);
  CHECK(std::abs(gate_fidelity(id_full, depolarized) - 0.5) < 1e-12);

  CHECK(fidelity_under(pauli::identity(), pauli::z(), BasisStrategy::Reduced3) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("haar-random unitaries are certified only at the target") {
  std::mt19937_64 rng(2024);
  for (Index d : {2, 3, 4}) {
    for (int trial = 0; trial < 100; ++trial) {
      const Matrix o = testutil::haar_unitary(d, rng);
      const Matrix v = testutil::haar_unitary(d, rng);
      for (auto s : kStrategies) {
        CHECK(fidelity_under(o, v, s) < 1.0 - 1e-6);
      }
    }
  }
}

TEST_CASE("full-basis value for unitary dynamics") {
  std::mt19937_64 rng(31);
  for (Index d : {2, 3, 4}) {
    for (int trial = 0; trial < 10; ++trial) {
      const Matrix o = testutil::haar_unitary(d, rng);
      const Matrix v = testutil::haar_unitary(d, rng);
      const double dd = static_cast<double>(d);
      const double expected = (std::norm((o.adjoint() * v).trace()) + dd) / (dd * (dd + 1.0));
      CHECK(std::abs(fidelity_under(o, v, BasisStrategy::FullBasis) - expected) < 1e-12);
    }
  }
  // O^dagger V symmetric but not a phase: a pairing without the dagger would score 1 here.
  CHECK(fidelity_under(pauli::identity(), pauli::x(), BasisStrategy::FullBasis) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("target co-states") {
  const StateToState transfer{matrix_unit(2, 0, 0), matrix_unit(2, 1, 1)};
  const auto sigma = target_costates(transfer, {}, 2);
  REQUIRE(sigma.size() == 1);
  CHECK(sigma[0] == matrix_unit(2, 1, 1));

  const GateTarget flip{pauli::x(), BasisStrategy::DPlus1, {}, {}};
  const auto c = target_costates(flip, dplus1_basis(2), 2);
  REQUIRE(c.size() == 3);
  CHECK(max_abs(c[0] - matrix_unit(2, 1, 1) / 3.0) < 1e-15);

  const GateTarget weighted{pauli::x(), BasisStrategy::Reduced3, {2.0, 0.5, 0.5}, {}};
  const GateTarget plain{pauli::x(), BasisStrategy::Reduced3, {}, {}};
  const auto basis = reduced3_basis(2);
  const auto cw = target_costates(weighted, basis, 2);
  const auto cp = target_costates(plain, basis, 2);
  for (std::size_t j = 0; j < 3; ++j) {
    const Matrix image = pauli::x() * basis.states[j] * pauli::x();
    CHECK(max_abs(cw[j] - image * (weighted.weights[j] / (3.0 * basis.normalizations[j]))) < 1e-15);
    CHECK(max_abs(cw[j] - weighted.weights[j] * cp[j]) < 1e-15);
  }
}

TEST_CASE("pairing functional reproduces gate fidelity") {
  std::mt19937_64 rng(5);
  for (auto s : kStrategies) {
    const GateTarget gate{testutil::haar_unitary(2, rng), s, {}, {}};
    const auto basis = make_basis(s, 2);
    const Matrix v = testutil::haar_unitary(2, rng);
    const auto evolved = conjugated(basis, v);
    CHECK(std::abs(pairing_functional(target_costates(gate, basis, 2), evolved) - gate_fidelity(gate, evolved)) <
          1e-13);
  }
}

TEST_CASE("gate on a logical subspace of a larger space") {
  std::mt19937_64 rng(6);
  const Matrix o = testutil::haar_unitary(2, rng);
  const GateTarget gate{o, BasisStrategy::Reduced3, {}, {0, 2}};
  const auto prepared = prepare_objective(gate, 3);
  REQUIRE(prepared.initial.size() == 3);
  CHECK(prepared.initial[0].rows() == 3);
  CHECK(prepared.initial[0](1, 1) == 0.0);
  // Unitary acting as o on span{0, 2}, leaving level 1 alone.
  Matrix u = Matrix::Identity(3, 3);
  u(0, 0) = o(0, 0);
  u(0, 2) = o(0, 1);
  u(2, 0) = o(1, 0);
  u(2, 2) = o(1, 1);
  std::vector<Matrix> evolved;
  for (const auto& s : prepared.initial) evolved.push_back(u * s * u.adjoint());
  CHECK(gate_fidelity(gate, evolved) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pairing_functional(prepared.costates, evolved) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gate validation") {
  CHECK_THROWS(validate_gate({Matrix::Constant(2, 2, 1.0), BasisStrategy::Reduced3, {}, {}}, 2));
  CHECK_THROWS(validate_gate({pauli::x(), BasisStrategy::Reduced3, {}, {0, 0}}, 3));
  CHECK_THROWS(validate_gate({pauli::x(), BasisStrategy::Reduced3, {}, {0, 3}}, 3));
  CHECK_THROWS(validate_gate({pauli::x(), BasisStrategy::Reduced3, {}, {0}}, 3));
  CHECK_THROWS(validate_gate({pauli::x(), BasisStrategy::FullBasis, {1, 1, 1, 1}, {}}, 2));
  CHECK_THROWS(validate_gate({pauli::x(), BasisStrategy::Reduced3, {1.0, 1.0}, {}}, 2));
  CHECK_THROWS(validate_gate({pauli::x(), BasisStrategy::Reduced3, {2.0, 2.0, 2.0}, {}}, 2));
  CHECK_THROWS(validate_gate({pauli::x(), BasisStrategy::Reduced3, {3.0, 0.0, 0.0}, {}}, 2));
  CHECK_NOTHROW(validate_gate({pauli::x(), BasisStrategy::Reduced3, {2.0, 0.5, 0.5}, {}}, 2));
  CHECK_NOTHROW(validate_gate({pauli::x(), BasisStrategy::DPlus1, {}, {1, 2}}, 3));
}

TEST_CASE("basis strategy names") {
  for (auto s : kStrategies) CHECK(basis_strategy_from_string(to_string(s)) == s);
  CHECK_THROWS(basis_strategy_from_string("bogus"));
}
