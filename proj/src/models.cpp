#include "openkrotov/models.hpp"

#include <cmath>

namespace openkrotov {

std::string to_string(ModelName name) {
  switch (name) {
    case ModelName::TwoLevelDamping: return "TwoLevelDamping";
    case ModelName::TwoLevelDephasing: return "TwoLevelDephasing";
    case ModelName::LambdaDecay: return "LambdaDecay";
    case ModelName::AnharmonicLadder: return "AnharmonicLadder";
    case ModelName::TwoQubitDephasing: return "TwoQubitDephasing";
  }
  return "unknown";
}

ModelName model_name_from_string(const std::string& s) {
  for (auto n : {ModelName::TwoLevelDamping, ModelName::TwoLevelDephasing, ModelName::LambdaDecay,
                 ModelName::AnharmonicLadder, ModelName::TwoQubitDephasing}) {
    if (to_string(n) == s) return n;
  }
  throw std::invalid_argument("unknown model '" + s + "'");
}

namespace {

class Params {
 public:
  Params(const ModelSpec& spec, std::map<std::string, double> defaults)
      : values_(std::move(defaults)) {
    for (const auto& [key, value] : spec.params) {
      if (!values_.contains(key)) {
        throw std::invalid_argument("model " + to_string(spec.name) + " has no parameter '" + key + "'");
      }
      if (!std::isfinite(value)) throw std::invalid_argument("parameter '" + key + "' is not finite");
      values_[key] = value;
    }
  }

  double get(const std::string& key) const { return values_.at(key); }

  double rate(const std::string& key) const {
    const double v = get(key);
    if (v < 0.0) throw std::invalid_argument("rate '" + key + "' must be nonnegative");
    return v;
  }

 private:
  std::map<std::string, double> values_;
};

OperatorMatrix herm(Matrix m) { return OperatorMatrix::hermitian(std::move(m)); }

Matrix symmetric_coupling(Index d, Index a, Index b) {
  return matrix_unit(d, a, b) + matrix_unit(d, b, a);
}

LindbladGenerator two_level(const ModelSpec& spec, bool damping) {
  const Params p(spec, damping ? std::map<std::string, double>{{"omega", 1.0}, {"gamma", 1.0}}
                               : std::map<std::string, double>{{"omega", 1.0}, {"gamma_phi", 0.0}});
  const Matrix h0 = 0.5 * p.get("omega") * pauli::z();
  std::vector<Channel> channels;
  if (damping) {
    channels.push_back({OperatorMatrix(matrix_unit(2, 0, 1)), p.rate("gamma")});
  } else {
    channels.push_back({herm(pauli::z()), p.rate("gamma_phi")});
  }
  return LindbladGenerator(herm(h0), {herm(pauli::x())}, std::move(channels));
}

LindbladGenerator lambda_system(const ModelSpec& spec) {
  const Params p(spec, {{"e1", 0.0}, {"delta", 0.0}, {"gamma0", 0.0}, {"gamma1", 0.0}});
  Matrix h0 = Matrix::Zero(3, 3);
  h0(1, 1) = p.get("e1");
  h0(2, 2) = p.get("delta");
  std::vector<Channel> channels;
  if (p.rate("gamma0") > 0.0) channels.push_back({OperatorMatrix(matrix_unit(3, 0, 2)), p.get("gamma0")});
  if (p.rate("gamma1") > 0.0) channels.push_back({OperatorMatrix(matrix_unit(3, 1, 2)), p.get("gamma1")});
  return LindbladGenerator(herm(h0), {herm(symmetric_coupling(3, 0, 2)), herm(symmetric_coupling(3, 1, 2))},
                           std::move(channels));
}

LindbladGenerator ladder(const ModelSpec& spec) {
  const Params p(spec, {{"levels", 3.0},
                        {"omega", 1.0},
                        {"anharmonicity", -0.2},
                        {"gamma", 0.0},
                        {"flat_decay", 0.0}});
  const double levels = p.get("levels");
  if (levels < 3.0 || levels != std::floor(levels) || levels > 64.0) {
    throw std::invalid_argument("ladder needs an integer number of levels >= 3");
  }
  const auto n = static_cast<Index>(levels);
  const double omega = p.get("omega");
  const double anharm = p.get("anharmonicity");
  const double gamma = p.rate("gamma");
  const bool flat = p.get("flat_decay") != 0.0;

  Matrix h0 = Matrix::Zero(n, n);
  Matrix h1 = Matrix::Zero(n, n);
  std::vector<Channel> channels;
  for (Index k = 0; k < n; ++k) {
    const double kk = static_cast<double>(k);
    h0(k, k) = omega * kk + 0.5 * anharm * kk * (kk - 1.0);
    if (k + 1 < n) {
      h1(k, k + 1) = h1(k + 1, k) = std::sqrt(kk + 1.0);
    }
    if (k >= 1 && gamma > 0.0) {
      channels.push_back({OperatorMatrix(matrix_unit(n, k - 1, k)), flat ? gamma : kk * gamma});
    }
  }
  return LindbladGenerator(herm(h0), {herm(h1)}, std::move(channels));
}

LindbladGenerator two_qubit(const ModelSpec& spec) {
  const Params p(spec, {{"J", 1.0}, {"omega1", 1.0}, {"omega2", 1.0}, {"gamma_phi", 0.0}});
  const Matrix id = pauli::identity(2);
  const Matrix zi = kron(pauli::z(), id);
  const Matrix iz = kron(id, pauli::z());
  const Matrix h0 = p.get("J") * kron(pauli::z(), pauli::z()) + 0.5 * p.get("omega1") * zi +
                    0.5 * p.get("omega2") * iz;
  std::vector<Channel> channels;
  const double g = p.rate("gamma_phi");
  if (g > 0.0) {
    channels.push_back({herm(zi), g});
    channels.push_back({herm(iz), g});
  }
  return LindbladGenerator(herm(h0), {herm(kron(pauli::x(), id)), herm(kron(id, pauli::x()))},
                           std::move(channels));
}

}  // namespace

LindbladGenerator build_model(const ModelSpec& spec) {
  switch (spec.name) {
    case ModelName::TwoLevelDamping: return two_level(spec, true);
    case ModelName::TwoLevelDephasing: return two_level(spec, false);
    case ModelName::LambdaDecay: return lambda_system(spec);
    case ModelName::AnharmonicLadder: return ladder(spec);
    case ModelName::TwoQubitDephasing: return two_qubit(spec);
  }
  throw std::invalid_argument("unknown model");
}

std::vector<Index> logical_subspace(const ModelSpec& spec) {
  if (spec.name == ModelName::TwoQubitDephasing) return {0, 1, 2, 3};
  return {0, 1};
}

}  // namespace openkrotov
