#pragma once

#include <map>
#include <string>
#include <vector>

#include "openkrotov/core.hpp"

namespace openkrotov {

enum class ModelName {
  TwoLevelDamping,    ///< H0 = (omega/2) sz, H1 = sx, decay |0><1| at gamma
  TwoLevelDephasing,  ///< H0 = (omega/2) sz, H1 = sx, dephasing sz at gamma_phi
  LambdaDecay,        ///< levels 0, 1, 2; controls 0-2 and 1-2; decay 2->0, 2->1
  AnharmonicLadder,   ///< n levels, ladder coupling, decay |k-1><k|
  TwoQubitDephasing,  ///< J sz sz + local splittings; sx on each qubit; local dephasing
};

std::string to_string(ModelName name);
ModelName model_name_from_string(const std::string& s);

/// Model name plus named real parameters. Missing parameters take defaults:
///
///   TwoLevelDamping    omega=1, gamma=1
///   TwoLevelDephasing  omega=1, gamma_phi=0
///   LambdaDecay        e1=0, delta=0, gamma0=0, gamma1=0
///   AnharmonicLadder   levels=3, omega=1, anharmonicity=-0.2, gamma=0, flat_decay=0
///   TwoQubitDephasing  J=1, omega1=1, omega2=1, gamma_phi=0
struct ModelSpec {
  ModelName name = ModelName::TwoLevelDamping;
  std::map<std::string, double> params;

  bool operator==(const ModelSpec&) const = default;
};

LindbladGenerator build_model(const ModelSpec& spec);

/// Basis indices of the computational subspace.
std::vector<Index> logical_subspace(const ModelSpec& spec);

}  // namespace openkrotov
