// Named initial data. The periodic variants follow the descriptions in the
// README; scheme1 gets versions that respect the no-slip and zero tangential
// trace conditions on the unit square.

#ifndef MHDLAB_SCENARIOS_HPP
#define MHDLAB_SCENARIOS_HPP

#include "mhdlab/fespace.hpp"
#include "mhdlab/numerics.hpp"

#include <string>
#include <vector>

namespace mhdlab {

struct Scenario {
  std::string name;
  ScalarFn rho;
  VectorFn u;
  VectorFn B;
};

const std::vector<std::string>& scenario_names();

/// Throws std::invalid_argument for unknown names and for orszag-tang-like with scheme1.
Scenario make_scenario(const std::string& name, Variant v);

}  // namespace mhdlab

#endif  // MHDLAB_SCENARIOS_HPP
