#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "fincap/bodies.hpp"
#include "fincap/capacity.hpp"
#include "fincap/norms.hpp"
#include "fincap/pde.hpp"

namespace fincap::cli {

struct NamedNorm {
  std::string name;
  norms::NormModel model;
};

struct NamedBody {
  std::string name;
  bodies::ConvexBody body;
  std::string norm;  // default norm for this body ("" when none given)
};

struct Case {
  std::string body;
  std::string norm;
};

/// One run, fully described by a JSON file; see docs/config.md.
struct Config {
  std::vector<NamedNorm> norms;
  std::vector<NamedBody> bodies;
  std::vector<Case> cases;  // explicit "cases", else one per body with its norm

  int grid = 96;
  int coarse_grid = 48;
  std::vector<double> r_out;
  pde::SolverOptions solver;
  int flux_pol = 32;
  capacity::Thresholds thresholds;

  std::uint64_t seed = 7;
  int trials = 10000;
  int samples = 1000;
  std::vector<double> lambdas{0.0, 0.5, 1.0, 1.5, 2.0};

  const norms::NormModel& norm(const std::string& name) const;
  const NamedBody& body(const std::string& name) const;
  /// Throws ValidationError when there is nothing to run.
  const std::vector<Case>& require_cases() const;
};

Config parse_config(const nlohmann::json& j);
/// Empty path gives the defaults with no norms or bodies.
Config load_config(const std::string& path);

}  // namespace fincap::cli
