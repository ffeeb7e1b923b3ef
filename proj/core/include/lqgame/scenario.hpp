#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lqgame/compensator.hpp"
#include "lqgame/game.hpp"
#include "lqgame/sim.hpp"

namespace lqgame {

class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

struct TwoCartParams {
  double m = 1.0;
  double k_spring = 0.0;
  double c_damper = 0.0;
  double dt = 0.0;
};

struct CartMatrices {
  Matrix A, B1, B2;
};

/// Forward-Euler discretization of two carts coupled by a spring-damper,
/// state (p1, v1, p2, v2), one force input per cart.
CartMatrices build_two_cart(double m, double k_spring, double c_damper, double dt);

struct OutputOptions {
  std::string dir = ".";
  bool trajectories = true;
  bool report = true;
};

// A fully resolved run description: model matrices, weights, horizon,
// initial state, optional lag block, requested cases, output options.
struct ScenarioConfig {
  std::optional<TwoCartParams> two_cart;  // set when built from the named model
  Matrix A, B1, B2;
  std::optional<double> model_dt;
  Matrix Q1, Q2, R1, R2;
  Matrix Q1N, Q2N;  // default to Q1/Q2 when omitted in the file
  int horizon = 0;
  Vector x0;
  std::optional<LagModel> lag;
  std::vector<CaseKind> cases;
  OutputOptions output;

  GameDefinition to_game() const;
};

/// Parses a scenario from JSON text. Throws ScenarioError with a location
/// hint on malformed or inconsistent input.
ScenarioConfig scenario_from_json_text(const std::string& text);
ScenarioConfig load_scenario(const std::filesystem::path& file);

/// Normalized JSON form; re-reading it yields identical solver inputs.
std::string scenario_to_json_text(const ScenarioConfig& config);
void save_scenario(const ScenarioConfig& config, const std::filesystem::path& file);

std::string to_string(CaseKind kind);
std::optional<CaseKind> case_from_string(const std::string& name);

}  // namespace lqgame
