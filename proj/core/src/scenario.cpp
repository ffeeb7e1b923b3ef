#include "lqgame/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace lqgame {
namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& what) { throw ScenarioError(what); }

const Json& member(const Json& node, const std::string& key,
                   const std::string& where) {
  auto it = node.find(key);
  if (it == node.end()) fail(where + ": missing \"" + key + "\"");
  return *it;
}

double number(const Json& node, const std::string& where) {
  if (!node.is_number()) fail(where + ": expected a number");
  return node.get<double>();
}

// Row-major nested arrays; a bare number is accepted as a 1x1 matrix.
Matrix parse_matrix(const Json& node, const std::string& where) {
  if (node.is_number()) {
    Matrix m(1, 1);
    m(0, 0) = node.get<double>();
    return m;
  }
  if (!node.is_array() || node.empty()) fail(where + ": expected a matrix");
  const auto& first = node.front();
  if (!first.is_array()) fail(where + ": expected nested row arrays");
  const size_t rows = node.size();
  const size_t cols = first.size();
  Matrix m(rows, cols);
  for (size_t i = 0; i < rows; ++i) {
    const auto& row = node[i];
    if (!row.is_array() || row.size() != cols) {
      fail(where + ": row " + std::to_string(i) + " has " +
           std::to_string(row.size()) + " entries, expected " +
           std::to_string(cols));
    }
    for (size_t j = 0; j < cols; ++j) {
      m(i, j) = number(row[j], where);
    }
  }
  return m;
}

Vector parse_vector(const Json& node, const std::string& where) {
  if (!node.is_array()) fail(where + ": expected an array");
  Vector v(node.size());
  for (size_t i = 0; i < node.size(); ++i) {
    v(i) = number(node[i], where);
  }
  return v;
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(m(i, j));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out.push_back(v(i));
  }
  return out;
}

InitialInputMode parse_init_mode(const Json& node) {
  const std::string s = node.get<std::string>();
  if (s == "cold_start") return InitialInputMode::ColdStart;
  if (s == "matched") return InitialInputMode::Matched;
  fail("lag.initial_input_mode: expected \"cold_start\" or \"matched\", got \"" +
       s + "\"");
}

}  // namespace

CartMatrices build_two_cart(double m, double k_spring, double c_damper,
                            double dt) {
  if (!(m > 0.0)) throw std::domain_error("two_cart: mass must be positive");
  if (!(dt > 0.0)) throw std::domain_error("two_cart: dt must be positive");
  const double k = k_spring / m;
  const double c = c_damper / m;
  Matrix Ac(4, 4);
  Ac << 0, 1, 0, 0,    //
      -k, -c, k, c,    //
      0, 0, 0, 1,      //
      k, c, -k, -c;
  Matrix B1c = Matrix::Zero(4, 1);
  B1c(1, 0) = 1.0 / m;
  Matrix B2c = Matrix::Zero(4, 1);
  B2c(3, 0) = 1.0 / m;

  CartMatrices out;
  out.A = Matrix::Identity(4, 4) + dt * Ac;
  out.B1 = dt * B1c;
  out.B2 = dt * B2c;
  return out;
}

GameDefinition ScenarioConfig::to_game() const {
  return GameDefinition(A, B1, B2, Q1, Q2, R1, R2, Q1N, Q2N, horizon);
}

std::string to_string(CaseKind kind) {
  switch (kind) {
    case CaseKind::Fne: return "fne";
    case CaseKind::Ref: return "ref";
    case CaseKind::Cf: return "cf";
  }
  return "?";
}

std::optional<CaseKind> case_from_string(const std::string& name) {
  if (name == "fne") return CaseKind::Fne;
  if (name == "ref") return CaseKind::Ref;
  if (name == "cf") return CaseKind::Cf;
  return std::nullopt;
}

ScenarioConfig scenario_from_json_text(const std::string& text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }

  ScenarioConfig cfg;

  const Json& model = member(root, "model", "scenario");
  const std::string type = member(model, "type", "model").get<std::string>();
  if (type == "two_cart") {
    TwoCartParams p;
    p.m = number(member(model, "m", "model"), "model.m");
    p.k_spring = number(member(model, "k_spring", "model"), "model.k_spring");
    p.c_damper = number(member(model, "c_damper", "model"), "model.c_damper");
    p.dt = number(member(model, "dt", "model"), "model.dt");
    if (!(p.m > 0.0) || !(p.dt > 0.0)) {
      fail("model: two_cart requires m > 0 and dt > 0");
    }
    const CartMatrices mats = build_two_cart(p.m, p.k_spring, p.c_damper, p.dt);
    cfg.two_cart = p;
    cfg.A = mats.A;
    cfg.B1 = mats.B1;
    cfg.B2 = mats.B2;
    cfg.model_dt = p.dt;
  } else if (type == "explicit") {
    cfg.A = parse_matrix(member(model, "A", "model"), "model.A");
    cfg.B1 = parse_matrix(member(model, "B1", "model"), "model.B1");
    cfg.B2 = parse_matrix(member(model, "B2", "model"), "model.B2");
    if (model.contains("dt")) {
      cfg.model_dt = number(model["dt"], "model.dt");
    }
  } else {
    fail("model.type: expected \"two_cart\" or \"explicit\", got \"" + type + "\"");
  }
  const auto n = cfg.A.rows();

  const Json& weights = member(root, "weights", "scenario");
  cfg.Q1 = parse_matrix(member(weights, "Q1", "weights"), "weights.Q1");
  cfg.Q2 = parse_matrix(member(weights, "Q2", "weights"), "weights.Q2");
  cfg.R1 = parse_matrix(member(weights, "R1", "weights"), "weights.R1");
  cfg.R2 = parse_matrix(member(weights, "R2", "weights"), "weights.R2");
  cfg.Q1N = weights.contains("Q1N")
                ? parse_matrix(weights["Q1N"], "weights.Q1N")
                : cfg.Q1;
  cfg.Q2N = weights.contains("Q2N")
                ? parse_matrix(weights["Q2N"], "weights.Q2N")
                : cfg.Q2;

  const Json& horizon = member(root, "horizon", "scenario");
  if (!horizon.is_number_integer() || horizon.get<int>() < 1) {
    fail("horizon: expected an integer >= 1");
  }
  cfg.horizon = horizon.get<int>();

  cfg.x0 = parse_vector(member(root, "x0", "scenario"), "x0");
  if (cfg.x0.size() != n) {
    fail("x0: expected dimension " + std::to_string(n) + ", got " +
         std::to_string(cfg.x0.size()));
  }

  if (root.contains("lag")) {
    const Json& lag = root["lag"];
    const double tau = number(member(lag, "tau", "lag"), "lag.tau");
    double dt = 0.0;
    if (lag.contains("dt")) {
      dt = number(lag["dt"], "lag.dt");
      if (cfg.model_dt && *cfg.model_dt != dt) {
        fail("lag.dt must equal model dt when both are present");
      }
    } else if (cfg.model_dt) {
      dt = *cfg.model_dt;
    } else {
      fail("lag: dt is required when the model carries no sampling period");
    }
    InitialInputMode mode = InitialInputMode::ColdStart;
    if (lag.contains("initial_input_mode")) {
      mode = parse_init_mode(lag["initial_input_mode"]);
    }
    if (!(tau > 0.0) || !(dt > 0.0)) {
      fail("lag: tau and dt must be positive");
    }
    cfg.lag = build_lag_model(tau, dt, mode);
  }

  if (root.contains("cases")) {
    for (const auto& c : root["cases"]) {
      const auto kind = case_from_string(c.get<std::string>());
      if (!kind) fail("cases: unknown case \"" + c.get<std::string>() + "\"");
      cfg.cases.push_back(*kind);
    }
  } else {
    cfg.cases.push_back(CaseKind::Fne);
    if (cfg.lag) {
      cfg.cases.push_back(CaseKind::Ref);
      cfg.cases.push_back(CaseKind::Cf);
    }
  }
  for (CaseKind c : cfg.cases) {
    if (c != CaseKind::Fne && !cfg.lag) {
      fail("cases: \"" + to_string(c) + "\" requires a lag block");
    }
  }

  if (root.contains("output")) {
    const Json& out = root["output"];
    if (out.contains("dir")) cfg.output.dir = out["dir"].get<std::string>();
    if (out.contains("trajectories")) {
      cfg.output.trajectories = out["trajectories"].get<bool>();
    }
    if (out.contains("report")) cfg.output.report = out["report"].get<bool>();
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail("cannot open scenario file " + file.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return scenario_from_json_text(buffer.str());
}

std::string scenario_to_json_text(const ScenarioConfig& config) {
  Json root;
  Json model;
  if (config.two_cart) {
    model["type"] = "two_cart";
    model["m"] = config.two_cart->m;
    model["k_spring"] = config.two_cart->k_spring;
    model["c_damper"] = config.two_cart->c_damper;
    model["dt"] = config.two_cart->dt;
  } else {
    model["type"] = "explicit";
    model["A"] = matrix_to_json(config.A);
    model["B1"] = matrix_to_json(config.B1);
    model["B2"] = matrix_to_json(config.B2);
    if (config.model_dt) model["dt"] = *config.model_dt;
  }
  root["model"] = std::move(model);

  Json weights;
  weights["Q1"] = matrix_to_json(config.Q1);
  weights["Q2"] = matrix_to_json(config.Q2);
  weights["R1"] = matrix_to_json(config.R1);
  weights["R2"] = matrix_to_json(config.R2);
  weights["Q1N"] = matrix_to_json(config.Q1N);
  weights["Q2N"] = matrix_to_json(config.Q2N);
  root["weights"] = std::move(weights);

  root["horizon"] = config.horizon;
  root["x0"] = vector_to_json(config.x0);

  if (config.lag) {
    Json lag;
    lag["tau"] = config.lag->tau;
    lag["dt"] = config.lag->dt;
    lag["initial_input_mode"] =
        config.lag->initial_input_mode == InitialInputMode::Matched
            ? "matched"
            : "cold_start";
    root["lag"] = std::move(lag);
  }

  Json cases = Json::array();
  for (CaseKind c : config.cases) cases.push_back(to_string(c));
  root["cases"] = std::move(cases);

  Json output;
  output["dir"] = config.output.dir;
  output["trajectories"] = config.output.trajectories;
  output["report"] = config.output.report;
  root["output"] = std::move(output);

  return root.dump(2) + "\n";
}

void save_scenario(const ScenarioConfig& config,
                   const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) fail("cannot write scenario file " + file.string());
  out << scenario_to_json_text(config);
}

}  // namespace lqgame
