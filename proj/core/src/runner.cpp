#include "lqgame/runner.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "lqgame/log.hpp"
#include "lqgame/sensitivity.hpp"

namespace lqgame {
namespace {

using Json = nlohmann::ordered_json;

// Shortest round-trip representation, used in CSV files.
std::string full_precision(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// 6 significant digits, used on stdout.
std::string display(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json matrix_list_json(const std::vector<Matrix>& ms) {
  Json out = Json::array();
  for (const Matrix& m : ms) out.push_back(matrix_json(m));
  return out;
}

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ScenarioError("cannot write " + file.string());
  out << text;
}

void write_json(const std::filesystem::path& file, const Json& j) {
  write_text(file, j.dump(2) + "\n");
}

// Timestamps are confined to this file so the data artifacts stay
// byte-reproducible.
void write_run_metadata(const std::filesystem::path& out_dir) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char stamp[64];
  std::strftime(stamp, sizeof(stamp), "%FT%TZ", std::gmtime(&t));
  Json meta;
  meta["tool"] = "lqgame";
  meta["generated_at"] = stamp;
  write_json(out_dir / "run_meta.json", meta);
}

Json comparison_json(const CaseComparison& t) {
  Json cases;
  cases["fne"] = Json{{"J1", t.J1_fne}, {"J2", t.J2_fne}};
  cases["ref"] = Json{{"J1", t.J1_ref}, {"J2", t.J2_ref}};
  cases["cf"] = Json{{"J1", t.J1_cf}, {"J2", t.J2_cf}};
  Json derived;
  derived["ref_vs_fne_increase_pct"] = t.ref_vs_fne_increase_pct;
  derived["cf_vs_ref_improvement_pct"] = t.cf_vs_ref_improvement_pct;
  derived["loss_recovered_pct"] = t.loss_recovered_pct;
  Json out;
  out["cases"] = std::move(cases);
  out["derived"] = std::move(derived);
  return out;
}

void print_comparison(const CaseComparison& t) {
  std::printf("case  %12s  %12s\n", "J1", "J2");
  std::printf("fne   %12s  %12s\n", display(t.J1_fne).c_str(), display(t.J2_fne).c_str());
  std::printf("ref   %12s  %12s\n", display(t.J1_ref).c_str(), display(t.J2_ref).c_str());
  std::printf("cf    %12s  %12s\n", display(t.J1_cf).c_str(), display(t.J2_cf).c_str());
  std::printf("ref vs fne increase:   %s%%\n", display(t.ref_vs_fne_increase_pct).c_str());
  std::printf("cf vs ref improvement: %s%%\n", display(t.cf_vs_ref_improvement_pct).c_str());
  std::printf("loss recovered:        %s%%\n", display(t.loss_recovered_pct).c_str());
}

struct SolvedScenario {
  GameDefinition game;
  FneSolution fne;
  std::optional<CompensatorGains> cf;
};

// validate + solve + (compensator when a lag is present). Throws the same
// exceptions the underlying modules throw; callers map them to statuses.
SolvedScenario solve_pipeline(const ScenarioConfig& config, bool need_cf) {
  GameDefinition game = config.to_game();
  const ValidationReport report = validate_game(game);
  if (!report.definiteness_ok() || !report.all_ok()) {
    std::string detail;
    for (const auto& m : report.messages) detail += "  " + m + "\n";
    throw ScenarioError("validation failed:\n" + detail);
  }
  FneSolution fne = solve_fne(game);
  std::optional<CompensatorGains> cf;
  if (need_cf) {
    if (!config.lag) throw ScenarioError("compensated case requires a lag block");
    const AugmentedSystem aug = build_augmented_system(
        game, fne, *config.lag, CompensatorMode::FullLag);
    cf = solve_compensator(game, aug);
  }
  return SolvedScenario{std::move(game), std::move(fne), std::move(cf)};
}

bool wants(const ScenarioConfig& config, CaseKind kind) {
  for (CaseKind c : config.cases) {
    if (c == kind) return true;
  }
  return false;
}

int status_of(const std::exception& e) {
  if (dynamic_cast<const SingularStageSystem*>(&e)) {
    return to_exit_code(RunStatus::SolverSingularity);
  }
  if (dynamic_cast<const DivergenceError*>(&e)) {
    return to_exit_code(RunStatus::Divergence);
  }
  return to_exit_code(RunStatus::ValidationFailure);
}

}  // namespace

void write_trajectory_csv(const GameDefinition& game, const SimulationResult& result,
                          const std::filesystem::path& file) {
  const int N = result.horizon();
  const int n = game.state_dim();
  const int m1 = game.input_dim(1);
  const int m2 = game.input_dim(2);

  std::ostringstream csv;
  csv << "k";
  for (int i = 1; i <= n; ++i) csv << ",x" << i;
  for (int i = 1; i <= m1; ++i) csv << ",u1_" << i;
  for (int i = 1; i <= m2; ++i) csv << ",u2_applied_" << i;
  for (int i = 1; i <= m2; ++i) csv << ",u2_intended_" << i;
  for (int i = 1; i <= n; ++i) csv << ",w_" << i;
  csv << ",stage_cost_1,stage_cost_2\n";

  for (int k = 0; k <= N; ++k) {
    csv << k;
    for (int i = 0; i < n; ++i) csv << "," << full_precision(result.x[k](i));
    if (k < N) {
      for (int i = 0; i < m1; ++i) csv << "," << full_precision(result.u1[k](i));
      for (int i = 0; i < m2; ++i)
        csv << "," << full_precision(result.u2_applied[k](i));
      for (int i = 0; i < m2; ++i)
        csv << "," << full_precision(result.u2_intended[k](i));
      for (int i = 0; i < n; ++i) csv << "," << full_precision(result.w[k](i));
    } else {
      // Terminal row: no inputs or disturbance, terminal cost terms only.
      for (int i = 0; i < m1 + 2 * m2 + n; ++i) csv << ",";
    }
    csv << "," << full_precision(result.stage_cost1[k]);
    csv << "," << full_precision(result.stage_cost2[k]);
    csv << "\n";
  }
  write_text(file, csv.str());
}

RunStatus run_validate(const ScenarioConfig& config) {
  GameDefinition game = config.to_game();
  const ValidationReport report = validate_game(game);
  std::printf("definiteness: Q1 %s, Q2 %s, Q1N %s, Q2N %s, R1 %s, R2 %s\n",
              report.q1_psd ? "ok" : "FAIL", report.q2_psd ? "ok" : "FAIL",
              report.q1n_psd ? "ok" : "FAIL", report.q2n_psd ? "ok" : "FAIL",
              report.r1_pd ? "ok" : "FAIL", report.r2_pd ? "ok" : "FAIL");
  std::printf("controllability: %s\n", report.controllable ? "ok" : "FAIL");
  int bad_stages = 0;
  double worst = 0.0;
  for (size_t k = 0; k < report.mk_invertible.size(); ++k) {
    if (!report.mk_invertible[k]) ++bad_stages;
    worst = std::max(worst, report.mk_condition[k]);
  }
  std::printf("stage coupling: %d of %zu stages ill-conditioned (worst cond %s)\n",
              bad_stages, report.mk_invertible.size(), display(worst).c_str());
  for (const auto& m : report.messages) std::printf("note: %s\n", m.c_str());
  return report.all_ok() ? RunStatus::Ok : RunStatus::ValidationFailure;
}

RunStatus run_solve(const ScenarioConfig& config,
                    const std::filesystem::path& out_dir) {
  try {
    SolvedScenario s = solve_pipeline(config, config.lag.has_value());
    std::filesystem::create_directories(out_dir);
    Json out;
    out["horizon"] = config.horizon;
    out["K1"] = matrix_list_json(s.fne.K1);
    out["K2"] = matrix_list_json(s.fne.K2);
    out["P1"] = matrix_list_json(s.fne.P1);
    out["P2"] = matrix_list_json(s.fne.P2);
    out["Acl"] = matrix_list_json(s.fne.Acl);
    if (s.cf) {
      Json comp;
      comp["mode"] = "full_lag";
      comp["alpha"] = config.lag->alpha;
      comp["K"] = matrix_list_json(s.cf->K);
      comp["L"] = matrix_list_json(s.cf->L);
      comp["Pbar"] = matrix_list_json(s.cf->Pbar);
      out["compensator"] = std::move(comp);
    }
    write_json(out_dir / "solution.json", out);
    write_run_metadata(out_dir);
    std::printf("solution written to %s\n", (out_dir / "solution.json").c_str());
    return RunStatus::Ok;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "solve: %s\n", e.what());
    return static_cast<RunStatus>(status_of(e));
  }
}

RunStatus run_simulate(const ScenarioConfig& config, CaseKind kind,
                       const std::filesystem::path& out_dir) {
  try {
    SolvedScenario s = solve_pipeline(config, kind == CaseKind::Cf);
    PolicyCase policy;
    policy.kind = kind;
    policy.fne = &s.fne;
    if (kind != CaseKind::Fne) {
      if (!config.lag) throw ScenarioError("case requires a lag block");
      policy.lag = *config.lag;
    }
    if (kind == CaseKind::Cf) policy.compensator = &*s.cf;
    const SimulationResult result = simulate(s.game, policy, config.x0);
    std::filesystem::create_directories(out_dir);
    write_trajectory_csv(s.game, result,
                         out_dir / ("trajectory_" + to_string(kind) + ".csv"));
    write_run_metadata(out_dir);
    std::printf("case %s: J1 = %s, J2 = %s\n", to_string(kind).c_str(),
                display(result.J1).c_str(), display(result.J2).c_str());
    return RunStatus::Ok;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "simulate: %s\n", e.what());
    return static_cast<RunStatus>(status_of(e));
  }
}

RunStatus run_scenario(const ScenarioConfig& config,
                       const std::filesystem::path& out_dir) {
  try {
    const bool need_cf = wants(config, CaseKind::Cf);
    SolvedScenario s = solve_pipeline(config, need_cf);
    std::filesystem::create_directories(out_dir);

    Json cases;
    std::optional<CaseComparison> table;
    for (CaseKind kind : config.cases) {
      PolicyCase policy;
      policy.kind = kind;
      policy.fne = &s.fne;
      if (kind != CaseKind::Fne) policy.lag = *config.lag;
      if (kind == CaseKind::Cf) policy.compensator = &*s.cf;
      const SimulationResult result = simulate(s.game, policy, config.x0);
      if (config.output.trajectories) {
        write_trajectory_csv(
            s.game, result, out_dir / ("trajectory_" + to_string(kind) + ".csv"));
      }
      cases[to_string(kind)] = Json{{"J1", result.J1}, {"J2", result.J2}};
      std::printf("case %s: J1 = %s, J2 = %s\n", to_string(kind).c_str(),
                  display(result.J1).c_str(), display(result.J2).c_str());
    }
    if (wants(config, CaseKind::Fne) && wants(config, CaseKind::Ref) && need_cf) {
      table = compare_cases(s.game, s.fne, *s.cf, *config.lag, config.x0);
    }

    if (config.output.report) {
      Json out;
      out["cases"] = std::move(cases);
      if (table) out["derived"] = comparison_json(*table)["derived"];
      write_json(out_dir / "costs.json", out);
    }
    write_run_metadata(out_dir);
    return RunStatus::Ok;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "run: %s\n", e.what());
    return static_cast<RunStatus>(status_of(e));
  }
}

std::vector<CalibrationEntry> calibrate_cases(const ScenarioConfig& config) {
  if (!config.lag) throw ScenarioError("calibration requires a lag block");
  std::vector<CalibrationEntry> entries;
  for (bool terminal_qi : {true, false}) {
    for (bool matched : {false, true}) {
      ScenarioConfig c = config;
      if (terminal_qi) {
        c.Q1N = c.Q1;
        c.Q2N = c.Q2;
      } else {
        c.Q1N = Matrix::Zero(c.Q1.rows(), c.Q1.cols());
        c.Q2N = Matrix::Zero(c.Q2.rows(), c.Q2.cols());
      }
      c.lag->initial_input_mode =
          matched ? InitialInputMode::Matched : InitialInputMode::ColdStart;
      SolvedScenario s = solve_pipeline(c, true);
      CalibrationEntry entry;
      entry.matched_init = matched;
      entry.terminal_qi = terminal_qi;
      entry.table = compare_cases(s.game, s.fne, *s.cf, *c.lag, c.x0);
      entries.push_back(std::move(entry));
    }
  }
  return entries;
}

RunStatus run_report(const ScenarioConfig& config,
                     const std::filesystem::path& out_dir, bool calibrate) {
  try {
    ScenarioConfig all = config;
    all.cases = {CaseKind::Fne, CaseKind::Ref, CaseKind::Cf};
    if (!all.lag) throw ScenarioError("report requires a lag block");

    SolvedScenario s = solve_pipeline(all, true);
    const CaseComparison table =
        compare_cases(s.game, s.fne, *s.cf, *all.lag, all.x0);
    std::filesystem::create_directories(out_dir);
    print_comparison(table);
    if (config.output.trajectories) {
      for (CaseKind kind : all.cases) {
        PolicyCase policy;
        policy.kind = kind;
        policy.fne = &s.fne;
        if (kind != CaseKind::Fne) policy.lag = *all.lag;
        if (kind == CaseKind::Cf) policy.compensator = &*s.cf;
        write_trajectory_csv(
            s.game, simulate(s.game, policy, all.x0),
            out_dir / ("trajectory_" + to_string(kind) + ".csv"));
      }
    }
    write_json(out_dir / "costs.json", comparison_json(table));

    if (calibrate) {
      const auto entries = calibrate_cases(all);
      Json rows = Json::array();
      std::printf("\ncalibration over terminal weights x lag initialization:\n");
      for (const auto& e : entries) {
        std::printf("  terminal=%-13s init=%-10s J1: %s / %s / %s  J2: %s / %s / %s\n",
                    e.terminal_qi ? "stage_weights" : "zero",
                    e.matched_init ? "matched" : "cold_start",
                    display(e.table.J1_fne).c_str(), display(e.table.J1_ref).c_str(),
                    display(e.table.J1_cf).c_str(), display(e.table.J2_fne).c_str(),
                    display(e.table.J2_ref).c_str(), display(e.table.J2_cf).c_str());
        Json row = comparison_json(e.table);
        row["terminal"] = e.terminal_qi ? "stage_weights" : "zero";
        row["initial_input_mode"] = e.matched_init ? "matched" : "cold_start";
        rows.push_back(std::move(row));
      }
      write_json(out_dir / "calibration.json", rows);
    }
    write_run_metadata(out_dir);
    return RunStatus::Ok;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "report: %s\n", e.what());
    return static_cast<RunStatus>(status_of(e));
  }
}

RunStatus run_sensitivity(const ScenarioConfig& config,
                          const std::optional<std::filesystem::path>& deviation_file,
                          const std::vector<double>& sweep_epsilons,
                          const std::filesystem::path& out_dir) {
  try {
    SolvedScenario s = solve_pipeline(config, false);
    const int N = config.horizon;
    const int m2 = s.game.input_dim(2);
    std::filesystem::create_directories(out_dir);
    Json out;

    if (deviation_file) {
      std::ifstream in(*deviation_file);
      if (!in) throw ScenarioError("cannot open deviation file " +
                                   deviation_file->string());
      Json root;
      try {
        root = Json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw ScenarioError(std::string("deviation file: ") + e.what());
      }
      const Json& du2 = root.contains("du2") ? root["du2"] : root;
      if (!du2.is_array() || static_cast<int>(du2.size()) != N) {
        throw ScenarioError("deviation file must list " + std::to_string(N) +
                            " entries");
      }
      DeviationSequence dev;
      dev.du2.resize(N);
      for (int k = 0; k < N; ++k) {
        const Json& entry = du2[k];
        Vector d(m2);
        if (entry.is_number() && m2 == 1) {
          d(0) = entry.get<double>();
        } else if (entry.is_array() && static_cast<int>(entry.size()) == m2) {
          for (int i = 0; i < m2; ++i) d(i) = entry[i].get<double>();
        } else {
          throw ScenarioError("deviation entry " + std::to_string(k) +
                              " has the wrong dimension");
        }
        dev.du2[k] = std::move(d);
      }

      const SensitivityReport report =
          first_order_delta_j1(s.fne, s.game, config.x0, dev);
      out["dJ1_linear"] = report.dJ1_linear;
      out["dJ1_exact"] = report.dJ1_exact;
      out["remainder"] = report.dJ1_exact - report.dJ1_linear;
      Json dx = Json::array();
      Json dx_norms = Json::array();
      for (const Vector& v : report.dx) {
        dx.push_back(vector_json(v));
        dx_norms.push_back(v.norm());
      }
      out["dx"] = std::move(dx);
      out["dx_norms"] = std::move(dx_norms);
      std::printf("dJ1_linear = %s, dJ1_exact = %s, remainder = %s\n",
                  display(report.dJ1_linear).c_str(), display(report.dJ1_exact).c_str(),
                  display(report.dJ1_exact - report.dJ1_linear).c_str());
    } else {
      if (sweep_epsilons.empty()) {
        throw ScenarioError("sensitivity requires a deviation file or a sweep list");
      }
      // Deterministic unit direction so sweep runs are reproducible.
      Json rows = Json::array();
      std::mt19937_64 gen(12345);
      std::normal_distribution<double> normal(0.0, 1.0);
      std::vector<Vector> direction(N);
      double norm2 = 0.0;
      for (int k = 0; k < N; ++k) {
        direction[k] = Vector(m2);
        for (int i = 0; i < m2; ++i) direction[k](i) = normal(gen);
        norm2 += direction[k].squaredNorm();
      }
      const double scale = 1.0 / std::sqrt(norm2);
      for (int k = 0; k < N; ++k) direction[k] *= scale;

      std::vector<double> log_eps, log_rem;
      std::printf("%12s %16s %16s %16s\n", "eps", "dJ1_linear", "dJ1_exact",
                  "remainder");
      for (double eps : sweep_epsilons) {
        DeviationSequence dev;
        dev.du2.resize(N);
        for (int k = 0; k < N; ++k) dev.du2[k] = eps * direction[k];
        const SensitivityReport report =
            first_order_delta_j1(s.fne, s.game, config.x0, dev);
        const double rem = report.dJ1_exact - report.dJ1_linear;
        Json row;
        row["eps"] = eps;
        row["dJ1_linear"] = report.dJ1_linear;
        row["dJ1_exact"] = report.dJ1_exact;
        row["remainder"] = rem;
        rows.push_back(std::move(row));
        std::printf("%12s %16s %16s %16s\n", display(eps).c_str(),
                    display(report.dJ1_linear).c_str(),
                    display(report.dJ1_exact).c_str(), display(rem).c_str());
        if (rem != 0.0 && eps > 0.0) {
          log_eps.push_back(std::log(eps));
          log_rem.push_back(std::log(std::abs(rem)));
        }
      }
      out["sweep"] = std::move(rows);
      if (log_eps.size() >= 2) {
        double mx = 0, my = 0;
        for (size_t i = 0; i < log_eps.size(); ++i) {
          mx += log_eps[i];
          my += log_rem[i];
        }
        mx /= log_eps.size();
        my /= log_rem.size();
        double sxx = 0, sxy = 0;
        for (size_t i = 0; i < log_eps.size(); ++i) {
          sxx += (log_eps[i] - mx) * (log_eps[i] - mx);
          sxy += (log_eps[i] - mx) * (log_rem[i] - my);
        }
        const double slope = sxy / sxx;
        out["remainder_loglog_slope"] = slope;
        std::printf("remainder log-log slope: %s\n", display(slope).c_str());
      }
    }
    write_json(out_dir / "sensitivity.json", out);
    write_run_metadata(out_dir);
    return RunStatus::Ok;
  } catch (const ScenarioError& e) {
    std::fprintf(stderr, "sensitivity: %s\n", e.what());
    return RunStatus::ParseError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "sensitivity: %s\n", e.what());
    return static_cast<RunStatus>(status_of(e));
  }
}

RunStatus run_export(const ScenarioConfig& config,
                     const std::filesystem::path& out_file) {
  try {
    if (out_file.has_parent_path()) {
      std::filesystem::create_directories(out_file.parent_path());
    }
    save_scenario(config, out_file);
    std::printf("scenario written to %s\n", out_file.c_str());
    return RunStatus::Ok;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "export: %s\n", e.what());
    return RunStatus::ParseError;
  }
}

}  // namespace lqgame
