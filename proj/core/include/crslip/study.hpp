#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "crslip/analysis.hpp"

namespace crslip {

enum class TableFormat { csv, markdown };

struct RunConfig {
  DomainKind domain = DomainKind::disk2d;
  int levels = 4;
  double gamma = 2.0;
  double eps_coef = 0.1;  ///< eps = eps_coef * h^eps_exp
  double eps_exp = 2.0;
  double nu = 1.0;
  /// Red refinements applied to the coarse fan before level 0.
  int base_refinements = 3;
  PressureVariant pressure = PressureVariant::printed;
  int data_degree = 4;   ///< load integrals
  int error_degree = 8;  ///< error norms
  SolverKind solver = SolverKind::automatic;
  TableFormat format = TableFormat::csv;
  bool diagnostics = false;

  /// Defaults for a case: disk2d (c=0.1, k=2, gamma=2), ball3d (c=0.1, k=1, gamma=5).
  static RunConfig defaults(DomainKind domain);

  /// Applies key=value pairs (keys as in the CLI flags, dashes or
  /// underscores). Throws ConfigError on unknown keys or bad values.
  void apply(const std::map<std::string, std::string>& values);
  /// Throws ConfigError when a field is out of range.
  void validate() const;

  double epsilon(double h) const;
};

/// Parses `key = value` lines; '#' starts a comment. Throws ConfigError.
std::map<std::string, std::string> parse_config_text(const std::string& text);

struct LevelDiagnostics {
  double h = 0.0;
  double korn = 0.0;            ///< min Rayleigh quotient of a_h + j_h against ||.||_{V_h}
  double flux_weighted = 0.0;   ///< weighted flux defect of the exact solution
  double skin_ratio = 0.0;      ///< boundary_skin_ratio of u_h
  double lift_stability = 0.0;  ///< ||lift(mu)||_{V_h} / ||mu||_{1/2} for mu = Pi(x_1 + x_N^2)
  double multiplier_l2 = 0.0;   ///< ||lambda_h||_{L2(Gamma_h)}
};

struct StudyResult {
  RunConfig config;
  ConvergenceReport report;
  std::vector<LevelDiagnostics> diagnostics;
  std::vector<std::string> meshes;  ///< exported mesh text per level
};

/// Refines, assembles, solves and measures each level in turn. Throws the
/// library's exception types; the message names the failing stage and level.
StudyResult run_study(const RunConfig& config, bool keep_meshes = false);

/// Table with columns h, l2_u, eoc_l2_u, h1_u, eoc_h1_u, l2_p, eoc_l2_p,
/// preceded by '#' lines echoing every effective parameter.
void write_table(std::ostream& os, const StudyResult& result);
/// Auxiliary quantities per level (triple norm, raw pressure error, flux
/// defect, k_h, eps, residual, and the diagnostics when enabled).
void write_diagnostics(std::ostream& os, const StudyResult& result);

std::string to_string(TableFormat f);

}  // namespace crslip
