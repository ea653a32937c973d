#include "crslip/study.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "crslip/errors.hpp"

namespace crslip {

namespace {

std::string normalise_key(std::string key) {
  for (char& c : key)
    if (c == '_') c = '-';
  return key;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw ConfigError("'" + key + "': expected a number, got '" + v + "'");
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw ConfigError("'" + key + "': expected an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("'" + key + "': expected a boolean, got '" + v + "'");
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string sci(double v) { return fmt("%.6e", v); }

std::string order(const std::optional<double>& o) { return o ? fmt("%.4f", *o) : std::string(); }

template <class F>
auto staged(const char* stage, int level, F&& f) {
  try {
    return f();
  } catch (const StageFailure&) {
    throw;
  } catch (const std::exception& e) {
    throw StageFailure(stage, level, e.what());
  }
}

LevelDiagnostics measure_diagnostics(const RunConfig& cfg, const ManufacturedCase& c,
                                     const FacetComplex& facets, const Solution& s) {
  LevelDiagnostics d;
  const SimplexMesh& mesh = facets.mesh();
  d.h = mesh.mesh_size();
  d.korn = korn_ratio(facets, cfg.nu, cfg.gamma, 2, 7);
  d.flux_weighted = flux_defect(c.solution.u, c.data.g, facets).weighted;
  d.skin_ratio = boundary_skin_ratio(s.u, *c.domain);
  const int n = mesh.dim();
  // The dense H^1/2 Gram grows quadratically with the boundary facet count.
  if (facets.num_boundary_facets() <= 1024) {
    const FacetFunction mu =
        boundary_mean([n](const Point& x) { return x[0] + x[n - 1] * x[n - 1]; }, facets);
    d.lift_stability = vh_norm(discrete_lift(mu)) / discrete_h_half_norm(mu);
  } else {
    d.lift_stability = std::numeric_limits<double>::quiet_NaN();
  }
  double m2 = 0.0;
  for (std::size_t b = 0; b < facets.num_boundary_facets(); ++b)
    m2 += facets.facet(facets.boundary_facets()[b]).measure * s.multiplier[b] * s.multiplier[b];
  d.multiplier_l2 = std::sqrt(m2);
  return d;
}

}  // namespace

std::string to_string(TableFormat f) { return f == TableFormat::csv ? "csv" : "markdown"; }

RunConfig RunConfig::defaults(DomainKind domain) {
  RunConfig c;
  c.domain = domain;
  if (domain == DomainKind::disk2d) {
    c.levels = 4;
    c.gamma = 2.0;
    c.eps_coef = 0.1;
    c.eps_exp = 2.0;
    c.base_refinements = 3;
  } else {
    c.levels = 3;
    c.gamma = 5.0;
    c.eps_coef = 0.1;
    c.eps_exp = 1.0;
    c.base_refinements = 2;
  }
  return c;
}

void RunConfig::apply(const std::map<std::string, std::string>& values) {
  for (const auto& [raw, v] : values) {
    const std::string key = normalise_key(raw);
    if (key == "case") {
      domain = parse_domain_kind(v);
    } else if (key == "levels") {
      levels = to_int(key, v);
    } else if (key == "gamma") {
      gamma = to_double(key, v);
    } else if (key == "eps-coef") {
      eps_coef = to_double(key, v);
    } else if (key == "eps-exp") {
      eps_exp = to_double(key, v);
    } else if (key == "nu") {
      nu = to_double(key, v);
    } else if (key == "base-refinements") {
      base_refinements = to_int(key, v);
    } else if (key == "pressure") {
      pressure = parse_pressure_variant(v);
    } else if (key == "data-degree") {
      data_degree = to_int(key, v);
    } else if (key == "error-degree") {
      error_degree = to_int(key, v);
    } else if (key == "solver") {
      solver = parse_solver_kind(v);
    } else if (key == "format") {
      if (v == "csv") format = TableFormat::csv;
      else if (v == "markdown") format = TableFormat::markdown;
      else throw ConfigError("'format': expected csv or markdown, got '" + v + "'");
    } else if (key == "diagnostics") {
      diagnostics = to_bool(key, v);
    } else {
      throw ConfigError("unknown configuration key '" + raw + "'");
    }
  }
}

void RunConfig::validate() const {
  if (levels < 1) throw ConfigError("levels must be >= 1");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma must be a positive number");
  if (!(eps_coef > 0.0) || !std::isfinite(eps_coef)) throw ConfigError("eps-coef must be a positive number");
  if (!(eps_exp >= 0.0) || !std::isfinite(eps_exp)) throw ConfigError("eps-exp must be a nonnegative number");
  if (!(nu > 0.0) || !std::isfinite(nu)) throw ConfigError("nu must be a positive number");
  if (base_refinements < 0) throw ConfigError("base-refinements must be >= 0");
  if (data_degree < 1 || data_degree > 20) throw ConfigError("data-degree must lie in [1, 20]");
  if (error_degree < 1 || error_degree > 20) throw ConfigError("error-degree must lie in [1, 20]");
}

double RunConfig::epsilon(double h) const { return eps_coef * std::pow(h, eps_exp); }

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream is(text);
  std::string line;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(number) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(number) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

StudyResult run_study(const RunConfig& config, bool keep_meshes) {
  config.validate();
  StudyResult result;
  result.config = config;
  const ManufacturedCase c = make_case(config.domain, config.pressure, config.nu);
  const SmoothDomain& domain = *c.domain;

  SimplexMesh mesh = staged("refine", 0, [&] {
    SimplexMesh m = coarse_mesh(domain);
    for (int r = 0; r < config.base_refinements; ++r) m = refine(m, domain);
    return m;
  });

  for (int level = 0; level < config.levels; ++level) {
    if (level > 0) mesh = staged("refine", level, [&] { return refine(mesh, domain); });
    const FacetComplex facets = staged("refine", level, [&] { return build_facets(mesh); });
    const double eps = config.epsilon(mesh.mesh_size());
    const SaddleSystem system = staged("assemble", level, [&] {
      return assemble_system(facets, c.data.load(),
                             FormParameters{eps, config.gamma, config.nu, config.data_degree});
    });
    const Solution sol = staged("solve", level, [&] { return solve(system, c.data.g, SolverOptions{config.solver}); });
    staged("measure", level, [&] {
      ErrorRecord r = compute_errors(c, sol, eps);
      if (config.error_degree != 8) {
        r.l2_u = error_l2(c.solution.u, sol.u, config.error_degree);
        r.h1_semi_u = error_h1_seminorm(c.solution.grad_u, sol.u, config.error_degree);
        r.h1_u = std::hypot(r.l2_u, r.h1_semi_u);
        r.triple_u = std::sqrt(r.h1_u * r.h1_u + jump_seminorm_sq(sol.u));
        r.l2_p = error_pressure(c.solution.p, sol.p_centered, config.error_degree);
        r.l2_p_raw = error_pressure(c.solution.p, sol.p, config.error_degree);
      }
      result.report.records.push_back(r);
      if (config.diagnostics) result.diagnostics.push_back(measure_diagnostics(config, c, facets, sol));
      return 0;
    });
    if (keep_meshes) result.meshes.push_back(export_mesh(mesh));
  }
  return result;
}

namespace {

void write_header(std::ostream& os, const RunConfig& c) {
  os << "# case = " << to_string(c.domain) << '\n'
     << "# levels = " << c.levels << '\n'
     << "# base_refinements = " << c.base_refinements << '\n'
     << "# gamma = " << c.gamma << '\n'
     << "# eps_coef = " << c.eps_coef << '\n'
     << "# eps_exp = " << c.eps_exp << '\n'
     << "# nu = " << c.nu << '\n'
     << "# pressure = " << (c.pressure == PressureVariant::printed ? "printed" : "symmetric") << '\n'
     << "# data_degree = " << c.data_degree << '\n'
     << "# error_degree = " << c.error_degree << '\n'
     << "# solver = " << to_string(c.solver) << '\n'
     << "# format = " << to_string(c.format) << '\n'
     << "# diagnostics = " << (c.diagnostics ? "true" : "false") << '\n'
     << "# h = max_T h_T; h1_u = broken H1 norm; l2_p uses p_h - k_h\n";
}

}  // namespace

void write_table(std::ostream& os, const StudyResult& result) {
  const ConvergenceReport& rep = result.report;
  const auto o_l2 = rep.orders(&ErrorRecord::l2_u);
  const auto o_h1 = rep.orders(&ErrorRecord::h1_u);
  const auto o_p = rep.orders(&ErrorRecord::l2_p);
  write_header(os, result.config);
  if (result.config.format == TableFormat::csv) {
    os << "h,l2_u,eoc_l2_u,h1_u,eoc_h1_u,l2_p,eoc_l2_p\n";
    for (std::size_t i = 0; i < rep.records.size(); ++i) {
      const ErrorRecord& r = rep.records[i];
      os << sci(r.h) << ',' << sci(r.l2_u) << ',' << order(o_l2[i]) << ',' << sci(r.h1_u) << ','
         << order(o_h1[i]) << ',' << sci(r.l2_p) << ',' << order(o_p[i]) << '\n';
    }
  } else {
    os << "\n| h | L2(u) error | order | H1(u) error | order | L2(p) error | order |\n"
       << "|---|---|---|---|---|---|---|\n";
    for (std::size_t i = 0; i < rep.records.size(); ++i) {
      const ErrorRecord& r = rep.records[i];
      os << "| " << sci(r.h) << " | " << sci(r.l2_u) << " | " << order(o_l2[i]) << " | " << sci(r.h1_u)
         << " | " << order(o_h1[i]) << " | " << sci(r.l2_p) << " | " << order(o_p[i]) << " |\n";
    }
  }
}

void write_diagnostics(std::ostream& os, const StudyResult& result) {
  const ConvergenceReport& rep = result.report;
  const auto o_t = rep.orders(&ErrorRecord::triple_u);
  const auto o_pr = rep.orders(&ErrorRecord::l2_p_raw);
  std::vector<std::optional<double>> o_f(rep.records.size());
  try {
    o_f = rep.orders(&ErrorRecord::flux);
  } catch (const ZeroError&) {
  }
  write_header(os, result.config);
  os << "h,cells,epsilon,residual,mean_pressure,triple_u,eoc_triple_u,l2_p_raw,eoc_l2_p_raw,flux,eoc_flux";
  const bool diag = !result.diagnostics.empty();
  if (diag) os << ",korn,flux_weighted,skin_ratio,lift_stability,multiplier_l2";
  os << '\n';
  for (std::size_t i = 0; i < rep.records.size(); ++i) {
    const ErrorRecord& r = rep.records[i];
    os << sci(r.h) << ',' << r.cells << ',' << sci(r.epsilon) << ',' << sci(r.residual) << ','
       << sci(r.mean_pressure) << ',' << sci(r.triple_u) << ',' << order(o_t[i]) << ','
       << sci(r.l2_p_raw) << ',' << order(o_pr[i]) << ',' << sci(r.flux) << ',' << order(o_f[i]);
    if (diag) {
      const LevelDiagnostics& d = result.diagnostics[i];
      os << ',' << sci(d.korn) << ',' << sci(d.flux_weighted) << ',' << sci(d.skin_ratio) << ','
         << (std::isnan(d.lift_stability) ? std::string() : sci(d.lift_stability)) << ','
         << sci(d.multiplier_l2);
    }
    os << '\n';
  }
}

}  // namespace crslip
