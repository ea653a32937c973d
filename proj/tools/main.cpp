// crslip: convergence studies for the penalised Crouzeix-Raviart slip solver.
//
//   crslip solve --case disk2d --levels 4 --out results/
//   crslip check-data --case ball3d

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "crslip/errors.hpp"
#include "crslip/study.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw crslip::ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw crslip::ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Penalised Crouzeix-Raviart Stokes solver with slip boundary conditions"};
  app.require_subcommand(1);

  // Flags are kept as strings so that the precedence defaults < file < flags
  // can be resolved by RunConfig::apply.
  std::map<std::string, std::string> flags;
  std::string config_path, out_dir, mesh_dir;
  bool diagnostics = false;

  auto* solve = app.add_subcommand("solve", "Run a convergence study");
  auto add = [&](const char* name, const char* key, const char* help) {
    return solve->add_option_function<std::string>(
        name, [&flags, key](const std::string& v) { flags[key] = v; }, help);
  };
  add("--case", "case", "disk2d or ball3d");
  add("--levels", "levels", "Number of refinement levels (>= 1)");
  add("--gamma", "gamma", "Jump stabilisation parameter");
  add("--eps-coef", "eps-coef", "Penalty rule eps = c h^k: coefficient c");
  add("--eps-exp", "eps-exp", "Penalty rule eps = c h^k: exponent k");
  add("--nu", "nu", "Viscosity");
  add("--base-refinements", "base-refinements", "Refinements of the coarse fan before level 0");
  add("--pressure", "pressure", "3D exact pressure: printed or symmetric");
  add("--data-degree", "data-degree", "Quadrature degree for load integrals");
  add("--error-degree", "error-degree", "Quadrature degree for error norms");
  add("--solver", "solver", "auto, lu or augmented");
  add("--format", "format", "csv or markdown");
  solve->add_option("--config", config_path, "key = value configuration file");
  solve->add_option("--out", out_dir, "Output directory (stdout if omitted)");
  solve->add_option("--mesh-out", mesh_dir, "Directory for per-level meshes");
  solve->add_flag("--diagnostics", diagnostics, "Also compute stability diagnostics");

  auto* check = app.add_subcommand("check-data", "Run the manufactured-data oracle");
  std::string check_case = "disk2d", check_pressure = "printed";
  int check_points = 1000;
  check->add_option("--case", check_case, "disk2d or ball3d");
  check->add_option("--pressure", check_pressure, "printed or symmetric");
  check->add_option("--points", check_points, "Number of random sample points");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*check) {
    try {
      const auto c = crslip::make_case(crslip::parse_domain_kind(check_case),
                                       crslip::parse_pressure_variant(check_pressure));
      const auto r = crslip::oracle_check(c, check_points);
      std::cout << c.name << ": " << r.points << " points ok"
                << " (max |div u| " << r.max_divergence << ", grad defect " << r.max_gradient_defect
                << ", force defect " << r.max_force_defect << ", |tau.n| " << r.max_tangency
                << ", int g " << r.flux_integral << ")\n";
      return 0;
    } catch (const crslip::ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return kExitConfig;
    } catch (const crslip::Error& e) {
      std::cerr << "oracle failure: " << e.what() << '\n';
      return kExitNumerical;
    }
  }

  crslip::RunConfig cfg;
  try {
    std::map<std::string, std::string> file;
    if (!config_path.empty()) file = crslip::parse_config_text(read_file(config_path));
    std::string case_name = "disk2d";
    for (const auto* m : {&file, &flags})
      for (const auto& [k, v] : *m)
        if (k == "case") case_name = v;
    cfg = crslip::RunConfig::defaults(crslip::parse_domain_kind(case_name));
    cfg.apply(file);
    cfg.apply(flags);
    if (diagnostics) cfg.diagnostics = true;
    cfg.validate();
  } catch (const crslip::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  crslip::StudyResult result;
  try {
    result = crslip::run_study(cfg, !mesh_dir.empty());
  } catch (const crslip::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const crslip::Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }

  std::ostringstream table, diag;
  crslip::write_table(table, result);
  crslip::write_diagnostics(diag, result);
  try {
    if (out_dir.empty()) {
      std::cout << table.str();
      if (cfg.diagnostics) std::cout << '\n' << diag.str();
    } else {
      fs::create_directories(out_dir);
      const std::string stem = std::string(crslip::to_string(cfg.domain));
      const char* ext = cfg.format == crslip::TableFormat::csv ? ".csv" : ".md";
      write_file(fs::path(out_dir) / (stem + ext), table.str());
      write_file(fs::path(out_dir) / (stem + "_diagnostics.csv"), diag.str());
    }
    if (!mesh_dir.empty()) {
      fs::create_directories(mesh_dir);
      for (std::size_t l = 0; l < result.meshes.size(); ++l)
        write_file(fs::path(mesh_dir) / (std::string(crslip::to_string(cfg.domain)) + "_level" +
                                         std::to_string(l) + ".mesh"),
                   result.meshes[l]);
    }
  } catch (const std::exception& e) {
    std::cerr << "output error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
