// Experiment runner for the mass-preserving two-step Lagrange-Galerkin
// solver: convergence sweeps, single runs with solution export, and the
// verification suites.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mplg/experiment.hpp"
#include "mplg/verify.hpp"

namespace {

mplg::SchemeVariant parse_variant(const std::string& name) {
  if (name == "mp2") return mplg::SchemeVariant::MassPreservingTwoStep;
  if (name == "rt1") return mplg::SchemeVariant::RuiTabataFirstOrder;
  if (name == "er2") return mplg::SchemeVariant::EwingRussellTwoStep;
  throw CLI::ValidationError("--variant", "unknown variant " + name);
}

std::string companion_path(const std::string& path) {
  const auto dot = path.rfind('.');
  if (dot == std::string::npos) return path + "_full";
  return path.substr(0, dot) + "_full" + path.substr(dot);
}

void write_outputs(const mplg::ConvergenceTable& table,
                   const std::string& out_path, const std::string& format) {
  if (out_path.empty()) return;
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open " + out_path);
  if (format == "csv") {
    mplg::write_table_csv(out, table, false);
    std::ofstream full(companion_path(out_path));
    mplg::write_table_csv(full, table, true);
  } else {
    mplg::write_table_text(out, table);
  }
}

void print_diagnostics(const mplg::RunResult& result) {
  const auto& d = result.diagnostics;
  std::printf("steps          %d (dt = %.6g)\n", result.steps, result.dt);
  std::printf("dofs           %d\n", result.dofs);
  if (result.errors) {
    std::printf("E_linf_L2      %.6e\n", result.errors->e_linf_l2);
    std::printf("E_l2_H10       %.6e\n", result.errors->e_l2_h10);
    std::printf("E_linf_H10     %.6e\n", result.errors->e_linf_h10);
    if (result.errors->e_h1_l2)
      std::printf("E_h1_L2        %.6e\n", *result.errors->e_h1_l2);
    std::printf("E_mass         %.6e\n", result.mass.e_mass);
    std::printf("E_mass'        %.6e\n", result.mass.e_mass_prime);
    std::printf("E_mass''       %.6e\n", result.mass.e_mass_double_prime);
  } else {
    std::printf("E_mass'        %.6e\n", result.mass.e_mass_prime);
  }
  if (d.gamma.evaluations > 0)
    std::printf("gamma range    [%.6f, %.6f], %lld/%lld outside [1/2, 3/2]\n",
                d.gamma.min_value, d.gamma.max_value, d.gamma.out_of_range,
                d.gamma.evaluations);
  std::printf("dt-hypothesis  dt|u|_W1inf = %.4g %s\n", d.dt_w1inf,
              d.hyp_dt_warning ? "(> 1/8, warning)" : "(<= 1/8)");
  std::printf("cg iterations  total %lld, max %d, max residual %.3g\n",
              d.total_cg_iterations, d.max_cg_iterations, d.max_cg_residual);
}

int run_verify(const std::string& suite, long long trials,
               unsigned long long seed) {
  std::vector<mplg::CheckResult> checks;
  if (suite == "quadrature") {
    checks = mplg::verify_quadrature();
  } else if (suite == "jacobian") {
    checks = mplg::verify_jacobian(1000, seed);
  } else if (suite == "gronwall") {
    checks = mplg::verify_gronwall(trials, seed);
  } else if (suite == "truncation") {
    checks = mplg::verify_truncation();
  } else if (suite == "conservation") {
    checks = mplg::verify_conservation();
  } else {
    std::fprintf(stderr, "unknown suite %s\n", suite.c_str());
    return 2;
  }
  int failures = 0;
  for (const auto& check : checks) {
    std::printf("%s %s: %s\n", check.pass ? "PASS" : "FAIL",
                check.name.c_str(), check.detail.c_str());
    if (!check.pass) ++failures;
  }
  std::printf("%s: %d/%zu checks passed\n", suite.c_str(),
              static_cast<int>(checks.size()) - failures, checks.size());
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mass-preserving two-step Lagrange-Galerkin experiments"};
  app.require_subcommand(1);

  // shared experiment options
  mplg::ExperimentConfig config;
  std::string variant_name = "mp2";
  std::vector<double> coupling_values;
  std::string out_path;
  std::string format = "csv";
  std::string export_path;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--dim", config.dim, "space dimension (1, 2 or 3)")
        ->check(CLI::Range(1, 3));
    cmd->add_option("--degree", config.degree, "polynomial degree (1 or 2)")
        ->check(CLI::Range(1, 2));
    cmd->add_option("--variant", variant_name,
                    "scheme variant: mp2 | rt1 | er2");
    cmd->add_option("--nu", config.nu, "viscosity");
    cmd->add_option("--T", config.T, "final time");
    cmd->add_option("--coupling", coupling_values,
                    "dt = c*h^p coupling as c,p")
        ->delimiter(',')
        ->expected(2);
    cmd->add_option("--dt", config.dt_list,
                    "fixed time increment(s); a list sweeps dt at fixed N")
        ->delimiter(',');
    cmd->add_option("--N", config.divisions, "division numbers")
        ->delimiter(',');
    cmd->add_option("--cg-tol", config.cg_tol, "CG relative residual");
    cmd->add_option("--seed", config.seed, "seed for randomized suites");
    cmd->add_flag("--allow-large", config.allow_large,
                  "permit 3D runs with N > 64");
    cmd->add_option("--out", out_path, "output file path");
    cmd->add_option("--format", format, "output format: csv | text")
        ->check(CLI::IsMember({"csv", "text"}));
  };

  CLI::App* converge = app.add_subcommand(
      "converge", "run a refinement sweep and print the error table");
  add_common(converge);

  CLI::App* single = app.add_subcommand(
      "single", "run one case and print errors, mass and diagnostics");
  add_common(single);
  single->add_option("--export-solution", export_path,
                     "write vertex values to this CSV path");

  CLI::App* verify =
      app.add_subcommand("verify", "run a verification suite");
  std::string suite;
  long long trials = 10000;
  verify
      ->add_option("--suite", suite,
                   "quadrature | jacobian | gronwall | truncation | "
                   "conservation")
      ->required();
  verify->add_option("--trials", trials, "trial count for gronwall");
  verify->add_option("--seed", config.seed, "seed for randomized suites");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!coupling_values.empty())
      config.coupling = mplg::Coupling{coupling_values[0], coupling_values[1]};
    config.variant = parse_variant(variant_name);

    if (converge->parsed()) {
      const mplg::ConvergenceTable table = mplg::run_convergence(config);
      mplg::write_table_text(std::cout, table);
      write_outputs(table, out_path, format);
      return 0;
    }
    if (single->parsed()) {
      if (config.divisions.size() != 1)
        throw std::invalid_argument("single needs exactly one --N value");
      const mplg::RunResult result =
          mplg::run_single(config, config.divisions[0], export_path);
      print_diagnostics(result);
      return 0;
    }
    if (verify->parsed()) return run_verify(suite, trials, config.seed);
  } catch (const std::exception& error) {
    std::fprintf(stderr, "error: %s\n", error.what());
    return 2;
  }
  return 0;
}
