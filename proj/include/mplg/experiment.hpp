#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mplg/analysis.hpp"
#include "mplg/problems.hpp"

namespace mplg {

/// dt = c * h^p with h = 2/N (the lattice spacing the tables couple on).
struct Coupling {
  double c = 4.0;
  double p = 1.0;
};

enum class OutputFormat { Csv, Text };

struct ExperimentConfig {
  int dim = 1;
  int degree = 1;
  SchemeVariant variant = SchemeVariant::MassPreservingTwoStep;
  double nu = 1e-2;
  double T = 0.5;
  std::optional<Coupling> coupling;
  std::vector<double> dt_list;   // alternative to coupling
  std::vector<int> divisions;    // N values, strictly increasing
  double cg_tol = 1e-12;
  int cg_max_iter = 0;
  bool allow_large = false;      // permit 3D division > 64
  unsigned long long seed = 0;
};

/// One solved case with streamed error/mass accumulation (no snapshot
/// storage); errors are absent when the problem has no exact solution.
struct RunResult {
  int division = 0;
  double dt = 0.0;
  double grid_h = 0.0;
  int steps = 0;
  int dofs = 0;
  std::optional<ErrorReport> errors;
  MassReport mass;
  RunDiagnostics diagnostics;
};

RunResult run_case(const ProblemData& problem, const FESpace& space,
                   const SchemeConfig& config);

/// Sweep of the built-in pulse benchmark per the config: coupled dt, fixed
/// dt over N, or a dt list at fixed N. Rows come back with EOCs filled in.
ConvergenceTable run_convergence(const ExperimentConfig& config);

/// Single benchmark run; optionally dumps the vertex values as CSV.
RunResult run_single(const ExperimentConfig& config, int division,
                     const std::string& export_solution_path = {});

void write_table_csv(std::ostream& out, const ConvergenceTable& table,
                     bool full_precision);
void write_table_text(std::ostream& out, const ConvergenceTable& table);

/// Validate config and derive dt for a division; throws on bad config.
double resolve_dt(const ExperimentConfig& config, int division,
                  std::size_t sweep_index);

}  // namespace mplg
