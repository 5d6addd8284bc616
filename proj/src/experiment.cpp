#include "mplg/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace mplg {

namespace {

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

/// Streams the per-step error and mass metrics so that long runs never hold
/// the trajectory in memory.
class StreamAccumulator {
 public:
  StreamAccumulator(const ProblemData& problem, const FESpace& space,
                    const SparseMatrix& mass, const SparseMatrix& stiffness,
                    double dt)
      : problem_(&problem),
        space_(&space),
        mass_(&mass),
        stiffness_(&stiffness),
        dt_(dt),
        work_(space.dof_count()),
        diff_(space.dof_count()) {
    Vector ones(space.dof_count(), 1.0);
    weights_.resize(space.dof_count());
    mass.multiply(ones, weights_);
  }

  void observe_initial(const Vector& coeffs) {
    integrals_.push_back(dot(weights_, coeffs));
    if (problem_->exact) exact_integrals_.push_back(exact_integral(0.0));
    if (problem_->exact_dt) prev_ = coeffs;
  }

  void observe(int n, double t, const Vector& coeffs) {
    integrals_.push_back(dot(weights_, coeffs));
    if (problem_->exact) {
      exact_integrals_.push_back(exact_integral(t));
      const FEFunction ref = interpolate(
          *space_, [&](const Point& x) { return problem_->exact(x, t); });
      for (int i = 0; i < space_->dof_count(); ++i)
        diff_[i] = coeffs[i] - ref.coeffs[i];
      max_err_l2_ = std::max(max_err_l2_, form(*mass_, diff_));
      max_ref_l2_ = std::max(max_ref_l2_, form(*mass_, ref.coeffs));
      const double err_h1 = form(*stiffness_, diff_);
      const double ref_h1 = form(*stiffness_, ref.coeffs);
      max_err_h1_ = std::max(max_err_h1_, err_h1);
      max_ref_h1_ = std::max(max_ref_h1_, ref_h1);
      sum_err_h1_ += err_h1;
      sum_ref_h1_ += ref_h1;

      if (problem_->exact_dt) {
        const FEFunction ref_dt = interpolate(*space_, [&](const Point& x) {
          return problem_->exact_dt(x, t);
        });
        Vector bdf(space_->dof_count());
        if (n == 1) {
          for (int i = 0; i < space_->dof_count(); ++i)
            bdf[i] = (coeffs[i] - prev_[i]) / dt_;
        } else {
          for (int i = 0; i < space_->dof_count(); ++i)
            bdf[i] =
                (3.0 * coeffs[i] - 4.0 * prev_[i] + prev2_[i]) / (2.0 * dt_);
        }
        for (int i = 0; i < space_->dof_count(); ++i)
          bdf[i] -= ref_dt.coeffs[i];
        sum_err_dt_ += form(*mass_, bdf);
        sum_ref_dt_ += form(*mass_, ref_dt.coeffs);
        prev2_ = std::move(prev_);
        prev_ = coeffs;
      }
    }
  }

  void finalize(RunResult& result) const {
    const int nt = static_cast<int>(integrals_.size()) - 1;
    MassReport& mass = result.mass;
    mass.m_h.resize(nt + 1);
    for (int n = 0; n <= nt; ++n)
      mass.m_h[n] = n <= 1 ? integrals_[n]
                           : 1.5 * integrals_[n] - 0.5 * integrals_[n - 1];
    mass.e_mass_prime =
        std::abs(integrals_[nt] - integrals_[0]) / std::abs(integrals_[0]);
    if (problem_->exact) {
      mass.e_mass = std::abs(integrals_[nt] - exact_integrals_[nt]) /
                    std::abs(exact_integrals_[nt]);
      double num = 0.0, den = 0.0;
      for (int n = 1; n <= nt; ++n) {
        num += std::abs(integrals_[n] - exact_integrals_[n]);
        den += std::abs(exact_integrals_[n]);
      }
      mass.e_mass_double_prime = den > 0.0 ? num / den : 0.0;

      if (nt >= 1) {
        ErrorReport errors;
        errors.e_linf_l2 = std::sqrt(max_err_l2_) / std::sqrt(max_ref_l2_);
        errors.e_l2_h10 = std::sqrt(sum_err_h1_) / std::sqrt(sum_ref_h1_);
        errors.e_linf_h10 = std::sqrt(max_err_h1_) / std::sqrt(max_ref_h1_);
        if (problem_->exact_dt)
          errors.e_h1_l2 = std::sqrt(sum_err_dt_) / std::sqrt(sum_ref_dt_);
        result.errors = errors;
      }
    } else {
      mass.e_mass = nan_value();
      mass.e_mass_double_prime = nan_value();
    }
  }

 private:
  double form(const SparseMatrix& a, const Vector& x) {
    a.multiply(x, work_);
    return std::max(0.0, dot(work_, x));
  }

  double exact_integral(double t) {
    const FEFunction ref = interpolate(
        *space_, [&](const Point& x) { return problem_->exact(x, t); });
    return dot(weights_, ref.coeffs);
  }

  const ProblemData* problem_;
  const FESpace* space_;
  const SparseMatrix* mass_;
  const SparseMatrix* stiffness_;
  double dt_;
  Vector weights_, work_, diff_, prev_, prev2_;
  std::vector<double> integrals_, exact_integrals_;
  double max_err_l2_ = 0.0, max_ref_l2_ = 0.0;
  double max_err_h1_ = 0.0, max_ref_h1_ = 0.0;
  double sum_err_h1_ = 0.0, sum_ref_h1_ = 0.0;
  double sum_err_dt_ = 0.0, sum_ref_dt_ = 0.0;
};

void export_vertex_values(const FESpace& space, const Vector& coeffs,
                          const std::string& path) {
  const Mesh& mesh = space.mesh();
  const int d = mesh.dim();
  const int k = space.degree();
  const int m = k * mesh.division() + 1;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  const char* headers[3] = {"x,value", "x,y,value", "x,y,z,value"};
  out << headers[d - 1] << "\n";
  char line[160];
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const auto& lat = mesh.vertex_lattice(v);
    int dof = k * lat[0];
    if (d >= 2) dof += m * (k * lat[1]);
    if (d >= 3) dof += m * m * (k * lat[2]);
    const Point& p = mesh.vertex(v);
    int len = 0;
    for (int i = 0; i < d; ++i)
      len += std::snprintf(line + len, sizeof(line) - len, "%.17g,", p[i]);
    std::snprintf(line + len, sizeof(line) - len, "%.17g", coeffs[dof]);
    out << line << "\n";
  }
}

void validate(const ExperimentConfig& config) {
  if (config.dim < 1 || config.dim > 3)
    throw std::invalid_argument("dim must be 1, 2 or 3");
  if (config.degree != 1 && config.degree != 2)
    throw std::invalid_argument("degree must be 1 or 2");
  if (config.divisions.empty())
    throw std::invalid_argument("at least one division N is required");
  for (std::size_t i = 1; i < config.divisions.size(); ++i)
    if (config.divisions[i] <= config.divisions[i - 1])
      throw std::invalid_argument("N list must be strictly increasing");
  if (config.coupling && !config.dt_list.empty())
    throw std::invalid_argument("give either a coupling or dt values");
  if (!config.coupling && config.dt_list.empty())
    throw std::invalid_argument("either a coupling or dt values are required");
  if (config.dt_list.size() > 1 && config.divisions.size() > 1)
    throw std::invalid_argument("a dt sweep needs a single N");
  if (config.dim == 3 && !config.allow_large)
    for (int n : config.divisions)
      if (n > 64)
        throw std::invalid_argument(
            "3D runs with N > 64 need --allow-large");
}

}  // namespace

double resolve_dt(const ExperimentConfig& config, int division,
                  std::size_t sweep_index) {
  if (config.coupling) {
    const double h = 2.0 / division;
    return config.coupling->c * std::pow(h, config.coupling->p);
  }
  if (config.dt_list.size() == 1) return config.dt_list[0];
  return config.dt_list.at(sweep_index);
}

RunResult run_case(const ProblemData& problem, const FESpace& space,
                   const SchemeConfig& config) {
  SchemeConfig run_config = config;
  run_config.record_snapshots = false;
  Stepper stepper(problem, space, run_config);
  StreamAccumulator accumulator(problem, space, stepper.mass_matrix(),
                                stepper.stiffness_matrix(), config.dt);
  accumulator.observe_initial(stepper.solution());
  stepper.run([&](int n, double t, const Vector& coeffs) {
    accumulator.observe(n, t, coeffs);
  });

  RunResult result;
  result.division = space.mesh().division();
  result.dt = config.dt;
  result.grid_h = space.mesh().grid_h();
  result.steps = stepper.total_steps();
  result.dofs = space.dof_count();
  result.diagnostics = stepper.diagnostics();
  accumulator.finalize(result);
  return result;
}

ConvergenceTable run_convergence(const ExperimentConfig& config) {
  validate(config);
  ProblemData problem = pulse_benchmark(config.dim, config.nu);
  problem.T = config.T;

  const std::size_t cases = config.dt_list.size() > 1
                                ? config.dt_list.size()
                                : config.divisions.size();
  ConvergenceTable table;
  for (std::size_t i = 0; i < cases; ++i) {
    const int division =
        config.dt_list.size() > 1 ? config.divisions[0] : config.divisions[i];
    const Mesh mesh = build_box_mesh(config.dim, division);
    const FESpace space(mesh, config.degree);
    SchemeConfig scheme;
    scheme.variant = config.variant;
    scheme.dt = resolve_dt(config, division, i);
    scheme.cg_tol = config.cg_tol;
    scheme.cg_max_iter = config.cg_max_iter;
    const RunResult result = run_case(problem, space, scheme);

    ConvergenceRow row;
    row.division = result.division;
    row.dt = result.dt;
    row.grid_h = result.grid_h;
    row.steps = result.steps;
    row.dofs = result.dofs;
    row.errors = result.errors.value();
    row.mass = result.mass;
    row.diagnostics = result.diagnostics;
    table.rows.push_back(std::move(row));
  }
  compute_eocs(table);
  return table;
}

RunResult run_single(const ExperimentConfig& config, int division,
                     const std::string& export_solution_path) {
  ExperimentConfig check = config;
  check.divisions = {division};
  validate(check);
  ProblemData problem = pulse_benchmark(config.dim, config.nu);
  problem.T = config.T;
  const Mesh mesh = build_box_mesh(config.dim, division);
  const FESpace space(mesh, config.degree);

  SchemeConfig scheme;
  scheme.variant = config.variant;
  scheme.dt = resolve_dt(config, division, 0);
  scheme.cg_tol = config.cg_tol;
  scheme.cg_max_iter = config.cg_max_iter;
  scheme.record_snapshots = false;

  Stepper stepper(problem, space, scheme);
  StreamAccumulator accumulator(problem, space, stepper.mass_matrix(),
                                stepper.stiffness_matrix(), scheme.dt);
  accumulator.observe_initial(stepper.solution());
  stepper.run([&](int n, double t, const Vector& coeffs) {
    accumulator.observe(n, t, coeffs);
  });

  RunResult result;
  result.division = division;
  result.dt = scheme.dt;
  result.grid_h = mesh.grid_h();
  result.steps = stepper.total_steps();
  result.dofs = space.dof_count();
  result.diagnostics = stepper.diagnostics();
  accumulator.finalize(result);

  if (!export_solution_path.empty())
    export_vertex_values(space, stepper.solution(), export_solution_path);
  return result;
}

namespace {

std::string format_value(double v, bool full) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), full ? "%.17g" : "%.2e", v);
  return buf;
}

std::string format_eoc(const std::optional<double>& eoc, bool full) {
  if (!eoc) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), full ? "%.17g" : "%.2f", *eoc);
  return buf;
}

}  // namespace

void write_table_csv(std::ostream& out, const ConvergenceTable& table,
                     bool full_precision) {
  out << "N,dt,E_linf_L2,EOC,E_l2_H10,EOC,E_linf_H10,EOC,E_mass\n";
  for (const auto& row : table.rows) {
    out << row.division << ',' << format_value(row.dt, full_precision) << ','
        << format_value(row.errors.e_linf_l2, full_precision) << ','
        << format_eoc(row.eocs[0], full_precision) << ','
        << format_value(row.errors.e_l2_h10, full_precision) << ','
        << format_eoc(row.eocs[1], full_precision) << ','
        << format_value(row.errors.e_linf_h10, full_precision) << ','
        << format_eoc(row.eocs[2], full_precision) << ','
        << format_value(row.mass.e_mass, full_precision) << '\n';
  }
}

void write_table_text(std::ostream& out, const ConvergenceTable& table) {
  char line[256];
  std::snprintf(line, sizeof(line), "%6s %10s %11s %6s %11s %6s %11s %6s %11s",
                "N", "dt", "E_linf_L2", "EOC", "E_l2_H10", "EOC",
                "E_linf_H10", "EOC", "E_mass");
  out << line << "\n";
  for (const auto& row : table.rows) {
    auto eoc = [](const std::optional<double>& e) {
      if (!e) return std::string("---");
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.2f", *e);
      return std::string(buf);
    };
    std::snprintf(line, sizeof(line),
                  "%6d %10.2e %11.2e %6s %11.2e %6s %11.2e %6s %11.2e",
                  row.division, row.dt, row.errors.e_linf_l2,
                  eoc(row.eocs[0]).c_str(), row.errors.e_l2_h10,
                  eoc(row.eocs[1]).c_str(), row.errors.e_linf_h10,
                  eoc(row.eocs[2]).c_str(), row.mass.e_mass);
    out << line << "\n";
  }
}

}  // namespace mplg
