#include "mplg/scheme.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace mplg {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Sampled fallback for the W^{1,inf} seminorm when the field does not carry
// one; diagnostics only.
double sample_w1inf(const VelocityField& u, const ProblemData& problem) {
  const int d = problem.domain.dim;
  double sup = 0.0;
  const int nx = 9, nt = 6;
  for (int it = 0; it <= nt; ++it) {
    const double t = problem.T * it / nt;
    for (int i2 = 0; i2 <= (d >= 3 ? nx : 0); ++i2)
      for (int i1 = 0; i1 <= (d >= 2 ? nx : 0); ++i1)
        for (int i0 = 0; i0 <= nx; ++i0) {
          Point x = origin();
          const int idx[3] = {i0, i1, i2};
          for (int c = 0; c < d; ++c)
            x[c] = problem.domain.lower[c] +
                   (problem.domain.upper[c] - problem.domain.lower[c]) *
                       idx[c] / nx;
          const Mat g = u.gradient(x, t);
          for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) sup = std::max(sup, std::abs(g[r][c]));
        }
  }
  return sup;
}

SparseMatrix combine(double alpha, const SparseMatrix& m, double beta,
                     const SparseMatrix& k) {
  // M and K share the sparsity pattern (same element coupling).
  std::vector<double> values(m.values().size());
  for (std::size_t i = 0; i < values.size(); ++i)
    values[i] = alpha * m.values()[i] + beta * k.values()[i];
  return SparseMatrix(m.rows(), m.cols(),
                      {m.row_offsets().begin(), m.row_offsets().end()},
                      {m.column_indices().begin(), m.column_indices().end()},
                      std::move(values));
}

}  // namespace

int step_count(double T, double dt) {
  return static_cast<int>(std::floor(T / dt + 1e-10));
}

Stepper::Stepper(const ProblemData& problem, const FESpace& space,
                 const SchemeConfig& config)
    : problem_(&problem), space_(&space), config_(config) {
  if (config.dt <= 0.0) throw std::invalid_argument("Stepper: dt must be > 0");
  if (problem.nu <= 0.0 || problem.nu > 1.0)
    throw std::invalid_argument("Stepper: nu must lie in (0, 1]");
  total_steps_ = step_count(problem.T, config.dt);

  FEFunction phi0 = interpolate(space, problem.initial);
  phi_prev_ = std::move(phi0.coeffs);

  mass_ = assemble_mass(space);
  stiffness_ = assemble_stiffness(space);
  system_first_ = combine(1.0 / config.dt, mass_, problem.nu, stiffness_);
  system_two_step_ =
      combine(1.5 / config.dt, mass_, problem.nu, stiffness_);

  diagnostics_.dt_w1inf =
      config.dt * (problem.velocity.w1inf_seminorm
                       ? *problem.velocity.w1inf_seminorm
                       : sample_w1inf(problem.velocity, problem));
  if (diagnostics_.dt_w1inf > 0.125) {
    diagnostics_.hyp_dt_warning = true;
    std::fprintf(stderr,
                 "mplg: warning: dt |u|_W1inf = %.3g exceeds 1/8; the "
                 "Jacobian bounds [1/2, 3/2] are not guaranteed\n",
                 diagnostics_.dt_w1inf);
  }

  rule_ = simplex_rule(space.mesh().dim());
  shape_table_.resize(rule_.size());
  for (int q = 0; q < rule_.size(); ++q)
    space.shape_values(std::span<const double>(rule_.points[q].data(), 4),
                       shape_table_[q].data());
  cell_jacobian_ = factorial(space.mesh().dim()) * space.mesh().cell_volume();
}

void Stepper::assemble_upwind_rhs(const Vector& coeffs, int dt_multiplier,
                                  double t, bool with_jacobian, Vector& out) {
  const Mesh& mesh = space_->mesh();
  const FESpace& space = *space_;
  const int d = mesh.dim();
  const int nloc = space.dofs_per_cell();
  const double step = dt_multiplier * config_.dt;
  const VelocityField& u = problem_->velocity;

  out.assign(space.dof_count(), 0.0);
  double values[10];
  for (int cell = 0; cell < mesh.cell_count(); ++cell) {
    auto verts = mesh.cell_vertices(cell);
    auto dofs = space.cell_dofs(cell);
    for (int q = 0; q < rule_.size(); ++q) {
      Point x = origin();
      for (int v = 0; v < d + 1; ++v) {
        const Point& p = mesh.vertex(verts[v]);
        const double lambda = rule_.points[q][v];
        for (int i = 0; i < d; ++i) x[i] += lambda * p[i];
      }
      const Point foot = upwind_point(u, t, step, x);
      const CellLocation loc = mesh.locate(foot);
      space.shape_values(std::span<const double>(loc.barycentric.data(), 4),
                         values);
      auto foot_dofs = space.cell_dofs(loc.cell_index);
      double composed = 0.0;
      for (int i = 0; i < nloc; ++i)
        composed += coeffs[foot_dofs[i]] * values[i];
      if (with_jacobian)
        composed *= jacobian_det(d, u, t, step, x, &diagnostics_.gamma);
      const double w = rule_.weights[q] * cell_jacobian_ * composed;
      for (int i = 0; i < nloc; ++i) out[dofs[i]] += w * shape_table_[q][i];
    }
  }
}

Vector Stepper::solve(const SparseMatrix& system, const Vector& rhs) {
  const int max_iter = config_.cg_max_iter > 0 ? config_.cg_max_iter
                                               : 10 * space_->dof_count();
  CgResult result = cg_solve(system, rhs, config_.cg_tol, max_iter,
                             Preconditioner::Jacobi, &phi_prev_);
  diagnostics_.total_cg_iterations += result.iterations;
  diagnostics_.max_cg_iterations =
      std::max(diagnostics_.max_cg_iterations, result.iterations);
  diagnostics_.max_cg_residual =
      std::max(diagnostics_.max_cg_residual, result.relative_residual);
  return std::move(result.x);
}

const Vector& Stepper::step() {
  if (step_ >= total_steps_)
    throw std::logic_error("Stepper::step: run already complete");
  const int n = step_ + 1;
  const double t = n * config_.dt;
  const double dt = config_.dt;
  const bool with_jacobian =
      config_.variant != SchemeVariant::EwingRussellTwoStep;
  const bool two_step =
      config_.variant != SchemeVariant::RuiTabataFirstOrder && n >= 2;

  Vector rhs;
  if (!two_step) {
    assemble_upwind_rhs(phi_prev_, 1, t, with_jacobian, rhs);
    for (double& v : rhs) v /= dt;
  } else {
    Vector r1, r2;
    assemble_upwind_rhs(phi_prev_, 1, t, with_jacobian, r1);
    assemble_upwind_rhs(phi_prev2_, 2, t, with_jacobian, r2);
    rhs.resize(r1.size());
    for (std::size_t i = 0; i < rhs.size(); ++i)
      rhs[i] = (4.0 * r1[i] - r2[i]) / (2.0 * dt);
  }
  if (problem_->source || problem_->boundary_flux) {
    const Vector load = assemble_load(*space_, problem_->source,
                                      problem_->boundary_flux, t);
    axpy(1.0, load, rhs);
  }

  Vector next = solve(two_step ? system_two_step_ : system_first_, rhs);
  phi_prev2_ = std::move(phi_prev_);
  has_prev2_ = true;
  phi_prev_ = std::move(next);
  step_ = n;
  return phi_prev_;
}

Trajectory Stepper::run(const Observer& observer) {
  Trajectory traj;
  traj.dt = config_.dt;
  traj.steps = total_steps_;
  traj.times.push_back(0.0);
  if (config_.record_snapshots) traj.snapshots.push_back(phi_prev_);
  while (step_ < total_steps_) {
    const Vector& coeffs = step();
    traj.times.push_back(time());
    if (config_.record_snapshots) traj.snapshots.push_back(coeffs);
    if (observer) observer(step_, time(), coeffs);
  }
  traj.diagnostics = diagnostics_;
  return traj;
}

Trajectory run_scheme(const ProblemData& problem, const FESpace& space,
                      const SchemeConfig& config,
                      const Stepper::Observer& observer) {
  Stepper stepper(problem, space, config);
  return stepper.run(observer);
}

}  // namespace mplg
