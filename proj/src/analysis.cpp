#include "mplg/analysis.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace mplg {

namespace {

double quadratic_form(const SparseMatrix& a, const Vector& x, Vector& work) {
  a.multiply(x, work);
  return std::max(0.0, dot(work, x));
}

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

ErrorReport error_norms(const Trajectory& traj, const ProblemData& problem,
                        const FESpace& space) {
  if (!problem.exact)
    throw std::invalid_argument("error_norms: problem has no exact solution");
  if (traj.snapshots.empty())
    throw std::invalid_argument("error_norms: trajectory has no snapshots");

  const SparseMatrix mass = assemble_mass(space);
  const SparseMatrix stiffness = assemble_stiffness(space);
  Vector work(space.dof_count());
  Vector diff(space.dof_count());

  double max_err_l2 = 0.0, max_ref_l2 = 0.0;
  double max_err_h1 = 0.0, max_ref_h1 = 0.0;
  double sum_err_h1 = 0.0, sum_ref_h1 = 0.0;
  double sum_err_dt = 0.0, sum_ref_dt = 0.0;

  for (int n = 1; n <= traj.steps; ++n) {
    const double t = traj.times[n];
    const FEFunction ref = interpolate(
        space, [&](const Point& x) { return problem.exact(x, t); });
    const Vector& c = traj.snapshots[n];
    for (int i = 0; i < space.dof_count(); ++i)
      diff[i] = c[i] - ref.coeffs[i];

    max_err_l2 = std::max(max_err_l2, quadratic_form(mass, diff, work));
    max_ref_l2 = std::max(max_ref_l2, quadratic_form(mass, ref.coeffs, work));
    const double err_h1 = quadratic_form(stiffness, diff, work);
    const double ref_h1 = quadratic_form(stiffness, ref.coeffs, work);
    max_err_h1 = std::max(max_err_h1, err_h1);
    max_ref_h1 = std::max(max_ref_h1, ref_h1);
    sum_err_h1 += err_h1;
    sum_ref_h1 += ref_h1;

    if (problem.exact_dt) {
      const FEFunction ref_dt = interpolate(
          space, [&](const Point& x) { return problem.exact_dt(x, t); });
      Vector bdf(space.dof_count());
      if (n == 1) {
        for (int i = 0; i < space.dof_count(); ++i)
          bdf[i] = (traj.snapshots[1][i] - traj.snapshots[0][i]) / traj.dt;
      } else {
        for (int i = 0; i < space.dof_count(); ++i)
          bdf[i] = (3.0 * traj.snapshots[n][i] -
                    4.0 * traj.snapshots[n - 1][i] +
                    traj.snapshots[n - 2][i]) /
                   (2.0 * traj.dt);
      }
      for (int i = 0; i < space.dof_count(); ++i) bdf[i] -= ref_dt.coeffs[i];
      sum_err_dt += quadratic_form(mass, bdf, work);
      sum_ref_dt += quadratic_form(mass, ref_dt.coeffs, work);
    }
  }

  ErrorReport report;
  report.e_linf_l2 = std::sqrt(max_err_l2) / std::sqrt(max_ref_l2);
  report.e_l2_h10 = std::sqrt(sum_err_h1) / std::sqrt(sum_ref_h1);
  report.e_linf_h10 = std::sqrt(max_err_h1) / std::sqrt(max_ref_h1);
  if (problem.exact_dt)
    report.e_h1_l2 = std::sqrt(sum_err_dt) / std::sqrt(sum_ref_dt);
  return report;
}

FEFunction bdf_apply(std::span<const FEFunction> sequence, int n, double dt) {
  if (n < 1 || n >= static_cast<int>(sequence.size()))
    throw std::invalid_argument("bdf_apply: insufficient history");
  const FESpace& space = *sequence[n].space;
  FEFunction out;
  out.space = &space;
  out.coeffs.resize(space.dof_count());
  if (n == 1) {
    for (int i = 0; i < space.dof_count(); ++i)
      out.coeffs[i] =
          (sequence[1].coeffs[i] - sequence[0].coeffs[i]) / dt;
  } else {
    for (int i = 0; i < space.dof_count(); ++i)
      out.coeffs[i] =
          (3.0 * sequence[n].coeffs[i] - 4.0 * sequence[n - 1].coeffs[i] +
           sequence[n - 2].coeffs[i]) /
          (2.0 * dt);
  }
  return out;
}

MassReport mass_metrics(const Trajectory& traj, const ProblemData& problem,
                        const FESpace& space) {
  if (traj.snapshots.empty())
    throw std::invalid_argument("mass_metrics: trajectory has no snapshots");
  const SparseMatrix mass = assemble_mass(space);
  Vector ones(space.dof_count(), 1.0);
  Vector weights(space.dof_count());
  mass.multiply(ones, weights);  // integral of each basis function

  const int nt = traj.steps;
  std::vector<double> integral(nt + 1);
  for (int n = 0; n <= nt; ++n)
    integral[n] = dot(weights, traj.snapshots[n]);

  MassReport report;
  report.m_h.resize(nt + 1);
  for (int n = 0; n <= nt; ++n)
    report.m_h[n] = n <= 1 ? integral[n]
                           : 1.5 * integral[n] - 0.5 * integral[n - 1];

  report.e_mass_prime = std::abs(integral[nt] - integral[0]) /
                        std::abs(integral[0]);

  if (problem.exact) {
    std::vector<double> exact_integral(nt + 1);
    for (int n = 0; n <= nt; ++n) {
      const double t = traj.times[n];
      const FEFunction ref = interpolate(
          space, [&](const Point& x) { return problem.exact(x, t); });
      exact_integral[n] = dot(weights, ref.coeffs);
    }
    report.e_mass = std::abs(integral[nt] - exact_integral[nt]) /
                    std::abs(exact_integral[nt]);
    double num = 0.0, den = 0.0;
    for (int n = 1; n <= nt; ++n) {
      num += std::abs(integral[n] - exact_integral[n]);
      den += std::abs(exact_integral[n]);
    }
    report.e_mass_double_prime = num / den;
  } else {
    report.e_mass = nan_value();
    report.e_mass_double_prime = nan_value();
  }
  return report;
}

std::vector<double> mass_balance_residual(const Trajectory& traj,
                                          const ProblemData& problem,
                                          const FESpace& space) {
  const Mesh& mesh = space.mesh();
  const MassReport report = mass_metrics(traj, problem, space);
  const QuadratureRule cell_rule = simplex_rule(mesh.dim());
  const QuadratureRule bdry_rule = facet_rule(mesh.dim());

  std::vector<double> residual(traj.steps + 1, 0.0);
  double cumulative = 0.0;
  for (int n = 1; n <= traj.steps; ++n) {
    const double t = traj.times[n];
    double influx = 0.0;
    if (problem.source)
      influx += integrate_domain(cell_rule, mesh, [&](const Point& x) {
        return problem.source(x, t);
      });
    if (problem.boundary_flux)
      influx += integrate_boundary(bdry_rule, mesh, [&](const Point& x) {
        return problem.boundary_flux(x, t);
      });
    cumulative += traj.dt * influx;
    residual[n] = report.m_h[n] - report.m_h[0] - cumulative;
  }
  return residual;
}

ConvergenceTable& compute_eocs(ConvergenceTable& table) {
  for (std::size_t r = 1; r < table.rows.size(); ++r) {
    ConvergenceRow& row = table.rows[r];
    const ConvergenceRow& prev = table.rows[r - 1];
    double ratio = row.dt / prev.dt;
    if (std::abs(std::log(ratio)) < 1e-12)
      ratio = row.grid_h / prev.grid_h;  // fixed-dt sweep: order in h
    const double denom = std::log(ratio);
    const double errs[3] = {row.errors.e_linf_l2, row.errors.e_l2_h10,
                            row.errors.e_linf_h10};
    const double prev_errs[3] = {prev.errors.e_linf_l2, prev.errors.e_l2_h10,
                                 prev.errors.e_linf_h10};
    for (int k = 0; k < 3; ++k) {
      row.eocs[k].reset();
      if (errs[k] > 0.0 && prev_errs[k] > 0.0 && std::isfinite(errs[k]) &&
          std::isfinite(prev_errs[k]) && std::abs(denom) > 1e-12)
        row.eocs[k] = std::log(errs[k] / prev_errs[k]) / denom;
    }
  }
  return table;
}

TruncationProbe truncation_probe(int order, const VelocityField& u,
                                 const SpaceTimeField& field,
                                 std::span<const double> dt_list,
                                 const Mesh& mesh, double t_star) {
  if (order != 1 && order != 2)
    throw std::invalid_argument("truncation_probe: order must be 1 or 2");
  const int d = mesh.dim();
  const QuadratureRule rule = simplex_rule(d);

  TruncationProbe probe;
  for (double dt : dt_list) {
    auto residual = [&](const Point& x) {
      const Point v = u.value(x, t_star);
      const Mat g = u.gradient(x, t_star);
      double divergence = 0.0;
      for (int i = 0; i < d; ++i) divergence += g[i][i];
      const Point grad_phi = field.gradient(x, t_star);
      double advection = 0.0;
      for (int i = 0; i < d; ++i) advection += v[i] * grad_phi[i];
      const double target = field.time_derivative(x, t_star) +
                            divergence * field.value(x, t_star) + advection;

      const Point foot1 = upwind_point(u, t_star, dt, x);
      const double gamma1 = jacobian_det(d, u, t_star, dt, x);
      double lhs;
      if (order == 1) {
        lhs = (field.value(x, t_star) -
               field.value(foot1, t_star - dt) * gamma1) /
              dt;
      } else {
        const Point foot2 = upwind_point(u, t_star, 2.0 * dt, x);
        const double gamma2 = jacobian_det(d, u, t_star, 2.0 * dt, x);
        lhs = (3.0 * field.value(x, t_star) -
               4.0 * field.value(foot1, t_star - dt) * gamma1 +
               field.value(foot2, t_star - 2.0 * dt) * gamma2) /
              (2.0 * dt);
      }
      const double r = lhs - target;
      return r * r;
    };
    const double norm = std::sqrt(integrate_domain(rule, mesh, residual));
    probe.samples.emplace_back(dt, norm);
  }

  // least-squares slope of log(err) vs log(dt)
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(probe.samples.size());
  for (const auto& [dt, err] : probe.samples) {
    const double lx = std::log(dt), ly = std::log(err);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  probe.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return probe;
}

GronwallReport gronwall_check(long long trials, unsigned long long seed) {
  GronwallReport report;
  report.trials = trials;
  constexpr int kSteps = 200;
  constexpr double kSlack = 1e-10;

  for (long long trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ULL * (trial + 1));
    std::uniform_real_distribution<double> coef(0.0, 4.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> val(0.0, 2.0);

    double a0 = coef(rng), a1 = coef(rng), a2 = coef(rng);
    if (a1 < a2) std::swap(a1, a2);
    const double dt_cap = a0 > 0.0 ? std::min(1.0, 0.75 / a0) : 1.0;
    const double dt = dt_cap * std::max(unit(rng), 1e-3);
    const double a_star = a0 + a1 + a2;

    std::vector<double> x(kSteps + 1), y(kSteps + 1, 0.0), z(kSteps + 1, 0.0),
        b(kSteps + 1, 0.0);
    x[0] = val(rng);
    x[1] = val(rng);
    y[1] = val(rng);

    const double denom = 1.5 / dt - a0;
    for (int n = 2; n <= kSteps; ++n) {
      y[n] = val(rng);
      z[n] = val(rng);
      b[n] = val(rng);
      auto solve_x = [&]() {
        return ((2.0 / dt + a1) * x[n - 1] - (0.5 / dt - a2) * x[n - 2] +
                (y[n - 1] - y[n]) / dt - z[n] + b[n]) /
               denom;
      };
      double xn = solve_x();
      for (int attempt = 0; attempt < 40 && xn < 0.0; ++attempt) {
        y[n] *= 0.5;
        z[n] *= 0.5;
        xn = solve_x();
      }
      if (xn < 0.0) {
        y[n] = 0.0;
        z[n] = 0.0;
        xn = solve_x();
        if (xn < 0.0) {
          b[n] += -xn * denom;  // lift the bound so the equality holds at 0
          xn = 0.0;
        }
      }
      x[n] = xn;
    }

    // conclusion of the inequality for every n
    double z_sum = 0.0, b_sum = 0.0;
    bool violated = false;
    for (int n = 2; n <= kSteps; ++n) {
      z_sum += z[n];
      b_sum += b[n];
      const double lhs = x[n] + (2.0 / 3.0) * y[n] + (2.0 / 3.0) * dt * z_sum;
      const double bracket = x[0] + 1.5 * x[1] + y[1] + dt * b_sum;
      const double arg = 2.0 * a_star * n * dt;
      double rhs;
      if (bracket == 0.0) {
        rhs = 0.0;
      } else if (arg > 700.0) {
        rhs = std::numeric_limits<double>::infinity();
      } else {
        rhs = (std::exp(arg) + 1.0) * bracket;
      }
      if (lhs > rhs * (1.0 + kSlack) + 1e-12) violated = true;
    }
    if (violated) ++report.violations;

    // root properties of the characteristic quadratic
    const double disc = (2.0 + a1 * dt) * (2.0 + a1 * dt) -
                        (3.0 - 2.0 * a0 * dt) * (1.0 - 2.0 * a2 * dt);
    const double sq = std::sqrt(disc);
    const double q = (2.0 + a1 * dt + sq) / (3.0 - 2.0 * a0 * dt);
    const double p = (2.0 + a1 * dt - sq) / (3.0 - 2.0 * a0 * dt);
    const double lambda = 2.0 / 3.0;
    bool root_ok = std::abs(p) < 1.0 + 1e-12 && q >= 1.0 - 1e-12 &&
                   2.0 * lambda <= p + q + 1e-12 && p * q <= lambda + 1e-12 &&
                   q - p >= lambda - 1e-12;
    double qn = 1.0, pn = 1.0;
    for (int n = 1; n <= kSteps && root_ok; ++n) {
      qn *= q;
      pn *= p;
      const double arg = 2.0 * a_star * n * dt;
      const double bound =
          arg > 700.0 ? std::numeric_limits<double>::infinity()
                      : std::exp(arg) + 1.0;
      if (qn - pn > bound * (1.0 + kSlack) + 1e-12) root_ok = false;
    }
    if (!root_ok) ++report.root_property_violations;
  }
  return report;
}

}  // namespace mplg
