#include <doctest.h>

#include <cmath>

#include "mplg/analysis.hpp"
#include "mplg/problems.hpp"
#include "mplg/scheme.hpp"

using namespace mplg;

namespace {

// dense LU on the assembled system, the oracle for one solver step
Vector dense_solve(std::vector<std::vector<double>> a, Vector b) {
  const int n = static_cast<int>(b.size());
  for (int k = 0; k < n; ++k) {
    int pivot = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[pivot][k])) pivot = i;
    std::swap(a[k], a[pivot]);
    std::swap(b[k], b[pivot]);
    for (int i = k + 1; i < n; ++i) {
      const double f = a[i][k] / a[k][k];
      for (int j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  Vector x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

double mass_of(const SparseMatrix& mass, const Vector& coeffs) {
  Vector ones(coeffs.size(), 1.0);
  return dot(spmv(mass, ones), coeffs);
}

}  // namespace

TEST_CASE("step count guards against representation noise") {
  CHECK(step_count(0.5, 0.25) == 2);
  CHECK(step_count(0.5, 0.1) == 5);
  CHECK(step_count(0.2, 0.25) == 0);
  CHECK(step_count(0.5, 0.125) == 4);
}

TEST_CASE("constant state is a fixed point when u=0, f=g=0") {
  ProblemData problem =
      diffusion_benchmark(1, 1e-2, [](const Point&) { return 3.0; });
  const Mesh mesh = build_box_mesh(1, 8);
  const FESpace space(mesh, 1);
  SchemeConfig config;
  config.dt = 0.1;
  const Trajectory traj = run_scheme(problem, space, config);
  REQUIRE(traj.steps == 5);
  for (const auto& snapshot : traj.snapshots)
    for (double c : snapshot) CHECK(c == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("initialization interpolates the initial datum and checks hyp dt") {
  const ProblemData pulse = pulse_benchmark(1, 1e-2);
  const Mesh mesh = build_box_mesh(1, 32);
  const FESpace space(mesh, 1);

  SchemeConfig config;
  config.dt = 0.25;  // dt |u|_W1inf = 0.25 > 1/8
  Stepper warned(pulse, space, config);
  CHECK(warned.diagnostics().hyp_dt_warning);
  CHECK(warned.diagnostics().dt_w1inf == doctest::Approx(0.25));

  config.dt = 0.1;  // 0.1 <= 1/8
  Stepper quiet(pulse, space, config);
  CHECK_FALSE(quiet.diagnostics().hyp_dt_warning);

  for (int i = 0; i < space.dof_count(); ++i)
    CHECK(quiet.solution()[i] ==
          doctest::Approx(pulse.initial(space.dof_point(i))).epsilon(1e-15));
}

TEST_CASE("one step equals the dense direct solve of the same system") {
  const ProblemData pulse = pulse_benchmark(1, 1e-2);
  const Mesh mesh = build_box_mesh(1, 4);
  const FESpace space(mesh, 1);
  SchemeConfig config;
  config.dt = 0.1;
  config.cg_tol = 1e-14;
  Stepper stepper(pulse, space, config);
  const Vector phi0 = stepper.solution();

  // reproduce the first-order step by hand: ((1/dt) M + nu K) c = (1/dt) r1
  const int n = space.dof_count();
  const SparseMatrix& mass = stepper.mass_matrix();
  const SparseMatrix& stiffness = stepper.stiffness_matrix();
  std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      dense[i][j] =
          mass.coeff(i, j) / config.dt + pulse.nu * stiffness.coeff(i, j);

  FEFunction previous;
  previous.space = &space;
  previous.coeffs = phi0;
  const QuadratureRule rule = simplex_rule(1);
  Vector rhs(n, 0.0);
  for (int cell = 0; cell < mesh.cell_count(); ++cell) {
    auto dofs = space.cell_dofs(cell);
    for (int q = 0; q < rule.size(); ++q) {
      Point x = origin();
      auto verts = mesh.cell_vertices(cell);
      for (int v = 0; v < 2; ++v)
        x[0] += rule.points[q][v] * mesh.vertex(verts[v])[0];
      const double composed =
          composed_term(previous, pulse.velocity, config.dt, 1, config.dt, x);
      const double w = rule.weights[q] * mesh.cell_volume() * composed;
      double values[10];
      std::array<double, 4> bary = mesh.barycentric(cell, x);
      space.shape_values(std::span<const double>(bary.data(), 4), values);
      for (int i = 0; i < 2; ++i) rhs[dofs[i]] += w * values[i];
    }
  }
  for (double& v : rhs) v /= config.dt;
  const Vector expected = dense_solve(dense, rhs);

  const Vector& computed = stepper.step();
  for (int i = 0; i < n; ++i)
    CHECK(computed[i] == doctest::Approx(expected[i]).epsilon(1e-10));
}

TEST_CASE("forcing adds dt * |Omega| of mass per unit source") {
  ProblemData problem =
      diffusion_benchmark(1, 1e-2, [](const Point&) { return 0.0; });
  problem.source = [](const Point&, double) { return 1.0; };
  const Mesh mesh = build_box_mesh(1, 16);
  const FESpace space(mesh, 1);
  SchemeConfig config;
  config.dt = 0.1;
  config.cg_tol = 1e-14;
  Stepper stepper(problem, space, config);
  const Vector& phi1 = stepper.step();
  CHECK(mass_of(stepper.mass_matrix(), phi1) ==
        doctest::Approx(config.dt * 2.0).epsilon(1e-12));
}

TEST_CASE("mass is exactly conserved for u=0 (machine precision)") {
  for (int dim : {1, 2}) {
    ProblemData problem = diffusion_benchmark(dim, 1e-2, [](const Point& x) {
      return 1.0 + 0.3 * std::cos(M_PI * x[0]) + 0.1 * x[1];
    });
    const Mesh mesh = build_box_mesh(dim, dim == 1 ? 32 : 8);
    const FESpace space(mesh, 1);
    SchemeConfig config;
    config.dt = 0.125;
    config.cg_tol = 1e-14;
    Stepper stepper(problem, space, config);
    const double m0 = mass_of(stepper.mass_matrix(), stepper.solution());
    const Trajectory traj = stepper.run();
    for (const auto& snapshot : traj.snapshots) {
      const double m = mass_of(stepper.mass_matrix(), snapshot);
      CHECK(std::abs(m - m0) / std::abs(m0) <= 1e-13);
    }
  }
}

TEST_CASE("run honors N_T and the no-step edge case") {
  ProblemData problem =
      diffusion_benchmark(1, 1e-2, [](const Point&) { return 1.0; });
  problem.T = 0.2;
  const Mesh mesh = build_box_mesh(1, 4);
  const FESpace space(mesh, 1);
  SchemeConfig config;
  config.dt = 0.25;  // T < dt -> no steps, trajectory holds phi^0 only
  const Trajectory traj = run_scheme(problem, space, config);
  CHECK(traj.steps == 0);
  CHECK(traj.snapshots.size() == 1);
}

TEST_CASE("benchmark run stays within the gamma window when hyp dt holds") {
  const ProblemData pulse = pulse_benchmark(1, 1e-2);
  const Mesh mesh = build_box_mesh(1, 32);
  const FESpace space(mesh, 1);
  SchemeConfig config;
  config.dt = 0.05;  // dt |u|_W1inf = 0.05 <= 1/8
  Stepper stepper(pulse, space, config);
  stepper.run();
  CHECK_FALSE(stepper.diagnostics().hyp_dt_warning);
  CHECK(stepper.diagnostics().gamma.out_of_range == 0);
  CHECK(stepper.diagnostics().gamma.min_value >= 0.5);
  CHECK(stepper.diagnostics().gamma.max_value <= 1.5);
}

TEST_CASE("gamma excursions imply a violated dt hypothesis in 1D") {
  ProblemData pulse = pulse_benchmark(1, 1e-2);
  pulse.T = 0.9;  // at least one genuine two-step update
  const Mesh mesh = build_box_mesh(1, 16);
  const FESpace space(mesh, 1);
  SchemeConfig config;
  config.dt = 0.3;  // 2 dt = 0.6 -> gamma~ reaches 1.6
  Stepper stepper(pulse, space, config);
  stepper.run();
  CHECK(stepper.diagnostics().gamma.out_of_range > 0);
  CHECK(stepper.diagnostics().hyp_dt_warning);
}

TEST_CASE("variants coincide when the velocity is constant (gamma = 1)") {
  ProblemData problem =
      diffusion_benchmark(1, 1e-2, [](const Point& x) {
        return std::exp(-2.0 * x[0] * x[0]);
      });
  problem.velocity.value = [](const Point&, double) {
    return Point{0.7, 0.0, 0.0};
  };
  problem.velocity.w1inf_seminorm = 0.0;
  const Mesh mesh = build_box_mesh(1, 32);
  const FESpace space(mesh, 1);

  SchemeConfig config;
  config.dt = 0.05;
  config.cg_tol = 1e-14;
  config.variant = SchemeVariant::MassPreservingTwoStep;
  const Trajectory mp2 = run_scheme(problem, space, config);
  config.variant = SchemeVariant::EwingRussellTwoStep;
  const Trajectory er2 = run_scheme(problem, space, config);
  for (int n = 0; n <= mp2.steps; ++n)
    for (int i = 0; i < space.dof_count(); ++i)
      CHECK(mp2.snapshots[n][i] ==
            doctest::Approx(er2.snapshots[n][i]).epsilon(1e-12));
}

TEST_CASE("first-order variant differs from the two-step variant") {
  const ProblemData pulse = pulse_benchmark(1, 1e-2);
  const Mesh mesh = build_box_mesh(1, 32);
  const FESpace space(mesh, 1);
  SchemeConfig config;
  config.dt = 0.05;
  config.variant = SchemeVariant::RuiTabataFirstOrder;
  const Trajectory rt1 = run_scheme(pulse, space, config);
  config.variant = SchemeVariant::MassPreservingTwoStep;
  const Trajectory mp2 = run_scheme(pulse, space, config);
  double diff = 0.0;
  for (int i = 0; i < space.dof_count(); ++i)
    diff = std::max(diff,
                    std::abs(rt1.snapshots.back()[i] - mp2.snapshots.back()[i]));
  CHECK(diff > 1e-6);
}

TEST_CASE("system matrices are symmetric positive definite") {
  const ProblemData pulse = pulse_benchmark(2, 1e-2);
  const Mesh mesh = build_box_mesh(2, 4);
  for (int degree = 1; degree <= 2; ++degree) {
    const FESpace space(mesh, degree);
    SchemeConfig config;
    config.dt = 0.1;
    Stepper stepper(pulse, space, config);
    CHECK(stepper.mass_matrix().is_symmetric());
    CHECK(stepper.stiffness_matrix().is_symmetric());
  }
}

TEST_CASE("P2 space beats P1 on the same mesh") {
  ProblemData pulse = pulse_benchmark(1, 1e-2);
  const Mesh mesh = build_box_mesh(1, 64);
  SchemeConfig config;
  config.dt = 0.01;  // small enough that space error dominates
  double errors[2];
  for (int degree = 1; degree <= 2; ++degree) {
    const FESpace space(mesh, degree);
    const Trajectory traj = run_scheme(pulse, space, config);
    errors[degree - 1] = error_norms(traj, pulse, space).e_linf_l2;
  }
  CHECK(errors[1] < errors[0] / 3.0);
  CHECK(errors[1] < 5e-3);
}

TEST_CASE("CFL-free stability: no blow-up at dt = 10 h") {
  const ProblemData pulse = pulse_benchmark(1, 1e-2);
  const Mesh mesh = build_box_mesh(1, 320);  // h = 0.00625, dt = 0.0625
  const FESpace space(mesh, 1);
  SchemeConfig config;
  config.dt = 10.0 * mesh.grid_h();
  Stepper stepper(pulse, space, config);
  const SparseMatrix& mass = stepper.mass_matrix();
  Vector work(space.dof_count());
  mass.multiply(stepper.solution(), work);
  const double norm0 = std::sqrt(dot(work, stepper.solution()));
  const Trajectory traj = stepper.run();
  for (const auto& snapshot : traj.snapshots) {
    mass.multiply(snapshot, work);
    CHECK(std::sqrt(dot(work, snapshot)) <= 10.0 * norm0);
  }
}
