#include "mplg/problems.hpp"

#include <cmath>

namespace mplg {

ProblemData pulse_benchmark(int dim, double nu) {
  ProblemData problem;
  problem.domain.dim = dim;
  problem.nu = nu;
  problem.T = 0.5;

  problem.velocity.value = [dim](const Point& x, double t) {
    Point v = origin();
    for (int i = 0; i < dim; ++i) v[i] = 1.0 + std::sin(t - x[i]);
    return v;
  };
  problem.velocity.gradient = [dim](const Point& x, double t) {
    Mat g{};
    for (int i = 0; i < dim; ++i) g[i][i] = -std::cos(t - x[i]);
    return g;
  };
  problem.velocity.w1inf_seminorm = 1.0;

  auto exact = [dim, nu](const Point& x, double t) {
    double value = 1.0;
    for (int i = 0; i < dim; ++i)
      value *= std::exp(-(1.0 - std::cos(t - x[i])) / nu);
    return value;
  };
  problem.exact = exact;
  problem.exact_dt = [dim, nu, exact](const Point& x, double t) {
    double factor = 0.0;
    for (int i = 0; i < dim; ++i) factor -= std::sin(t - x[i]) / nu;
    return factor * exact(x, t);
  };
  problem.initial = [exact](const Point& x) { return exact(x, 0.0); };
  return problem;
}

ProblemData diffusion_benchmark(int dim, double nu,
                                std::function<double(const Point&)> initial) {
  ProblemData problem;
  problem.domain.dim = dim;
  problem.nu = nu;
  problem.T = 0.5;
  problem.velocity.value = [](const Point&, double) { return origin(); };
  problem.velocity.gradient = [](const Point&, double) { return Mat{}; };
  problem.velocity.w1inf_seminorm = 0.0;
  problem.initial = std::move(initial);
  return problem;
}

}  // namespace mplg
