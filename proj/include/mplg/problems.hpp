#pragma once

#include "mplg/scheme.hpp"

namespace mplg {

/// Built-in benchmark: a product of exponential pulses advected through the
/// box (-1,1)^d by the velocity u_i = 1 + sin(t - x_i), with exact solution
/// phi(x,t) = prod_i exp(-(1 - cos(t - x_i)) / nu), f = 0 and g = 0. The
/// flow has nonzero divergence, which is what makes the Jacobian weighting
/// observable in the mass metrics.
ProblemData pulse_benchmark(int dim, double nu);

/// Pure diffusion of the given initial data (u = 0, f = g = 0); the regime
/// in which the scheme conserves mass to machine precision.
ProblemData diffusion_benchmark(int dim, double nu,
                                std::function<double(const Point&)> initial);

}  // namespace mplg
