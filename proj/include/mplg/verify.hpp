#pragma once

#include <string>
#include <vector>

#include "mplg/analysis.hpp"

namespace mplg {

/// One named property check with a machine-readable outcome; the CLI verify
/// command and the acceptance suite both run these.
struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Monomial exactness of all cell and facet rules against the closed-form
/// simplex integrals, plus weight positivity and weight sums.
std::vector<CheckResult> verify_quadrature(double tol = 1e-13);

/// Determinant-versus-expansion identity on random velocity gradients.
std::vector<CheckResult> verify_jacobian(int samples_per_dim,
                                         unsigned long long seed,
                                         double tol = 1e-13);

std::vector<CheckResult> verify_gronwall(long long trials,
                                         unsigned long long seed);

/// Observed truncation orders of the one-step and two-step operators on a
/// smooth field: two-step slope >= 1.9, one-step slope in [0.9, 1.2].
std::vector<CheckResult> verify_truncation();

/// Machine-precision mass conservation in the exact-quadrature regime
/// (u = 0), with and without forcing.
std::vector<CheckResult> verify_conservation();

}  // namespace mplg
