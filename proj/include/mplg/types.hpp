#pragma once

#include <array>
#include <cstddef>

namespace mplg {

/// Spatial point. The solver works in d = 1, 2 or 3 dimensions; coordinates
/// beyond the active dimension are kept at zero so a single type serves all d.
using Point = std::array<double, 3>;

/// Dense d x d matrix (row i = gradient of component i), padded to 3x3.
using Mat = std::array<std::array<double, 3>, 3>;

inline constexpr Point origin() { return {0.0, 0.0, 0.0}; }

}  // namespace mplg
