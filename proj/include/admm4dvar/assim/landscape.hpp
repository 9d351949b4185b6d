#pragma once

#include <cstddef>
#include <vector>

#include "admm4dvar/assim/problem.hpp"
#include "admm4dvar/core/parallel.hpp"

namespace admm4dvar {

/// Evenly spaced samples lo, ..., hi (a single point sits at lo).
struct Axis {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t points = 1;

  double value(std::size_t i) const {
    if (points <= 1) return lo;
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
};

struct LandscapeBox {
  Axis x{-6.0, 6.0, 49};
  Axis y{-6.0, 6.0, 49};
  Axis z{14.0, 26.0, 49};
};

struct LandscapeCell {
  double x0, y0, z0, value;
};

/// Shooting objective on the tensor grid, ordered x-major then y then z.
template <DynamicalModel M>
std::vector<LandscapeCell> scan_landscape(const AssimilationProblem<M>& prob, const LandscapeBox& box,
                                          std::size_t threads = 1) {
  if (prob.dim() != 3) throw ConfigError("scan_landscape: requires a three-dimensional state");
  const std::size_t nx = box.x.points, ny = box.y.points, nz = box.z.points;
  std::vector<LandscapeCell> cells(nx * ny * nz);
  parallel_for(0, cells.size(), threads, [&](std::size_t idx) {
    const std::size_t i = idx / (ny * nz);
    const std::size_t j = (idx / nz) % ny;
    const std::size_t k = idx % nz;
    const StateVector u0{box.x.value(i), box.y.value(j), box.z.value(k)};
    cells[idx] = {u0[0], u0[1], u0[2], shooting_objective(u0, prob)};
  });
  return cells;
}

/// Number of interior cells of an nx-by-ny slice (row-major in x) whose value is
/// strictly below all eight neighbours.
inline std::size_t count_strict_local_minima(const std::vector<double>& slice, std::size_t nx, std::size_t ny) {
  std::size_t count = 0;
  for (std::size_t i = 1; i + 1 < nx; ++i)
    for (std::size_t j = 1; j + 1 < ny; ++j) {
      const double c = slice[i * ny + j];
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          if (!(c < slice[(i + di) * ny + (j + dj)])) {
            is_min = false;
            break;
          }
        }
      if (is_min) ++count;
    }
  return count;
}

}  // namespace admm4dvar
