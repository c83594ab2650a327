#pragma once

// Prescribed smooth velocity fields sampled from stream functions, so
// incompressibility holds exactly by construction (a projection step would
// contaminate the identity residuals downstream).

#include <cmath>
#include <numbers>
#include <string>

#include "chemflow/errors.hpp"
#include "chemflow/field.hpp"
#include "chemflow/grid.hpp"
#include "chemflow/types.hpp"

namespace chemflow {

enum class FlowKind { zero, cellular, shear };

struct FlowSpec {
  FlowKind kind = FlowKind::zero;
  double amplitude = 0.0;       // peak speed A
  int cells = 1;                // cells per box side (cellular only)
  double time_frequency = 0.0;  // omega; 0 = steady
};

inline void validate(const FlowSpec& spec) {
  if (spec.amplitude < 0.0)
    throw invalid_argument("flow amplitude must be >= 0");
  if (spec.cells < 1) throw invalid_argument("flow cells must be >= 1");
  if (spec.time_frequency < 0.0)
    throw invalid_argument("flow time_frequency must be >= 0");
}

inline std::string to_string(FlowKind kind) {
  switch (kind) {
    case FlowKind::zero: return "zero";
    case FlowKind::cellular: return "cellular";
    case FlowKind::shear: return "shear";
  }
  throw invalid_argument("unknown flow kind");
}

inline FlowKind flow_kind_from_string(const std::string& name) {
  if (name == "zero") return FlowKind::zero;
  if (name == "cellular") return FlowKind::cellular;
  if (name == "shear") return FlowKind::shear;
  throw invalid_argument("unknown flow kind: " + name);
}

// u = (-d(psi)/dy, d(psi)/dx) for
//   cellular: psi = (A L / (2 pi k)) sin(2 pi k x / L) sin(2 pi k y / L) cos(w t)
//   shear:    psi = (A L / (2 pi))  cos(2 pi y / L)
//   zero:     psi = 0
inline VectorField sample_flow(const FlowSpec& spec, const Grid& grid,
                               double t) {
  validate(spec);
  const int n = grid.n;
  VectorField u{grid, rvec(grid.size(), 0.0), rvec(grid.size(), 0.0)};
  switch (spec.kind) {
    case FlowKind::zero:
      break;
    case FlowKind::cellular: {
      const double c =
          2.0 * std::numbers::pi * spec.cells / grid.box_size;
      const double a = spec.amplitude * std::cos(spec.time_frequency * t);
      for (int iy = 0; iy < n; ++iy) {
        const double sy = std::sin(c * grid.coord[iy]);
        const double cy = std::cos(c * grid.coord[iy]);
        for (int ix = 0; ix < n; ++ix) {
          const std::size_t i = static_cast<std::size_t>(iy) * n + ix;
          u.x_values[i] = -a * std::sin(c * grid.coord[ix]) * cy;
          u.y_values[i] = a * std::cos(c * grid.coord[ix]) * sy;
        }
      }
      break;
    }
    case FlowKind::shear: {
      const double c = 2.0 * std::numbers::pi / grid.box_size;
      for (int iy = 0; iy < n; ++iy) {
        const double ux = spec.amplitude * std::sin(c * grid.coord[iy]);
        for (int ix = 0; ix < n; ++ix)
          u.x_values[static_cast<std::size_t>(iy) * n + ix] = ux;
      }
      break;
    }
  }
  return u;
}

inline double max_speed(const VectorField& u) {
  double m = 0.0;
  for (std::size_t i = 0; i < u.x_values.size(); ++i) {
    const double s = std::hypot(u.x_values[i], u.y_values[i]);
    if (s > m) m = s;
  }
  return m;
}

}  // namespace chemflow
