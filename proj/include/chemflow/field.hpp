#pragma once
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "chemflow/errors.hpp"
#include "chemflow/grid.hpp"
#include "chemflow/types.hpp"

namespace chemflow {

/// One scalar density sampled on a grid. Treated as an immutable value:
/// operations return new fields and never modify their inputs.
struct Field {
    Grid grid;
    rvec values;  // row-major, y outer: values[iy*n + ix]

    Field() = default;
    explicit Field(const Grid& g) : grid(g), values(g.size(), 0.0) {}
    Field(const Grid& g, rvec v) : grid(g), values(std::move(v)) {}

    double operator()(int ix, int iy) const {
        return values[std::size_t(iy) * grid.n + ix];
    }
};

/// A planar vector field (e.g. a prescribed flow or the chemotactic drift).
struct VectorField {
    Grid grid;
    rvec x_values, y_values;

    VectorField() = default;
    explicit VectorField(const Grid& g)
        : grid(g), x_values(g.size(), 0.0), y_values(g.size(), 0.0) {}
    VectorField(const Grid& g, rvec x, rvec y)
        : grid(g), x_values(std::move(x)), y_values(std::move(y)) {}
};

/// dx^2 * sum of samples: the trapezoid/rectangle rule, which is spectrally
/// accurate for smooth contained data on a periodic box.
inline double integrate(const Field& f) {
    return f.grid.cell_area() * kahan_sum(f.values.data(), f.values.size());
}

inline double min_value(const Field& f) {
    return *std::min_element(f.values.begin(), f.values.end());
}

inline double max_value(const Field& f) {
    return *std::max_element(f.values.begin(), f.values.end());
}

inline bool all_finite(const Field& f) {
    for (double v : f.values)
        if (!std::isfinite(v)) return false;
    return true;
}

/// Sampled isotropic Gaussian of prescribed mass, renormalized after
/// sampling so integrate() returns the requested mass exactly (makes
/// mass-identity residuals independent of sampling error).
inline Field gaussian(const Grid& grid, double mass, double cx, double cy,
                      double sigma) {
    if (!(mass > 0.0))
        throw invalid_argument("gaussian: mass must be positive");
    if (!(sigma >= 4.0 * grid.dx))
        throw invalid_argument("gaussian: sigma must be >= 4*dx (resolvable)");
    if (cx - 6.0 * sigma < 0.0 || cx + 6.0 * sigma > grid.box_size ||
        cy - 6.0 * sigma < 0.0 || cy + 6.0 * sigma > grid.box_size)
        throw invalid_argument("gaussian: center with its 6-sigma ball must lie inside the box");

    Field f(grid);
    const double amp = mass / (2.0 * std::numbers::pi * sigma * sigma);
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    for (int iy = 0; iy < grid.n; ++iy) {
        const double dy = grid.coord[iy] - cy;
        for (int ix = 0; ix < grid.n; ++ix) {
            const double dxr = grid.coord[ix] - cx;
            f.values[std::size_t(iy) * grid.n + ix] =
                amp * std::exp(-(dxr * dxr + dy * dy) * inv2s2);
        }
    }
    const double got = integrate(f);
    const double scale = mass / got;
    for (double& v : f.values) v *= scale;
    return f;
}

/// Gaussian centered at the box middle.
inline Field gaussian(const Grid& grid, double mass, double sigma) {
    return gaussian(grid, mass, grid.center(), grid.center(), sigma);
}

/// out = a*f + b*g (fields on the same grid).
// One Gaussian blob of the initial data; NaN center coordinates mean the
// box middle.
struct GaussianSpec {
  double mass = 1.0;
  double sigma = 1.0;
  double center_x = std::numeric_limits<double>::quiet_NaN();
  double center_y = std::numeric_limits<double>::quiet_NaN();
};

inline Field build_initial(const Grid& grid,
                           const std::vector<GaussianSpec>& specs) {
  if (specs.empty())
    throw invalid_argument("initial data needs at least one blob");
  Field out{grid, rvec(grid.size(), 0.0)};
  for (const GaussianSpec& s : specs) {
    const double cx = std::isnan(s.center_x) ? grid.center() : s.center_x;
    const double cy = std::isnan(s.center_y) ? grid.center() : s.center_y;
    const Field blob = gaussian(grid, s.mass, cx, cy, s.sigma);
    for (std::size_t i = 0; i < grid.size(); ++i)
      out.values[i] += blob.values[i];
  }
  return out;
}

inline Field lin_comb(double a, const Field& f, double b, const Field& g) {
    if (!(f.grid == g.grid))
        throw invalid_argument("lin_comb: fields live on different grids");
    Field out(f.grid);
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = a * f.values[i] + b * g.values[i];
    return out;
}

inline Field scale(const Field& f, double a) {
    Field out = f;
    for (double& v : out.values) v *= a;
    return out;
}

/// Fraction of |f|'s mass lying within box_size/8 of the box boundary.
/// The free-space operators require this to stay below the containment
/// tolerance declared alongside them.
inline double boundary_band_fraction(const Field& f) {
    const Grid& g = f.grid;
    const double band = g.box_size / 8.0;
    const double lo = band, hi = g.box_size - band;
    double total = 0.0, edge = 0.0;
    for (int iy = 0; iy < g.n; ++iy) {
        const double y = g.coord[iy];
        const bool y_edge = (y < lo || y >= hi);
        for (int ix = 0; ix < g.n; ++ix) {
            const double a = std::abs(f.values[std::size_t(iy) * g.n + ix]);
            total += a;
            if (y_edge || g.coord[ix] < lo || g.coord[ix] >= hi) edge += a;
        }
    }
    return total > 0.0 ? edge / total : 0.0;
}

}  // namespace chemflow
