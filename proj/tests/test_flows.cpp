// Prescribed flows: closed-form sampling, exact incompressibility, and the
// advertised peak speed.

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numbers>

#include "chemflow/errors.hpp"
#include "chemflow/flows.hpp"
#include "chemflow/grid.hpp"
#include "chemflow/spectral.hpp"

using namespace chemflow;
using std::numbers::pi;

TEST_CASE("flow specs are validated and named") {
  FlowSpec bad;
  bad.amplitude = -1.0;
  CHECK_THROWS_AS(validate(bad), invalid_argument);
  bad = FlowSpec{};
  bad.cells = 0;
  CHECK_THROWS_AS(validate(bad), invalid_argument);
  bad = FlowSpec{};
  bad.time_frequency = -0.5;
  CHECK_THROWS_AS(validate(bad), invalid_argument);

  CHECK(flow_kind_from_string("cellular") == FlowKind::cellular);
  CHECK(flow_kind_from_string(to_string(FlowKind::shear)) == FlowKind::shear);
  CHECK_THROWS_AS(flow_kind_from_string("vortex"), invalid_argument);
}

TEST_CASE("zero flow is identically zero") {
  const Grid g = make_grid(32, 10.0);
  const VectorField u = sample_flow(FlowSpec{}, g, 1.7);
  for (double v : u.x_values) CHECK(v == 0.0);
  for (double v : u.y_values) CHECK(v == 0.0);
  CHECK(max_speed(u) == 0.0);
}

TEST_CASE("cellular flow matches its stream-function formula") {
  const Grid g = make_grid(64, 20.0);
  FlowSpec spec;
  spec.kind = FlowKind::cellular;
  spec.amplitude = 1.5;
  spec.cells = 2;
  const VectorField u = sample_flow(spec, g, 0.0);

  const double c = 2.0 * pi * spec.cells / g.box_size;
  double worst = 0.0;
  for (int iy = 0; iy < g.n; ++iy)
    for (int ix = 0; ix < g.n; ++ix) {
      const std::size_t i = std::size_t(iy) * g.n + ix;
      const double x = g.coord[ix], y = g.coord[iy];
      worst = std::max(
          worst, std::abs(u.x_values[i] +
                          spec.amplitude * std::sin(c * x) * std::cos(c * y)));
      worst = std::max(
          worst, std::abs(u.y_values[i] -
                          spec.amplitude * std::cos(c * x) * std::sin(c * y)));
    }
  CHECK(worst == 0.0);  // same formula, same evaluation order

  // Peak speed A is attained on the grid when n is a multiple of 4*cells.
  CHECK(max_speed(u) == Catch::Approx(spec.amplitude).epsilon(1e-14));

  // Stream-function construction: divergence vanishes to roundoff.
  const Field div = divergence(u);
  CHECK(max_value(div) < 1e-10);
  CHECK(min_value(div) > -1e-10);
}

TEST_CASE("cellular flow oscillates as cos(omega t)") {
  const Grid g = make_grid(32, 10.0);
  FlowSpec steady;
  steady.kind = FlowKind::cellular;
  steady.amplitude = 2.0;
  steady.cells = 1;
  FlowSpec pulsed = steady;
  pulsed.time_frequency = 3.0;

  const VectorField u0 = sample_flow(steady, g, 5.0);  // steady: t ignored
  const VectorField ut = sample_flow(pulsed, g, 0.4);
  const double factor = std::cos(pulsed.time_frequency * 0.4);
  double worst = 0.0;
  for (std::size_t i = 0; i < u0.x_values.size(); ++i) {
    worst = std::max(worst, std::abs(ut.x_values[i] - factor * u0.x_values[i]));
    worst = std::max(worst, std::abs(ut.y_values[i] - factor * u0.y_values[i]));
  }
  CHECK(worst < 1e-14);
}

TEST_CASE("shear flow is horizontal, steady, and sinusoidal in y") {
  const Grid g = make_grid(64, 16.0);
  FlowSpec spec;
  spec.kind = FlowKind::shear;
  spec.amplitude = 0.8;
  const VectorField u = sample_flow(spec, g, 0.0);
  const VectorField later = sample_flow(spec, g, 9.0);

  double worst = 0.0;
  for (int iy = 0; iy < g.n; ++iy)
    for (int ix = 0; ix < g.n; ++ix) {
      const std::size_t i = std::size_t(iy) * g.n + ix;
      const double expect =
          spec.amplitude * std::sin(2.0 * pi * g.coord[iy] / g.box_size);
      worst = std::max(worst, std::abs(u.x_values[i] - expect));
      CHECK(u.y_values[i] == 0.0);
      CHECK(later.x_values[i] == u.x_values[i]);  // steady
    }
  CHECK(worst == 0.0);
  CHECK(max_speed(u) == Catch::Approx(spec.amplitude).epsilon(1e-14));

  const Field div = divergence(u);
  CHECK(max_value(div) < 1e-12);
  CHECK(min_value(div) > -1e-12);
}
