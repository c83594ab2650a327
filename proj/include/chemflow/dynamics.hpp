#pragma once

// Time integration: integrating-factor Heun (exact diffusion semigroup on
// the transformed variable, explicit two-stage handling of advection,
// attraction, and reaction), with adaptive step control and loud failure
// monitors.  No positivity clipping anywhere: clipping would silently
// inject mass and corrupt the identity residuals, so under-resolution must
// surface as an abort instead.

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "chemflow/diagnostics.hpp"
#include "chemflow/errors.hpp"
#include "chemflow/field.hpp"
#include "chemflow/flows.hpp"
#include "chemflow/grid.hpp"
#include "chemflow/poisson.hpp"
#include "chemflow/spectral.hpp"
#include "chemflow/types.hpp"

namespace chemflow {

struct ModelParams {
  double chi = 0.0;  // attraction strength
  double eps = 1.0;  // reaction amplitude
  int q = 3;         // reaction exponent, integer >= 3
  double kappa = 1.0;
  FlowSpec flow;
  double dt_max = 1e-2;
};

inline void validate(const ModelParams& p) {
  if (p.chi < 0.0) throw invalid_argument("chi must be >= 0");
  if (p.eps < 0.0) throw invalid_argument("eps must be >= 0");
  if (p.q < 3) throw invalid_argument("q must be an integer >= 3");
  if (!(p.kappa > 0.0)) throw invalid_argument("kappa must be > 0");
  if (!(p.dt_max > 0.0)) throw invalid_argument("dt_max must be > 0");
  validate(p.flow);
}

struct SystemParams {
  double eps = 1.0;
  int q = 4;  // even integer >= 4, so (s e)^{q/2} is a polynomial
  double kappa1 = 1.0;
  double kappa2 = 1.0;
  FlowSpec flow;
  double dt_max = 1e-2;
};

inline void validate(const SystemParams& p) {
  if (p.eps < 0.0) throw invalid_argument("eps must be >= 0");
  if (p.q < 4 || p.q % 2 != 0)
    throw invalid_argument("system q must be an even integer >= 4");
  if (!(p.kappa1 > 0.0) || !(p.kappa2 > 0.0))
    throw invalid_argument("kappa1, kappa2 must be > 0");
  if (!(p.dt_max > 0.0)) throw invalid_argument("dt_max must be > 0");
  validate(p.flow);
}

struct State {
  double t = 0.0;
  Field rho;
};

struct SystemState {
  double t = 0.0;
  Field s;
  Field e;
};

namespace detail {

inline Field dealias_field(const Field& f) {
  cvec spec = forward(f);
  dealias_inplace(f.grid, spec);
  return inverse(f.grid, std::move(spec));
}

}  // namespace detail

// Right-hand side without the diffusion term (the integrating factor owns
// it): -u.grad(rho) + chi*(grad(rho).v + rho^2) - eps*rho^q, where
// v = grad(inv_laplacian(rho)) and the attraction divergence is expanded
// via laplacian(inv_laplacian(rho)) = rho.  All fields entering pointwise
// products are 2/3-dealiased first.
inline Field explicit_rhs(const State& state, const ModelParams& params) {
  const Grid& g = state.rho.grid;
  const cvec full_spec = forward(state.rho);
  cvec cut_spec = full_spec;
  dealias_inplace(g, cut_spec);
  const VectorField grad_rho = gradient_of_spectrum(g, cut_spec);
  const Field rho_d = inverse(g, std::move(cut_spec));

  Field out{g, rvec(g.size(), 0.0)};

  if (params.chi > 0.0) {
    VectorField v = grad_inv_laplacian(state.rho, full_spec, state.t);
    const Field vx = detail::dealias_field(Field{g, std::move(v.x_values)});
    const Field vy = detail::dealias_field(Field{g, std::move(v.y_values)});
    for (std::size_t i = 0; i < g.size(); ++i)
      out.values[i] += params.chi *
                       (grad_rho.x_values[i] * vx.values[i] +
                        grad_rho.y_values[i] * vy.values[i] +
                        rho_d.values[i] * rho_d.values[i]);
  }

  if (params.flow.kind != FlowKind::zero && params.flow.amplitude > 0.0) {
    const VectorField u = sample_flow(params.flow, g, state.t);
    for (std::size_t i = 0; i < g.size(); ++i)
      out.values[i] -= u.x_values[i] * grad_rho.x_values[i] +
                       u.y_values[i] * grad_rho.y_values[i];
  }

  if (params.eps > 0.0) {
    for (std::size_t i = 0; i < g.size(); ++i)
      out.values[i] -= params.eps * ipow(rho_d.values[i], params.q);
  }
  return out;
}

inline constexpr double cfl_constant = 0.4;
inline constexpr double reaction_constant = 0.2;

// dt = min(0.4 dx / max_speed, 0.2 / (eps max(rho)^{q-1}), dt_max) with
// max_speed = max |u| + chi * max |grad inv_laplacian rho|.
inline double stable_dt(const State& state, const ModelParams& params) {
  double speed = 0.0;
  if (params.flow.kind != FlowKind::zero && params.flow.amplitude > 0.0)
    speed += max_speed(sample_flow(params.flow, state.rho.grid, state.t));
  if (params.chi > 0.0)
    speed += params.chi * max_speed(grad_inv_laplacian(state.rho, state.t));
  const double peak = std::max(max_value(state.rho), 0.0);
  const double reaction_rate =
      params.eps * ipow(peak, params.q - 1) + 1e-30;
  return std::min({cfl_constant * state.rho.grid.dx / std::max(speed, 1e-30),
                   reaction_constant / reaction_rate, params.dt_max});
}

// One integrating-factor Heun step.  blowup_ceiling is the run-level
// density ceiling (10^3 N0); the default disables that check but still
// catches non-finite values.
inline State step(const State& state, const ModelParams& params, double dt,
                  double blowup_ceiling =
                      std::numeric_limits<double>::infinity()) {
  if (!(dt > 0.0)) throw invalid_argument("step requires dt > 0");
  const Grid& g = state.rho.grid;
  const cvec f0 = forward(state.rho);

  const Field n1 = explicit_rhs(state, params);
  const cvec n1_spec = forward(n1);

  cvec pred_spec(f0.size());
  for (std::size_t i = 0; i < f0.size(); ++i)
    pred_spec[i] = f0[i] + dt * n1_spec[i];
  heat_multiplier_inplace(g, params.kappa, dt, pred_spec);
  State predictor{state.t + dt, inverse(g, std::move(pred_spec))};

  const Field n2 = explicit_rhs(predictor, params);
  const cvec n2_spec = forward(n2);

  cvec corr_spec(f0.size());
  for (std::size_t i = 0; i < f0.size(); ++i)
    corr_spec[i] = f0[i] + 0.5 * dt * n1_spec[i];
  heat_multiplier_inplace(g, params.kappa, dt, corr_spec);
  for (std::size_t i = 0; i < f0.size(); ++i)
    corr_spec[i] += 0.5 * dt * n2_spec[i];

  State next{state.t + dt, inverse(g, std::move(corr_spec))};
  if (!all_finite(next.rho) || max_value(next.rho) > blowup_ceiling)
    throw blowup_error("numerical blow-up: density exceeded its ceiling or "
                       "became non-finite",
                       next.t);
  return next;
}

inline constexpr double negativity_tolerance = 1e-6;
inline constexpr double steady_rate_tolerance = 1e-8;
inline constexpr int steady_step_count = 100;

struct RunResult {
  std::vector<DiagnosticsRecord> records;
  State final_state;
  bool early_stopped = false;
};

namespace detail {

inline DiagnosticsRecord record_single(const State& st,
                                       const ModelParams& params, double ref_x,
                                       double ref_y) {
  std::optional<VectorField> u;
  if (params.flow.kind != FlowKind::zero && params.flow.amplitude > 0.0)
    u = sample_flow(params.flow, st.rho.grid, st.t);
  return make_record(st.t, st.rho, params.q, ref_x, ref_y,
                     u ? &*u : nullptr);
}

}  // namespace detail

// Advance to t_end with adaptive dt, recording diagnostics at the given
// cadence; stops early once |dm0/dt| stays below 1e-8 m0(0) for 100
// consecutive steps (the numerical surrogate for the t -> infinity limits).
inline RunResult run(const State& initial, const ModelParams& params,
                     double t_end, double record_every) {
  validate(params);
  if (t_end < 0.0) throw invalid_argument("t_end must be >= 0");
  if (!(record_every > 0.0))
    throw invalid_argument("record_every must be > 0");

  const SecondMoment sm0 = second_moment(initial.rho);
  const double n0 = density_ceiling(params.chi, params.eps, params.q,
                                    lp_norm(initial.rho,
                                            std::numeric_limits<double>::infinity()));
  const double blowup_ceiling = 1e3 * n0;
  const double m0_initial = integrate(initial.rho);

  RunResult result;
  result.records.push_back(
      detail::record_single(initial, params, sm0.centroid_x, sm0.centroid_y));
  State st = initial;
  double next_record = record_every;
  double m0_prev = m0_initial;
  int steady_run = 0;

  while (st.t < t_end - 1e-12) {
    double dt = stable_dt(st, params);
    if (next_record - st.t > 1e-13) dt = std::min(dt, next_record - st.t);
    dt = std::min(dt, t_end - st.t);
    st = step(st, params, dt, blowup_ceiling);

    const double peak = max_value(st.rho);
    if (min_value(st.rho) < -negativity_tolerance * peak)
      throw resolution_error("negative density beyond the under-resolution tolerance; aborting instead of clipping", st.t);

    const double m0_now = integrate(st.rho);
    if (std::abs(m0_now - m0_prev) / dt < steady_rate_tolerance * m0_initial)
      ++steady_run;
    else
      steady_run = 0;
    m0_prev = m0_now;

    if (st.t >= next_record - 1e-12) {
      result.records.push_back(
          detail::record_single(st, params, sm0.centroid_x, sm0.centroid_y));
      next_record += record_every;
    }
    if (steady_run >= steady_step_count) {
      result.early_stopped = true;
      break;
    }
  }

  if (result.records.back().t < st.t - 1e-12)
    result.records.push_back(
        detail::record_single(st, params, sm0.centroid_x, sm0.centroid_y));
  result.final_state = std::move(st);
  return result;
}

struct SystemRunResult {
  std::vector<DiagnosticsRecord> records;
  SystemState final_state;
  bool early_stopped = false;
};

namespace detail {

struct SystemRhs {
  Field s;
  Field e;
};

// -u.grad(s) - eps (s e)^{q/2} and the same for e; the shared reaction
// term is computed once from the dealiased fields.
inline SystemRhs system_rhs(const SystemState& st,
                            const SystemParams& params) {
  const Grid& g = st.s.grid;
  cvec s_spec = forward(st.s);
  dealias_inplace(g, s_spec);
  cvec e_spec = forward(st.e);
  dealias_inplace(g, e_spec);
  const VectorField grad_s = gradient_of_spectrum(g, s_spec);
  const VectorField grad_e = gradient_of_spectrum(g, e_spec);
  const Field s_d = inverse(g, std::move(s_spec));
  const Field e_d = inverse(g, std::move(e_spec));

  SystemRhs rhs{Field{g, rvec(g.size(), 0.0)}, Field{g, rvec(g.size(), 0.0)}};
  if (params.eps > 0.0) {
    const int half_q = params.q / 2;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double reaction =
          params.eps * ipow(s_d.values[i] * e_d.values[i], half_q);
      rhs.s.values[i] -= reaction;
      rhs.e.values[i] -= reaction;
    }
  }
  if (params.flow.kind != FlowKind::zero && params.flow.amplitude > 0.0) {
    const VectorField u = sample_flow(params.flow, g, st.t);
    for (std::size_t i = 0; i < g.size(); ++i) {
      rhs.s.values[i] -= u.x_values[i] * grad_s.x_values[i] +
                         u.y_values[i] * grad_s.y_values[i];
      rhs.e.values[i] -= u.x_values[i] * grad_e.x_values[i] +
                         u.y_values[i] * grad_e.y_values[i];
    }
  }
  return rhs;
}

}  // namespace detail

inline double stable_dt(const SystemState& st, const SystemParams& params) {
  double speed = 0.0;
  if (params.flow.kind != FlowKind::zero && params.flow.amplitude > 0.0)
    speed += max_speed(sample_flow(params.flow, st.s.grid, st.t));
  const double peak =
      std::max({max_value(st.s), max_value(st.e), 0.0});
  const double reaction_rate = params.eps * ipow(peak, params.q - 1) + 1e-30;
  return std::min({cfl_constant * st.s.grid.dx / std::max(speed, 1e-30),
                   reaction_constant / reaction_rate, params.dt_max});
}

inline SystemState step(const SystemState& st, const SystemParams& params,
                        double dt, double blowup_ceiling =
                                       std::numeric_limits<double>::infinity()) {
  if (!(dt > 0.0)) throw invalid_argument("step requires dt > 0");
  const Grid& g = st.s.grid;
  const cvec s0 = forward(st.s);
  const cvec e0 = forward(st.e);
  const detail::SystemRhs n1 = detail::system_rhs(st, params);
  const cvec n1s = forward(n1.s);
  const cvec n1e = forward(n1.e);

  auto propagate = [&](const cvec& f0, const cvec& nspec, double kappa,
                       double weight) {
    cvec spec(f0.size());
    for (std::size_t i = 0; i < f0.size(); ++i)
      spec[i] = f0[i] + weight * dt * nspec[i];
    heat_multiplier_inplace(g, kappa, dt, spec);
    return spec;
  };

  SystemState predictor{st.t + dt,
                        inverse(g, propagate(s0, n1s, params.kappa1, 1.0)),
                        inverse(g, propagate(e0, n1e, params.kappa2, 1.0))};
  const detail::SystemRhs n2 = detail::system_rhs(predictor, params);
  const cvec n2s = forward(n2.s);
  const cvec n2e = forward(n2.e);

  cvec s_spec = propagate(s0, n1s, params.kappa1, 0.5);
  cvec e_spec = propagate(e0, n1e, params.kappa2, 0.5);
  for (std::size_t i = 0; i < s_spec.size(); ++i) {
    s_spec[i] += 0.5 * dt * n2s[i];
    e_spec[i] += 0.5 * dt * n2e[i];
  }
  SystemState next{st.t + dt, inverse(g, std::move(s_spec)),
                   inverse(g, std::move(e_spec))};
  if (!all_finite(next.s) || !all_finite(next.e) ||
      max_value(next.s) > blowup_ceiling ||
      max_value(next.e) > blowup_ceiling)
    throw blowup_error("numerical blow-up: density exceeded its ceiling or "
                       "became non-finite",
                       next.t);
  return next;
}

namespace detail {

inline DiagnosticsRecord record_system(const SystemState& st,
                                       const SystemParams& params,
                                       double ref_x, double ref_y) {
  Field total = lin_comb(1.0, st.s, 1.0, st.e);
  std::optional<VectorField> u;
  if (params.flow.kind != FlowKind::zero && params.flow.amplitude > 0.0)
    u = sample_flow(params.flow, st.s.grid, st.t);
  DiagnosticsRecord r =
      make_record(st.t, total, params.q, ref_x, ref_y, u ? &*u : nullptr);
  r.mass_s = integrate(st.s);
  r.mass_e = integrate(st.e);
  return r;
}

}  // namespace detail

// Two-species run: same scheme per species with the shared reaction
// coupling.  Records describe the total density; per-species masses ride
// along in mass_s / mass_e.
inline SystemRunResult run_two_species(const SystemState& initial,
                                       const SystemParams& params,
                                       double t_end, double record_every) {
  validate(params);
  if (t_end < 0.0) throw invalid_argument("t_end must be >= 0");
  if (!(record_every > 0.0))
    throw invalid_argument("record_every must be > 0");
  if (min_value(initial.s) < 0.0 || min_value(initial.e) < 0.0)
    throw invalid_argument("two-species initial data must be nonnegative");
  if (!(initial.s.grid == initial.e.grid))
    throw invalid_argument("species grids must match");

  const Field total0 = lin_comb(1.0, initial.s, 1.0, initial.e);
  const SecondMoment sm0 = second_moment(total0);
  const double blowup_ceiling =
      1e3 * std::max(max_value(initial.s), max_value(initial.e));
  const double m0_initial = integrate(total0);

  SystemRunResult result;
  result.records.push_back(
      detail::record_system(initial, params, sm0.centroid_x, sm0.centroid_y));
  SystemState st = initial;
  double next_record = record_every;
  double m0_prev = m0_initial;
  int steady_run = 0;

  while (st.t < t_end - 1e-12) {
    double dt = stable_dt(st, params);
    if (next_record - st.t > 1e-13) dt = std::min(dt, next_record - st.t);
    dt = std::min(dt, t_end - st.t);
    st = step(st, params, dt, blowup_ceiling);

    const double peak = std::max(max_value(st.s), max_value(st.e));
    if (std::min(min_value(st.s), min_value(st.e)) <
        -negativity_tolerance * peak)
      throw resolution_error("negative density beyond the under-resolution tolerance; aborting instead of clipping", st.t);

    const double m0_now = integrate(st.s) + integrate(st.e);
    if (std::abs(m0_now - m0_prev) / dt < steady_rate_tolerance * m0_initial)
      ++steady_run;
    else
      steady_run = 0;
    m0_prev = m0_now;

    if (st.t >= next_record - 1e-12) {
      result.records.push_back(detail::record_system(st, params,
                                                     sm0.centroid_x,
                                                     sm0.centroid_y));
      next_record += record_every;
    }
    if (steady_run >= steady_step_count) {
      result.early_stopped = true;
      break;
    }
  }

  if (result.records.back().t < st.t - 1e-12)
    result.records.push_back(detail::record_system(st, params,
                                                   sm0.centroid_x,
                                                   sm0.centroid_y));
  result.final_state = std::move(st);
  return result;
}

}  // namespace chemflow
