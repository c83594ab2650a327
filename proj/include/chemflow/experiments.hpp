#pragma once

// Scenario drivers that turn qualitative claims into measured numbers:
// parameter sweeps with power-law fits, the comparison-principle co-run,
// diffusive decay-rate fits, and the interpolation-inequality verifier.
// Unknown constants are never asserted here; drivers measure and report,
// callers assert signs, floors, exponent windows, and uniform-prefactor
// existence.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "chemflow/diagnostics.hpp"
#include "chemflow/dynamics.hpp"
#include "chemflow/errors.hpp"
#include "chemflow/field.hpp"
#include "chemflow/flows.hpp"
#include "chemflow/grid.hpp"
#include "chemflow/spectral.hpp"
#include "chemflow/types.hpp"

namespace chemflow {

struct PowerLawFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double rms_residual = 0.0;  // in log space
  int count = 0;
};

// Least squares on (log x, log y).
inline PowerLawFit fit_power_law(const std::vector<double>& xs,
                                 const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 3)
    throw invalid_argument("fit_power_law needs >= 3 matching points");
  const int n = static_cast<int>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
      throw invalid_argument("fit_power_law needs positive data");
    const double lx = std::log(xs[i]), ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  // Relative test: identical xs leave only cancellation noise in denom.
  const double denom = n * sxx - sx * sx;
  const double denom_scale = n * sxx + sx * sx;
  if (!(std::abs(denom) > 1e-12 * denom_scale))
    throw invalid_argument("fit_power_law: degenerate xs");
  PowerLawFit fit;
  fit.count = n;
  fit.exponent = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - fit.exponent * sx) / n;
  fit.prefactor = std::exp(intercept);
  double ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r =
        std::log(ys[i]) - (intercept + fit.exponent * std::log(xs[i]));
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / n);
  return fit;
}

// A complete single-species scenario: grid, model, initial blobs, horizon.
struct ScenarioConfig {
  Grid grid;
  ModelParams model;
  std::vector<GaussianSpec> initial{GaussianSpec{}};
  double t_end = 1.0;
  double record_every = 0.01;
};

inline RunResult run_scenario(const ScenarioConfig& config) {
  State st{0.0, build_initial(config.grid, config.initial)};
  return run(st, config.model, config.t_end, config.record_every);
}

struct SweepPoint {
  double parameter = 0.0;
  double m_end = 0.0;
  double deficit = 0.0;
  bool early_stopped = false;
  BoundsReport bounds;
  std::vector<DiagnosticsRecord> records;
};

struct EpsilonSweep {
  std::vector<SweepPoint> points;
  PowerLawFit fit;  // deficit vs eps
  double min_steady_mass = 0.0;
};

// Mass-deficit response to the reaction amplitude at chi = 0: the deficit
// m0(0) - m0(end) measured at a common horizon is expected linear in eps.
inline EpsilonSweep epsilon_linearity(const ScenarioConfig& base,
                                      const std::vector<double>& eps_list) {
  if (base.model.chi != 0.0)
    throw invalid_argument("epsilon_linearity requires chi = 0");
  if (eps_list.size() < 3)
    throw invalid_argument("epsilon_linearity needs >= 3 eps values");
  EpsilonSweep sweep;
  sweep.min_steady_mass = std::numeric_limits<double>::infinity();
  std::vector<double> xs, ys;
  for (double eps : eps_list) {
    if (!(eps > 0.0))
      throw invalid_argument("epsilon_linearity: eps values must be > 0");
    ScenarioConfig config = base;
    config.model.eps = eps;
    RunResult result = run_scenario(config);
    const DiagnosticsRecord& first = result.records.front();
    const DiagnosticsRecord& last = result.records.back();
    SweepPoint point;
    point.parameter = eps;
    point.m_end = last.m0;
    point.deficit = first.m0 - last.m0;
    point.early_stopped = result.early_stopped;
    point.bounds = check_bounds(
        result.records, config.model.q, config.model.chi, eps,
        config.model.flow.kind == FlowKind::zero,
        InitialStats{first.m0, first.m2, first.lpinf});
    point.records = std::move(result.records);
    sweep.min_steady_mass = std::min(sweep.min_steady_mass, point.m_end);
    xs.push_back(eps);
    ys.push_back(point.deficit);
    sweep.points.push_back(std::move(point));
  }
  sweep.fit = fit_power_law(xs, ys);
  return sweep;
}

struct ChiSweep {
  std::vector<SweepPoint> points;
  PowerLawFit fit;  // m_end vs chi
  double worst_mass_bound_margin = std::numeric_limits<double>::infinity();
  bool all_bounds_pass = true;
};

// Steady-mass scaling in the attraction strength at u = 0.  The initial
// peak must sit below the reaction plateau of the smallest chi (the
// small-initial-data hypothesis of the lower-bound statement).
inline ChiSweep chi_scaling(const ScenarioConfig& base,
                            const std::vector<double>& chi_list) {
  if (base.model.flow.kind != FlowKind::zero &&
      base.model.flow.amplitude > 0.0)
    throw invalid_argument("chi_scaling requires u = 0");
  if (chi_list.size() < 3)
    throw invalid_argument("chi_scaling needs >= 3 chi values");
  const double chi_min = *std::min_element(chi_list.begin(), chi_list.end());
  if (!(chi_min > 0.0))
    throw invalid_argument("chi_scaling: chi values must be > 0");
  {
    const Field rho0 = build_initial(base.grid, base.initial);
    const double peak0 =
        lp_norm(rho0, std::numeric_limits<double>::infinity());
    const double plateau =
        std::pow(chi_min / base.model.eps, 1.0 / (base.model.q - 2.0));
    if (peak0 > plateau)
      throw invalid_argument(
          "chi_scaling: initial peak exceeds the smallest-chi plateau");
  }
  ChiSweep sweep;
  std::vector<double> xs, ys;
  for (double chi : chi_list) {
    ScenarioConfig config = base;
    config.model.chi = chi;
    RunResult result = run_scenario(config);
    const DiagnosticsRecord& first = result.records.front();
    const DiagnosticsRecord& last = result.records.back();
    SweepPoint point;
    point.parameter = chi;
    point.m_end = last.m0;
    point.deficit = first.m0 - last.m0;
    point.early_stopped = result.early_stopped;
    point.bounds =
        check_bounds(result.records, config.model.q, chi, config.model.eps,
                     true, InitialStats{first.m0, first.m2, first.lpinf});
    point.records = std::move(result.records);
    const BoundCheck& mass_bound = point.bounds.find("mass_bound");
    sweep.worst_mass_bound_margin =
        std::min(sweep.worst_mass_bound_margin, mass_bound.worst_margin);
    sweep.all_bounds_pass = sweep.all_bounds_pass && point.bounds.all_pass();
    xs.push_back(chi);
    ys.push_back(point.m_end);
    sweep.points.push_back(std::move(point));
  }
  sweep.fit = fit_power_law(xs, ys);
  return sweep;
}

struct FlowChiSample {
  double chi = 0.0;
  double tau = 0.0;
  double m0 = 0.0;
};

struct FlowChiReport {
  std::vector<FlowChiSample> samples;
  PowerLawFit fit;            // m0 vs chi*tau
  double cover_prefactor = 0.0;  // max m0 sqrt(chi tau): minimal uniform C
  // Spread of m0*sqrt(chi tau) across all samples: how far apart the
  // tightest and loosest samples sit around a single C (chi tau)^{-1/2}
  // envelope.  1 means perfect collapse onto one curve.
  double collapse_max_ratio = 1.0;
  std::vector<double> run_chis;      // chi of each executed run
  std::vector<std::vector<DiagnosticsRecord>> run_records;  // one per run
  std::vector<BoundsReport> bounds;  // one per chi run
  bool all_bounds_pass = true;
};

// Mass decay under a stirring flow, sampled on tau grids clipped at
// chi^{1/3} (the window where the (chi tau)^{-1/2} bound applies).
inline FlowChiReport flow_chi_scaling(const ScenarioConfig& base,
                                      const std::vector<double>& chi_list,
                                      const std::vector<double>& tau_grid) {
  if (base.model.flow.kind != FlowKind::cellular ||
      !(base.model.flow.amplitude > 0.0))
    throw invalid_argument("flow_chi_scaling requires a cellular flow");
  FlowChiReport report;
  std::vector<double> xs, ys;
  for (double chi : chi_list) {
    if (!(chi > 0.0))
      throw invalid_argument("flow_chi_scaling: chi values must be > 0");
    std::vector<double> taus;
    const double tau_cap = std::cbrt(chi);
    for (double tau : tau_grid)
      if (tau > 0.0 && tau <= tau_cap + 1e-12) taus.push_back(tau);
    if (taus.empty()) continue;
    const double horizon = *std::max_element(taus.begin(), taus.end());

    ScenarioConfig config = base;
    config.model.chi = chi;
    config.t_end = horizon;
    RunResult result = run_scenario(config);
    const DiagnosticsRecord& first = result.records.front();
    for (double tau : taus) {
      const DiagnosticsRecord* at = nullptr;
      for (const DiagnosticsRecord& r : result.records)
        if (std::abs(r.t - tau) < 1e-9) at = &r;
      if (at == nullptr)
        throw invalid_argument(
            "flow_chi_scaling: record cadence misses a tau sample");
      report.samples.push_back(FlowChiSample{chi, tau, at->m0});
      xs.push_back(chi * tau);
      ys.push_back(at->m0);
    }
    BoundsReport bounds =
        check_bounds(result.records, config.model.q, chi, config.model.eps,
                     false, InitialStats{first.m0, first.m2, first.lpinf});
    report.all_bounds_pass = report.all_bounds_pass && bounds.all_pass();
    report.bounds.push_back(std::move(bounds));
    report.run_chis.push_back(chi);
    report.run_records.push_back(std::move(result.records));
  }
  if (xs.size() < 3)
    throw invalid_argument("flow_chi_scaling: fewer than 3 samples survived");
  report.fit = fit_power_law(xs, ys);
  double cover_floor = std::numeric_limits<double>::infinity();
  for (const FlowChiSample& s : report.samples) {
    const double scaled = s.m0 * std::sqrt(s.chi * s.tau);
    report.cover_prefactor = std::max(report.cover_prefactor, scaled);
    cover_floor = std::min(cover_floor, scaled);
  }
  report.collapse_max_ratio = report.cover_prefactor / cover_floor;
  return report;
}

struct DecaySample {
  double t = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
};

struct DecayReport {
  std::vector<DecaySample> samples;  // within [t_lo, t_hi]
  std::optional<PowerLawFit> fit_l2;    // only fitted for u = 0
  std::optional<PowerLawFit> fit_linf;  // only fitted for u = 0
  std::vector<DiagnosticsRecord> records;  // the whole run
};

// Diffusive decay rates of a passive scalar (chi = eps = 0): exact power
// laws without flow, flow-independent upper bounds with one.
inline DecayReport diffusion_decay(const ScenarioConfig& config, double t_lo,
                                   double t_hi) {
  if (config.model.chi != 0.0 || config.model.eps != 0.0)
    throw invalid_argument("diffusion_decay requires chi = eps = 0");
  if (!(t_lo > 0.0) || !(t_hi > t_lo))
    throw invalid_argument("diffusion_decay needs 0 < t_lo < t_hi");
  ScenarioConfig c = config;
  c.t_end = t_hi;
  RunResult result = run_scenario(c);
  DecayReport report;
  std::vector<double> ts, l2s, linfs;
  for (const DiagnosticsRecord& r : result.records) {
    if (r.t < t_lo - 1e-12 || r.t > t_hi + 1e-12) continue;
    report.samples.push_back(DecaySample{r.t, r.lp2, r.lpinf});
    ts.push_back(r.t);
    l2s.push_back(r.lp2);
    linfs.push_back(r.lpinf);
  }
  if (report.samples.size() < 3)
    throw invalid_argument("diffusion_decay: window holds fewer than 3 records");
  const bool no_flow = config.model.flow.kind == FlowKind::zero ||
                       config.model.flow.amplitude == 0.0;
  if (no_flow) {
    report.fit_l2 = fit_power_law(ts, l2s);
    report.fit_linf = fit_power_law(ts, linfs);
  }
  report.records = std::move(result.records);
  return report;
}

struct ComparisonReport {
  double worst_margin = -std::numeric_limits<double>::infinity();
  double t_worst = 0.0;
  double x_worst = 0.0;
  double y_worst = 0.0;
  double linf_b0 = 0.0;
};

// Co-run the reacting density rho against the reaction-free majorant b
// from the same initial data, sharing the adaptive dt sequence, and return
// the worst pointwise rho - b over all recorded times (positive means the
// ordering was violated).
inline ComparisonReport comparison_check(const ScenarioConfig& config) {
  if (config.model.chi != 0.0)
    throw invalid_argument("comparison_check requires chi = 0");
  validate(config.model);
  ModelParams b_params = config.model;
  b_params.eps = 0.0;

  State rho{0.0, build_initial(config.grid, config.initial)};
  State b = rho;
  ComparisonReport report;
  report.linf_b0 = lp_norm(b.rho, std::numeric_limits<double>::infinity());

  const Grid& g = config.grid;
  auto scan = [&](const State& r_st, const State& b_st) {
    for (int iy = 0; iy < g.n; ++iy)
      for (int ix = 0; ix < g.n; ++ix) {
        const double margin = r_st.rho(ix, iy) - b_st.rho(ix, iy);
        if (margin > report.worst_margin) {
          report.worst_margin = margin;
          report.t_worst = r_st.t;
          report.x_worst = g.coord[ix];
          report.y_worst = g.coord[iy];
        }
      }
  };
  scan(rho, b);

  double next_record = config.record_every;
  while (rho.t < config.t_end - 1e-12) {
    double dt = stable_dt(rho, config.model);
    if (next_record - rho.t > 1e-13) dt = std::min(dt, next_record - rho.t);
    dt = std::min(dt, config.t_end - rho.t);
    rho = step(rho, config.model, dt);
    b = step(b, b_params, dt);
    const double peak = max_value(rho.rho);
    if (min_value(rho.rho) < -negativity_tolerance * peak)
      throw resolution_error("negative density beyond the under-resolution tolerance; aborting instead of clipping", rho.t);
    if (rho.t >= next_record - 1e-12) {
      scan(rho, b);
      next_record += config.record_every;
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Interpolation-inequality verifier: ||v||_q <= C ||grad v||_2^a ||v||_r^{1-a}
// with a = (1/r - 1/q) / (1/d - 1/2 + 1/r), d = 2.  r may lie in (0, 1)
// (quasi-norm), which the use sites require.
// ---------------------------------------------------------------------------

struct GNCase {
  int d = 2;
  double q = 2.0;
  double r = 1.0;
  double a = 0.5;
};

inline GNCase make_gn_case(double q, double r) {
  if (!(q > r) || !(r > 0.0))
    throw invalid_argument("gn case requires q > r > 0");
  const double d = 2.0;
  const double denom = 1.0 / d - 0.5 + 1.0 / r;
  if (!(denom > 0.0))
    throw invalid_argument("gn case requires 1/d - 1/2 + 1/r > 0");
  const double a = (1.0 / r - 1.0 / q) / denom;
  if (!(a > 0.0) || a > 1.0 + 1e-12)
    throw invalid_argument("gn case: interpolation exponent outside (0, 1]");
  return GNCase{2, q, r, std::min(a, 1.0)};
}

// (dx^2 sum |f|^p)^{1/p} for any p > 0 (quasi-norms allowed, unlike
// lp_norm which enforces p >= 1).
inline double gn_pnorm(const Field& f, double p) {
  if (!(p > 0.0)) throw invalid_argument("gn_pnorm requires p > 0");
  rvec powed(f.values.size());
  for (std::size_t i = 0; i < f.values.size(); ++i)
    powed[i] = std::pow(std::abs(f.values[i]), p);
  const double s = f.grid.cell_area() * kahan_sum(powed.data(), powed.size());
  return std::pow(s, 1.0 / p);
}

inline double gn_ratio(const Field& v, const GNCase& cse) {
  const double vq = gn_pnorm(v, cse.q);
  if (!(vq > 0.0)) throw invalid_argument("gn_ratio: field is zero");
  const VectorField grad = gradient(v);
  rvec g2(v.values.size());
  for (std::size_t i = 0; i < g2.size(); ++i)
    g2[i] = grad.x_values[i] * grad.x_values[i] +
            grad.y_values[i] * grad.y_values[i];
  const double grad2 =
      std::sqrt(v.grid.cell_area() * kahan_sum(g2.data(), g2.size()));
  const double vr = gn_pnorm(v, cse.r);
  return vq / (std::pow(grad2, cse.a) * std::pow(vr, 1.0 - cse.a));
}

// Analytic family member: parameters are scale-free (relative to the box),
// so the member can be resampled exactly on a dilated grid.
struct GNMember {
  int kind = 0;  // 0 gaussian, 1 mixture, 2 modulated bump
  int pieces = 1;
  double amp[4] = {1, 0, 0, 0};
  double sx[4] = {0.05, 0, 0, 0};     // sigma / box_size
  double cx[4] = {0.5, 0, 0, 0};      // center / box_size
  double cy[4] = {0.5, 0, 0, 0};
  double wave = 0.0;                  // oscillations per envelope width
  double phase_x = 0.0, phase_y = 0.0;

  double eval(double x, double y, double box) const {
    double v = 0.0;
    for (int p = 0; p < pieces; ++p) {
      const double s = sx[p] * box;
      const double dx = x - cx[p] * box, dy = y - cy[p] * box;
      double g = amp[p] * std::exp(-(dx * dx + dy * dy) / (2.0 * s * s));
      if (kind == 2)
        g *= std::cos(wave * dx / s + phase_x) *
             std::cos(wave * dy / s + phase_y);
      v += g;
    }
    return v;
  }
};

inline Field sample_member(const GNMember& m, const Grid& g) {
  Field f{g, rvec(g.size())};
  for (int iy = 0; iy < g.n; ++iy)
    for (int ix = 0; ix < g.n; ++ix)
      f.values[static_cast<std::size_t>(iy) * g.n + ix] =
          m.eval(g.coord[ix], g.coord[iy], g.box_size);
  return f;
}

namespace detail {

// Uniform doubles with explicit bit manipulation so the stream is pinned
// by the mt19937_64 standard, independent of distribution implementations.
struct GNRng {
  std::mt19937_64 engine;
  explicit GNRng(std::uint64_t seed) : engine(seed) {}
  double uniform() {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

// Fixed draw count per member keeps the stream aligned across kinds.
inline GNMember draw_member(GNRng& rng, int index) {
  double draw[20];
  for (double& d : draw) d = rng.uniform();
  GNMember m;
  m.kind = index % 3;
  auto in = [&](int i, double lo, double hi) {
    return lo + (hi - lo) * draw[i];
  };
  if (m.kind == 0) {
    m.pieces = 1;
    m.amp[0] = in(0, 0.5, 2.5);
    m.sx[0] = in(1, 0.025, 0.06);
    m.cx[0] = in(2, 0.42, 0.58);
    m.cy[0] = in(3, 0.42, 0.58);
  } else if (m.kind == 1) {
    m.pieces = 2 + static_cast<int>(draw[0] * 3.0);  // 2..4
    for (int p = 0; p < m.pieces; ++p) {
      m.amp[p] = in(1 + 4 * p, 0.3, 2.0);
      m.sx[p] = in(2 + 4 * p, 0.02, 0.05);
      m.cx[p] = in(3 + 4 * p, 0.38, 0.62);
      m.cy[p] = in(4 + 4 * p, 0.38, 0.62);
    }
  } else {
    m.pieces = 1;
    m.amp[0] = in(0, 0.5, 2.5);
    m.sx[0] = in(1, 0.04, 0.06);
    m.cx[0] = in(2, 0.45, 0.55);
    m.cy[0] = in(3, 0.45, 0.55);
    m.wave = in(4, 1.0, 3.0);
    m.phase_x = in(5, 0.0, 2.0 * std::numbers::pi);
    m.phase_y = in(6, 0.0, 2.0 * std::numbers::pi);
  }
  return m;
}

}  // namespace detail

struct GNCaseResult {
  GNCase gn_case;
  double max_ratio = 0.0;
  int argmax_member = -1;
  double worst_amplitude_change = 0.0;  // relative, target <= 1e-12
  double worst_dilation_change = 0.0;   // relative, target < 1e-2
};

struct GNReport {
  std::uint64_t seed = 0;
  int family_size = 0;
  std::vector<GNCaseResult> cases;
};

// Randomized-family survey: empirical lower estimates of the inequality
// constants plus the two forced invariances (amplitude, dilation).
inline GNReport gn_suite(std::uint64_t seed, const std::vector<GNCase>& cases,
                         int family_size, const Grid& grid,
                         bool invariance_checks = true) {
  if (family_size < 1) throw invalid_argument("gn_suite: empty family");
  GNReport report;
  report.seed = seed;
  report.family_size = family_size;

  detail::GNRng rng(seed);
  std::vector<GNMember> family;
  family.reserve(family_size);
  for (int i = 0; i < family_size; ++i)
    family.push_back(detail::draw_member(rng, i));

  const Grid half = make_grid(grid.n, grid.box_size * 2.0);  // v(x/2)
  const Grid twice = make_grid(grid.n, grid.box_size * 0.5);  // v(2x)

  for (const GNCase& cse : cases) {
    GNCaseResult result;
    result.gn_case = cse;
    for (int i = 0; i < family_size; ++i) {
      const Field v = sample_member(family[i], grid);
      const double ratio = gn_ratio(v, cse);
      if (ratio > result.max_ratio) {
        result.max_ratio = ratio;
        result.argmax_member = i;
      }
      if (!invariance_checks) continue;
      const double scaled = gn_ratio(scale(v, 5.0), cse);
      result.worst_amplitude_change =
          std::max(result.worst_amplitude_change,
                   std::abs(scaled - ratio) / ratio);
      for (const Grid* dg : {&half, &twice}) {
        const double dilated = gn_ratio(sample_member(family[i], *dg), cse);
        result.worst_dilation_change =
            std::max(result.worst_dilation_change,
                     std::abs(dilated - ratio) / ratio);
      }
    }
    report.cases.push_back(result);
  }
  return report;
}

}  // namespace chemflow
