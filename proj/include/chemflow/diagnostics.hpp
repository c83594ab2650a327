#pragma once

// Norms, moments, and discrete residuals of the exact identities and
// explicit bounds the solver is expected to honor along a trajectory.
//
// Conventions that matter here:
//  - The attraction kernel is the true plane inverse-Laplacian gradient
//    K = x / (2*pi*|x|^2).  With that kernel the second-moment identity is
//        d m2/dt = -2 INT (x-x0)·u rho + 4 m0 - (chi/(2*pi)) m0^2
//                  - eps INT |x-x0|^2 rho^q
//    and the q-norm identity keeps its literal coefficients
//        d/dt INT rho^q = -(4(q-1)/q) INT |grad rho^{q/2}|^2
//                         + chi (q-1) INT rho^{q+1} - q eps INT rho^{2q-1}
//    (div grad inv_laplacian rho = rho exactly, so no 2*pi enters there).
//  - The mass-bound formula (eq42_bound) is kept in its literal shape; call
//    sites that use this kernel pass chi/(2*pi) for its first argument.
//  - m2 is reported about the evolving centroid, but identity and bound
//    checks use the moment about a fixed reference point (the initial
//    centroid), since the identities hold for any time-independent x0 and
//    the bound's m2 is an initial-data quantity.

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "chemflow/errors.hpp"
#include "chemflow/field.hpp"
#include "chemflow/grid.hpp"
#include "chemflow/spectral.hpp"
#include "chemflow/types.hpp"

namespace chemflow {

inline double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

// (dx^2 sum |f|^p)^{1/p}; max|f| for p = infinity.
inline double lp_norm(const Field& f, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
  }
  if (!(p >= 1.0)) throw invalid_argument("lp_norm requires p >= 1");
  rvec powed(f.values.size());
  const bool integral_p = (p == std::floor(p)) && p < 64.0;
  const int ip = static_cast<int>(p);
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const double a = std::abs(f.values[i]);
    powed[i] = integral_p ? ipow(a, ip) : std::pow(a, p);
  }
  const double s = f.grid.cell_area() * kahan_sum(powed.data(), powed.size());
  return std::pow(s, 1.0 / p);
}

struct SecondMoment {
  double m2;
  double centroid_x;
  double centroid_y;
};

inline double second_moment_about(const Field& f, double x0, double y0) {
  const Grid& g = f.grid;
  rvec terms(f.values.size());
  for (int iy = 0; iy < g.n; ++iy) {
    const double dy = g.coord[iy] - y0;
    for (int ix = 0; ix < g.n; ++ix) {
      const double dx = g.coord[ix] - x0;
      terms[static_cast<std::size_t>(iy) * g.n + ix] =
          (dx * dx + dy * dy) * f(ix, iy);
    }
  }
  return g.cell_area() * kahan_sum(terms.data(), terms.size());
}

// Centroid is the exact minimizer of INT |x - x0|^2 f over x0.
inline SecondMoment second_moment(const Field& f) {
  const Grid& g = f.grid;
  const double mass = integrate(f);
  if (!(mass > 0.0)) throw invalid_argument("second_moment: mass must be > 0");
  rvec mx(f.values.size()), my(f.values.size());
  for (int iy = 0; iy < g.n; ++iy)
    for (int ix = 0; ix < g.n; ++ix) {
      const std::size_t i = static_cast<std::size_t>(iy) * g.n + ix;
      mx[i] = g.coord[ix] * f.values[i];
      my[i] = g.coord[iy] * f.values[i];
    }
  const double cx = g.cell_area() * kahan_sum(mx.data(), mx.size()) / mass;
  const double cy = g.cell_area() * kahan_sum(my.data(), my.size()) / mass;
  return SecondMoment{second_moment_about(f, cx, cy), cx, cy};
}

// One diagnostics snapshot.  Norm fields cover p in {1, 2, q, q+1, 2q-1,
// inf}; the trailing integrals feed identity_residuals and are taken about
// the run's fixed reference point (ref_x, ref_y).
struct DiagnosticsRecord {
  double t = 0.0;
  double m0 = 0.0;
  double m2 = 0.0;  // about the evolving centroid
  double centroid_x = 0.0;
  double centroid_y = 0.0;
  double m2_fixed = 0.0;  // about (ref_x, ref_y)
  double lp1 = 0.0, lp2 = 0.0, lpq = 0.0, lpq1 = 0.0, lp2q1 = 0.0,
         lpinf = 0.0;
  double min_val = 0.0;
  double band_fraction = 0.0;
  double int_xu_rho = 0.0;      // INT (x-x0)·u rho
  double int_x2_rhoq = 0.0;     // INT |x-x0|^2 rho^q
  double int_rhoq = 0.0;        // INT rho^q
  double int_grad_rhoq2 = 0.0;  // INT |grad rho^{q/2}|^2
  double int_rhoq1 = 0.0;       // INT rho^{q+1}
  double int_rho2q1 = 0.0;      // INT rho^{2q-1}
  double mass_s = std::numeric_limits<double>::quiet_NaN();
  double mass_e = std::numeric_limits<double>::quiet_NaN();
};

// u may be null (no flow); integrals with odd powers use signed integer
// powers, so slightly negative under-resolution noise stays finite.
inline DiagnosticsRecord make_record(double t, const Field& rho, int q,
                                     double ref_x, double ref_y,
                                     const VectorField* u) {
  const Grid& g = rho.grid;
  DiagnosticsRecord r;
  r.t = t;
  r.m0 = integrate(rho);
  const SecondMoment sm = second_moment(rho);
  r.m2 = sm.m2;
  r.centroid_x = sm.centroid_x;
  r.centroid_y = sm.centroid_y;
  r.m2_fixed = second_moment_about(rho, ref_x, ref_y);
  r.lp1 = lp_norm(rho, 1.0);
  r.lp2 = lp_norm(rho, 2.0);
  r.lpq = lp_norm(rho, q);
  r.lpq1 = lp_norm(rho, q + 1.0);
  r.lp2q1 = lp_norm(rho, 2.0 * q - 1.0);
  r.lpinf = lp_norm(rho, std::numeric_limits<double>::infinity());
  r.min_val = min_value(rho);
  r.band_fraction = boundary_band_fraction(rho);

  const std::size_t size = g.size();
  rvec t_rhoq(size), t_x2(size), t_grad(size), t_q1(size), t_2q1(size);
  const VectorField grad_rho = gradient(rho);
  for (int iy = 0; iy < g.n; ++iy) {
    const double dy = g.coord[iy] - ref_y;
    for (int ix = 0; ix < g.n; ++ix) {
      const std::size_t i = static_cast<std::size_t>(iy) * g.n + ix;
      const double dx = g.coord[ix] - ref_x;
      const double v = rho.values[i];
      const double vq = ipow(v, q);
      t_rhoq[i] = vq;
      t_x2[i] = (dx * dx + dy * dy) * vq;
      const double g2 = grad_rho.x_values[i] * grad_rho.x_values[i] +
                        grad_rho.y_values[i] * grad_rho.y_values[i];
      t_grad[i] = 0.25 * q * q * ipow(v, q - 2) * g2;
      t_q1[i] = vq * v;
      t_2q1[i] = ipow(v, 2 * q - 1);
    }
  }
  const double area = g.cell_area();
  r.int_rhoq = area * kahan_sum(t_rhoq.data(), size);
  r.int_x2_rhoq = area * kahan_sum(t_x2.data(), size);
  r.int_grad_rhoq2 = area * kahan_sum(t_grad.data(), size);
  r.int_rhoq1 = area * kahan_sum(t_q1.data(), size);
  r.int_rho2q1 = area * kahan_sum(t_2q1.data(), size);
  if (u != nullptr) {
    rvec t_xu(size);
    for (int iy = 0; iy < g.n; ++iy) {
      const double dy = g.coord[iy] - ref_y;
      for (int ix = 0; ix < g.n; ++ix) {
        const std::size_t i = static_cast<std::size_t>(iy) * g.n + ix;
        const double dx = g.coord[ix] - ref_x;
        t_xu[i] = (dx * u->x_values[i] + dy * u->y_values[i]) * rho.values[i];
      }
    }
    r.int_xu_rho = area * kahan_sum(t_xu.data(), size);
  }
  return r;
}

// Per-interval relative residuals of the three exact identities: centered
// finite difference of the recorded left side against the trapezoidal
// average of the recorded right side, normalized by |lhs| + |rhs| + floor.
struct ResidualSeries {
  std::vector<double> t_mid;
  std::vector<double> res_mass;
  std::vector<double> res_m2;
  std::vector<double> res_lq;
};

inline constexpr double residual_scale_floor = 1e-30;

inline double max_abs(const std::vector<double>& xs) {
  double m = 0.0;
  for (double x : xs) m = std::max(m, std::abs(x));
  return m;
}

inline ResidualSeries identity_residuals(
    const std::vector<DiagnosticsRecord>& records, int q, double chi,
    double eps) {
  ResidualSeries out;
  if (records.size() < 2) return out;
  const double inv_2pi = 1.0 / (2.0 * std::numbers::pi);
  for (std::size_t i = 0; i + 1 < records.size(); ++i) {
    const DiagnosticsRecord& a = records[i];
    const DiagnosticsRecord& b = records[i + 1];
    const double dt = b.t - a.t;
    if (!(dt > 0.0)) throw invalid_argument("records not strictly ordered");
    out.t_mid.push_back(0.5 * (a.t + b.t));

    auto residual = [dt](double lhs_a, double lhs_b, double rhs_a,
                         double rhs_b) {
      const double dl = (lhs_b - lhs_a) / dt;
      const double rr = 0.5 * (rhs_a + rhs_b);
      return std::abs(dl - rr) /
             (std::abs(dl) + std::abs(rr) + residual_scale_floor);
    };

    out.res_mass.push_back(residual(a.m0, b.m0, -eps * a.int_rhoq,
                                    -eps * b.int_rhoq));

    auto rhs_m2 = [chi, eps, inv_2pi](const DiagnosticsRecord& r) {
      return -2.0 * r.int_xu_rho + 4.0 * r.m0 - chi * inv_2pi * r.m0 * r.m0 -
             eps * r.int_x2_rhoq;
    };
    out.res_m2.push_back(
        residual(a.m2_fixed, b.m2_fixed, rhs_m2(a), rhs_m2(b)));

    const double cgrad = -4.0 * (q - 1.0) / q;
    auto rhs_lq = [&](const DiagnosticsRecord& r) {
      return cgrad * r.int_grad_rhoq2 + chi * (q - 1.0) * r.int_rhoq1 -
             q * eps * r.int_rho2q1;
    };
    out.res_lq.push_back(residual(a.int_rhoq, b.int_rhoq, rhs_lq(a),
                                  rhs_lq(b)));
  }
  return out;
}

// Literal mass-bound formula (2/chi)(1 + sqrt(1 + chi m2 / (4 tau))).
// With the 1/(2*pi) attraction kernel, trajectory checks pass
// chi_eff = chi / (2*pi) here.
inline double eq42_bound(double chi, double m2, double tau) {
  if (!(chi > 0.0) || !(tau > 0.0))
    throw invalid_argument("eq42_bound requires chi > 0 and tau > 0");
  return (2.0 / chi) * (1.0 + std::sqrt(1.0 + chi * m2 / (4.0 * tau)));
}

// Uniform density ceiling max((chi/eps)^{1/(q-2)}, ||rho0||_inf).
inline double density_ceiling(double chi, double eps, int q, double linf0) {
  double plateau = 0.0;
  if (chi > 0.0) {
    if (eps > 0.0)
      plateau = std::pow(chi / eps, 1.0 / (q - 2.0));
    else
      plateau = std::numeric_limits<double>::infinity();
  }
  return std::max(plateau, linf0);
}

struct BoundCheck {
  std::string name;
  bool applicable = false;
  bool pass = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  double t_worst = 0.0;
};

struct BoundsReport {
  std::vector<BoundCheck> checks;
  bool all_pass() const {
    for (const BoundCheck& c : checks)
      if (c.applicable && !c.pass) return false;
    return true;
  }
  const BoundCheck& find(const std::string& name) const {
    for (const BoundCheck& c : checks)
      if (c.name == name) return c;
    throw invalid_argument("no bound check named " + name);
  }
};

// Initial-data quantities the bound checks need (the trajectory records do
// not retain the initial field itself).
struct InitialStats {
  double m0 = 0.0;
  double m2 = 0.0;  // about the initial centroid (the minimizing choice)
  double linf = 0.0;
};

// Explicit-bound audit of a recorded trajectory:
//  - density ceiling (every run),
//  - mass bound vs eq42_bound (only drift-free runs, its hypothesis),
//  - p-norm ratio monotonicity (only chi = 0, where it is a theorem),
//  - mass monotonicity (eps >= 0),
//  - Hoelder consistency of the recorded norms (every run).
// Margins are signed (bound - observed); negative means violated.
inline BoundsReport check_bounds(const std::vector<DiagnosticsRecord>& records,
                                 int q, double chi, double eps,
                                 bool flow_is_zero,
                                 const InitialStats& rho0_stats) {
  if (records.empty()) throw invalid_argument("check_bounds: no records");
  BoundsReport report;

  BoundCheck ceiling{"density_ceiling", true, true,
                     std::numeric_limits<double>::infinity(), 0.0};
  const double n0 = density_ceiling(chi, eps, q, rho0_stats.linf);
  for (const DiagnosticsRecord& r : records) {
    const double margin = n0 * (1.0 + 1e-6) - r.lpinf;
    if (margin < ceiling.worst_margin) {
      ceiling.worst_margin = margin;
      ceiling.t_worst = r.t;
    }
  }
  ceiling.pass = ceiling.worst_margin >= 0.0;
  report.checks.push_back(ceiling);

  BoundCheck mass_bound{"mass_bound", flow_is_zero && chi > 0.0, true,
                        std::numeric_limits<double>::infinity(), 0.0};
  if (mass_bound.applicable) {
    const double chi_eff = chi / (2.0 * std::numbers::pi);
    for (const DiagnosticsRecord& r : records) {
      if (!(r.t > 0.0)) continue;
      const double bound = eq42_bound(chi_eff, rho0_stats.m2, r.t);
      const double margin = bound * (1.0 + 1e-8) - r.m0;
      if (margin < mass_bound.worst_margin) {
        mass_bound.worst_margin = margin;
        mass_bound.t_worst = r.t;
      }
    }
    mass_bound.pass = mass_bound.worst_margin >= 0.0;
  }
  report.checks.push_back(mass_bound);

  BoundCheck ratios{"ratio_monotonicity", chi == 0.0, true,
                    std::numeric_limits<double>::infinity(), 0.0};
  if (ratios.applicable) {
    for (std::size_t i = 0; i + 1 < records.size(); ++i) {
      const DiagnosticsRecord& a = records[i];
      const DiagnosticsRecord& b = records[i + 1];
      const double r2a = a.lp2 / a.lp1, r2b = b.lp2 / b.lp1;
      const double ria = a.lpinf / a.lp1, rib = b.lpinf / b.lp1;
      for (auto [prev, next] : {std::pair{r2a, r2b}, std::pair{ria, rib}}) {
        const double margin = prev * (1.0 + 1e-10) - next;
        if (margin < ratios.worst_margin) {
          ratios.worst_margin = margin;
          ratios.t_worst = b.t;
        }
      }
    }
    ratios.pass = ratios.worst_margin >= 0.0;
  }
  report.checks.push_back(ratios);

  BoundCheck mass_mono{"mass_monotone", eps >= 0.0, true,
                       std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t i = 0; i + 1 < records.size(); ++i) {
    const double slack = (eps == 0.0 ? 1e-10 : 1e-12) * records[0].m0;
    const double margin = records[i].m0 + slack - records[i + 1].m0;
    if (margin < mass_mono.worst_margin) {
      mass_mono.worst_margin = margin;
      mass_mono.t_worst = records[i + 1].t;
    }
  }
  mass_mono.pass = mass_mono.worst_margin >= 0.0;
  report.checks.push_back(mass_mono);

  BoundCheck hoelder{"hoelder_qnorm", true, true,
                     std::numeric_limits<double>::infinity(), 0.0};
  for (const DiagnosticsRecord& r : records) {
    const double lhs = ipow(r.lpq, q);
    const double rhs = ipow(r.lpinf, q - 1) * r.lp1;
    const double margin = rhs * (1.0 + 1e-10) - lhs;
    if (margin < hoelder.worst_margin) {
      hoelder.worst_margin = margin;
      hoelder.t_worst = r.t;
    }
  }
  hoelder.pass = hoelder.worst_margin >= 0.0;
  report.checks.push_back(hoelder);

  return report;
}

}  // namespace chemflow
