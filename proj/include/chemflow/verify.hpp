#pragma once

// Built-in verification harness: fifteen numbered checks covering the exact
// identities (with grid-refinement gates), the explicit bounds, the scaling
// laws, the two-species conservation structure, the interpolation-inequality
// survey, and bit-level determinism of the whole pipeline.
//
// Two effort levels share the same checks: `full` runs the pinned
// configurations (minutes), `quick` runs trimmed ones (seconds to a minute)
// so determinism can be probed by executing the quick suite twice and
// byte-comparing the output trees.  Every artifact written below is a pure
// function of the configuration and seed; no timestamps, no addresses.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "chemflow/config.hpp"
#include "chemflow/diagnostics.hpp"
#include "chemflow/dynamics.hpp"
#include "chemflow/errors.hpp"
#include "chemflow/experiments.hpp"
#include "chemflow/field.hpp"
#include "chemflow/flows.hpp"
#include "chemflow/grid.hpp"
#include "chemflow/io.hpp"

namespace chemflow {

enum class VerifyMode { quick, full };

struct CriterionResult {
  int index = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyReport {
  VerifyMode mode = VerifyMode::quick;
  std::vector<CriterionResult> criteria;
  bool all_pass() const {
    for (const CriterionResult& c : criteria)
      if (!c.pass) return false;
    return true;
  }
};

namespace detail {

inline std::optional<double> half_mass_time(
    const std::vector<DiagnosticsRecord>& records) {
  const double target = 0.5 * records.front().m0;
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].m0 <= target) {
      const double m_prev = records[i - 1].m0;
      const double m_cur = records[i].m0;
      const double w = (m_prev - target) / (m_prev - m_cur);
      return records[i - 1].t + w * (records[i].t - records[i - 1].t);
    }
  }
  return std::nullopt;
}

inline bool directories_identical(const std::filesystem::path& a,
                                  const std::filesystem::path& b,
                                  std::string* why) {
  namespace fs = std::filesystem;
  auto listing = [](const fs::path& root) {
    std::vector<std::string> rel;
    for (const auto& entry : fs::recursive_directory_iterator(root))
      if (entry.is_regular_file())
        rel.push_back(fs::relative(entry.path(), root).generic_string());
    std::sort(rel.begin(), rel.end());
    return rel;
  };
  const auto la = listing(a);
  const auto lb = listing(b);
  if (la != lb) {
    if (why) *why = "file lists differ";
    return false;
  }
  for (const std::string& r : la) {
    if (read_file((a / r).string()) != read_file((b / r).string())) {
      if (why) *why = "content differs: " + r;
      return false;
    }
  }
  return true;
}

// Two-point polyline of a fitted power law, for log-log plot overlays.
inline PlotSeries fit_line(const PowerLawFit& fit, double x_lo, double x_hi,
                           const std::string& label) {
  PlotSeries line;
  line.label = label;
  line.xs = {x_lo, x_hi};
  line.ys = {fit.prefactor * std::pow(x_lo, fit.exponent),
             fit.prefactor * std::pow(x_hi, fit.exponent)};
  return line;
}

}  // namespace detail

inline VerifyReport run_verification(VerifyMode mode,
                                     const std::string& out_dir,
                                     std::ostream* log = nullptr) {
  namespace fs = std::filesystem;
  using detail::csv_number;
  using detail::shortest_number;
  const bool quick = mode == VerifyMode::quick;
  const fs::path out(out_dir);
  for (const char* sub :
       {"identity", "sweep", "monotone", "eps", "flowchi", "decay",
        "comparison", "system", "gn", "halfmass", "determinism"})
    fs::create_directories(out / sub);

  VerifyReport report;
  report.mode = mode;
  struct CeilingEntry {
    std::string source;
    BoundCheck check;
  };
  std::vector<CeilingEntry> ceilings;

  auto now = [] { return std::chrono::steady_clock::now(); };
  auto add = [&](int index, const std::string& name, bool pass,
                 const std::string& detail,
                 std::chrono::steady_clock::time_point start) {
    const double seconds =
        std::chrono::duration<double>(now() - start).count();
    report.criteria.push_back({index, name, pass, detail, seconds});
    if (log) {
      (*log) << "criterion " << index << " (" << name << "): "
             << (pass ? "PASS" : "FAIL") << " - " << detail << " ["
             << shortest_number(std::round(seconds * 10.0) / 10.0) << " s]\n";
      log->flush();
    }
  };
  auto guarded = [&](int index, const std::string& name, auto&& body) {
    const auto start = now();
    try {
      body(start);
    } catch (const std::exception& err) {
      add(index, name, false, std::string("aborted: ") + err.what(), start);
    }
  };

  // ---- criteria 1-3: exact identities on one aggregation run -------------
  {
    ScenarioConfig coarse;
    coarse.grid = make_grid(quick ? 128 : 256, 20.0);
    coarse.model.chi = 5.0;
    coarse.model.eps = 1.0;
    coarse.model.q = 3;
    coarse.model.dt_max = 0.01;
    coarse.initial = {GaussianSpec{1.0, 1.0}};
    coarse.t_end = quick ? 0.5 : 1.0;
    // The residual estimator carries an O(record_every^2) measurement term on
    // top of the O(dt^2) integration error. Quartering the cadence while
    // halving dt shrinks the first 16x and the second 4x, so the combined
    // refinement ratio lands well above the 4x gate instead of asymptotically
    // at it.
    coarse.record_every = 0.04;
    ScenarioConfig fine = coarse;
    fine.grid = make_grid(quick ? 256 : 512, 20.0);
    fine.model.dt_max = 0.005;
    fine.record_every = 0.01;

    std::optional<RunResult> coarse_run, fine_run;
    std::optional<ResidualSeries> coarse_res, fine_res;
    const auto start_identity = now();
    try {
      coarse_run = run_scenario(coarse);
      fine_run = run_scenario(fine);
      coarse_res = identity_residuals(coarse_run->records, coarse.model.q,
                                      coarse.model.chi, coarse.model.eps);
      fine_res = identity_residuals(fine_run->records, fine.model.q,
                                    fine.model.chi, fine.model.eps);
      for (const RunResult* r : {&*coarse_run, &*fine_run}) {
        const DiagnosticsRecord& first = r->records.front();
        ceilings.push_back(
            {"identity run",
             check_bounds(r->records, coarse.model.q, coarse.model.chi,
                          coarse.model.eps, true,
                          InitialStats{first.m0, first.m2, first.lpinf})
                 .find("density_ceiling")});
      }
      write_records_csv(coarse_run->records,
                        (out / "identity" / "records.csv").string(),
                        &*coarse_res);
      write_records_csv(fine_run->records,
                        (out / "identity" / "records_fine.csv").string(),
                        &*fine_res);
      write_field(coarse_run->final_state.rho, coarse_run->final_state.t,
                  "rho", (out / "identity" / "final_rho.bmx").string());
      PlotSeries m0_series;
      m0_series.label = "m0";
      for (const DiagnosticsRecord& r : coarse_run->records) {
        m0_series.xs.push_back(r.t);
        m0_series.ys.push_back(r.m0);
      }
      emit_plot({m0_series}, PlotAxes{"t", "m0", false, false, ""},
                (out / "identity" / "m0.svg").string());
    } catch (const std::exception& err) {
      const std::string detail = std::string("aborted: ") + err.what();
      add(1, "second-moment identity", false, detail, start_identity);
      add(2, "q-norm identity", false, detail, start_identity);
      add(3, "mass identity", false, detail, start_identity);
    }
    if (coarse_res && fine_res) {
      auto gated = [&](int index, const std::string& name,
                       const std::vector<double>& coarse_series,
                       const std::vector<double>& fine_series,
                       double tolerance, bool need_refinement) {
        const double worst = max_abs(coarse_series);
        const double worst_fine = max_abs(fine_series);
        const double shrink =
            worst_fine > 0.0 ? worst / worst_fine
                             : std::numeric_limits<double>::infinity();
        bool pass = worst <= tolerance;
        std::string detail = "max residual " + shortest_number(worst) +
                             " (tol " + shortest_number(tolerance) + ")";
        if (need_refinement) {
          pass = pass && shrink >= 4.0;
          detail += ", refinement shrink " + shortest_number(shrink) +
                    "x (need >= 4x)";
        }
        add(index, name, pass, detail, start_identity);
      };
      gated(1, "second-moment identity", coarse_res->res_m2,
            fine_res->res_m2, 1e-2, true);
      gated(2, "q-norm identity", coarse_res->res_lq, fine_res->res_lq, 2e-2,
            true);
      gated(3, "mass identity", coarse_res->res_mass, fine_res->res_mass,
            1e-3, false);
    }
  }

  // ---- criteria 4 + 8: attraction-strength sweep --------------------------
  std::optional<ChiSweep> sweep;
  {
    ScenarioConfig base;
    base.grid = make_grid(quick ? 256 : 512, 16.0);
    base.model.eps = 1.0;
    base.model.q = 6;
    base.model.dt_max = 0.01;
    base.initial = {GaussianSpec{8.0, 0.96}};
    base.t_end = quick ? 0.7 : 1.4;
    base.record_every = quick ? 0.05 : 0.02;
    const std::vector<double> chi_list =
        quick ? std::vector<double>{4.0, 8.0, 16.0}
              : std::vector<double>{4.0, 8.0, 16.0, 32.0, 64.0};

    guarded(4, "explicit mass bound", [&](auto start) {
      sweep = chi_scaling(base, chi_list);
      for (const SweepPoint& point : sweep->points)
        ceilings.push_back({"chi sweep " + shortest_number(point.parameter),
                            point.bounds.find("density_ceiling")});

      std::string csv = "chi,m_end,deficit\n";
      PlotSeries data;
      data.label = "steady mass";
      for (const SweepPoint& point : sweep->points) {
        csv += csv_number(point.parameter) + "," + csv_number(point.m_end) +
               "," + csv_number(point.deficit) + "\n";
        data.xs.push_back(point.parameter);
        data.ys.push_back(point.m_end);
      }
      detail::write_file((out / "sweep" / "chi_sweep.csv").string(), csv);
      emit_plot({data, detail::fit_line(sweep->fit, data.xs.front(),
                                        data.xs.back(), "fit")},
                PlotAxes{"chi", "m_end", true, true,
                         "slope = " + shortest_number(sweep->fit.exponent)},
                (out / "sweep" / "chi_sweep.svg").string());

      bool pass = true;
      double worst_margin = std::numeric_limits<double>::infinity();
      for (const SweepPoint& point : sweep->points) {
        if (quick ? (point.parameter != 4.0 && point.parameter != 16.0)
                  : (point.parameter != 4.0 && point.parameter != 16.0 &&
                     point.parameter != 64.0))
          continue;
        const BoundCheck& check = point.bounds.find("mass_bound");
        pass = pass && check.applicable && check.pass;
        worst_margin = std::min(worst_margin, check.worst_margin);
      }
      const double spot = eq42_bound(10.0, 1.0, 1.0);
      const double spot_err = std::abs(spot - 0.57417);
      pass = pass && spot_err <= 1e-5;
      add(4, "explicit mass bound", pass,
          "worst margin " + shortest_number(worst_margin) +
              ", spot value " + shortest_number(spot) + " (expect 0.57417)",
          start);
    });

    guarded(8, "attraction-strength scaling", [&](auto start) {
      if (!sweep) throw error("sweep unavailable");
      double min_mass = std::numeric_limits<double>::infinity();
      for (const SweepPoint& point : sweep->points)
        min_mass = std::min(min_mass, point.m_end);
      const double exponent = sweep->fit.exponent;
      const bool pass =
          min_mass > 0.0 && exponent >= -1.3 && exponent <= -0.7;
      add(8, "attraction-strength scaling", pass,
          "fitted exponent " + shortest_number(exponent) +
              " (need within [-1.3, -0.7]), min steady mass " +
              shortest_number(min_mass),
          start);
    });
  }

  // ---- criteria 6 + 11: stirred base run, ratios and domination ----------
  ScenarioConfig mono;
  mono.grid = make_grid(quick ? 128 : 256, 20.0);
  mono.model.chi = 0.0;
  mono.model.eps = 1.0;
  mono.model.q = 3;
  mono.model.dt_max = 0.01;
  mono.model.flow = FlowSpec{FlowKind::cellular, 1.0, 1, 0.0};
  mono.initial = {GaussianSpec{1.0, 1.5}};
  mono.t_end = quick ? 1.5 : 5.0;
  mono.record_every = 0.05;

  guarded(6, "norm-ratio monotonicity", [&](auto start) {
    const RunResult result = run_scenario(mono);
    const DiagnosticsRecord& first = result.records.front();
    const BoundsReport bounds = check_bounds(
        result.records, mono.model.q, mono.model.chi, mono.model.eps, false,
        InitialStats{first.m0, first.m2, first.lpinf});
    write_records_csv(result.records,
                      (out / "monotone" / "records.csv").string());
    const BoundCheck& check = bounds.find("ratio_monotonicity");
    add(6, "norm-ratio monotonicity", check.applicable && check.pass,
        "worst margin " + shortest_number(check.worst_margin) + " at t=" +
            shortest_number(check.t_worst),
        start);
  });

  // ---- criterion 7: reaction-amplitude linearity --------------------------
  {
    ScenarioConfig base;
    base.grid = make_grid(256, 80.0);
    base.model.chi = 0.0;
    base.model.q = 3;
    base.model.dt_max = 0.1;
    base.model.flow = FlowSpec{FlowKind::cellular, 1.0, 1, 0.0};
    base.initial = {GaussianSpec{1.0, 1.5}};
    base.t_end = quick ? 6.0 : 15.0;
    base.record_every = 0.25;
    const std::vector<double> eps_list =
        quick ? std::vector<double>{0.02, 0.05, 0.1}
              : std::vector<double>{0.01, 0.02, 0.05, 0.1};

    guarded(7, "reaction-amplitude linearity", [&](auto start) {
      const EpsilonSweep result = epsilon_linearity(base, eps_list);
      for (const SweepPoint& point : result.points)
        ceilings.push_back({"eps sweep " + shortest_number(point.parameter),
                            point.bounds.find("density_ceiling")});
      std::string csv = "eps,deficit,m_end\n";
      PlotSeries data;
      data.label = "mass deficit";
      for (const SweepPoint& point : result.points) {
        csv += csv_number(point.parameter) + "," +
               csv_number(point.deficit) + "," + csv_number(point.m_end) +
               "\n";
        data.xs.push_back(point.parameter);
        data.ys.push_back(point.deficit);
      }
      detail::write_file((out / "eps" / "eps_sweep.csv").string(), csv);
      emit_plot({data, detail::fit_line(result.fit, data.xs.front(),
                                        data.xs.back(), "fit")},
                PlotAxes{"eps", "deficit", true, true,
                         "slope = " + shortest_number(result.fit.exponent)},
                (out / "eps" / "eps_sweep.svg").string());
      const bool pass = result.min_steady_mass > 0.0 &&
                        result.fit.exponent >= 0.9 &&
                        result.fit.exponent <= 1.1;
      add(7, "reaction-amplitude linearity", pass,
          "fitted exponent " + shortest_number(result.fit.exponent) +
              " (need within [0.9, 1.1]), min steady mass " +
              shortest_number(result.min_steady_mass),
          start);
    });
  }

  // ---- criterion 9: stirred mass decay ------------------------------------
  {
    ScenarioConfig base;
    base.grid = make_grid(quick ? 256 : 512, 16.0);
    base.model.eps = 1.0;
    base.model.q = 6;
    base.model.dt_max = 0.01;
    base.model.flow = FlowSpec{FlowKind::cellular, 1.0, 1, 0.0};
    base.initial = {GaussianSpec{8.0, 0.96}};
    base.record_every = 0.05;
    const std::vector<double> chi_list =
        quick ? std::vector<double>{8.0, 16.0}
              : std::vector<double>{8.0, 16.0, 32.0};
    const std::vector<double> tau_grid =
        quick ? std::vector<double>{0.25, 0.5}
              : std::vector<double>{0.25, 0.5, 1.0};

    guarded(9, "stirred mass decay", [&](auto start) {
      const FlowChiReport result =
          flow_chi_scaling(base, chi_list, tau_grid);
      for (std::size_t i = 0; i < result.bounds.size(); ++i)
        ceilings.push_back({"flow sweep run " + std::to_string(i + 1),
                            result.bounds[i].find("density_ceiling")});
      std::string csv = "chi,tau,chi_tau,m0\n";
      PlotSeries data;
      data.label = "m0 samples";
      for (const FlowChiSample& s : result.samples) {
        csv += csv_number(s.chi) + "," + csv_number(s.tau) + "," +
               csv_number(s.chi * s.tau) + "," + csv_number(s.m0) + "\n";
        data.xs.push_back(s.chi * s.tau);
        data.ys.push_back(s.m0);
      }
      detail::write_file((out / "flowchi" / "flowchi.csv").string(), csv);
      std::vector<std::pair<double, double>> sorted;
      for (const FlowChiSample& s : result.samples)
        sorted.push_back({s.chi * s.tau, s.m0});
      std::sort(sorted.begin(), sorted.end());
      data.xs.clear();
      data.ys.clear();
      for (const auto& [x, y] : sorted) {
        data.xs.push_back(x);
        data.ys.push_back(y);
      }
      emit_plot(
          {data, detail::fit_line(result.fit, sorted.front().first,
                                  sorted.back().first, "fit")},
          PlotAxes{"chi*tau", "m0", true, true,
                   "slope = " + shortest_number(result.fit.exponent)},
          (out / "flowchi" / "flowchi.svg").string());
      const bool pass = result.collapse_max_ratio <= 3.0;
      add(9, "stirred mass decay", pass,
          "cover prefactor " + shortest_number(result.cover_prefactor) +
              ", collapse factor " +
              shortest_number(result.collapse_max_ratio) + " (need <= 3)",
          start);
    });
  }

  // ---- criterion 5: density ceiling across runs of 1-4, 7-9 --------------
  {
    const auto start = now();
    bool pass = !ceilings.empty();
    double worst = std::numeric_limits<double>::infinity();
    std::string worst_source = "none";
    for (const CeilingEntry& entry : ceilings) {
      const bool ok = entry.check.applicable && entry.check.pass;
      pass = pass && ok;
      if (entry.check.worst_margin < worst) {
        worst = entry.check.worst_margin;
        worst_source = entry.source;
      }
    }
    add(5, "density ceiling", pass,
        std::to_string(ceilings.size()) + " runs, worst margin " +
            shortest_number(worst) + " (" + worst_source + ")",
        start);
  }

  // ---- criterion 10: diffusion decay rates --------------------------------
  {
    ScenarioConfig config;
    config.grid = make_grid(quick ? 256 : 512, 80.0);
    config.model.chi = 0.0;
    config.model.eps = 0.0;
    config.model.q = 3;
    config.model.kappa = quick ? 8.0 : 4.0;
    config.model.dt_max = 0.25;
    config.initial = {GaussianSpec{1.0, quick ? 1.25 : 0.625}};
    config.t_end = quick ? 10.0 : 20.0;
    config.record_every = 0.25;
    const double t_hi = quick ? 10.0 : 20.0;

    guarded(10, "diffusion decay rates", [&](auto start) {
      const DecayReport result = diffusion_decay(config, 1.0, t_hi);
      std::string csv = "t,l2,linf\n";
      PlotSeries l2_series, linf_series;
      l2_series.label = "l2";
      linf_series.label = "linf";
      for (const DecaySample& s : result.samples) {
        csv += csv_number(s.t) + "," + csv_number(s.l2) + "," +
               csv_number(s.linf) + "\n";
        l2_series.xs.push_back(s.t);
        l2_series.ys.push_back(s.l2);
        linf_series.xs.push_back(s.t);
        linf_series.ys.push_back(s.linf);
      }
      detail::write_file((out / "decay" / "decay.csv").string(), csv);
      if (!result.fit_l2 || !result.fit_linf)
        throw error("decay fits unavailable");
      emit_plot({l2_series, linf_series},
                PlotAxes{"t", "norm", true, true,
                         "slopes: l2 " +
                             shortest_number(result.fit_l2->exponent) +
                             ", linf " +
                             shortest_number(result.fit_linf->exponent)},
                (out / "decay" / "decay.svg").string());
      const double e_l2 = result.fit_l2->exponent;
      const double e_linf = result.fit_linf->exponent;
      const bool pass = std::abs(e_l2 + 0.5) <= 0.05 &&
                        std::abs(e_linf + 1.0) <= 0.05;
      add(10, "diffusion decay rates", pass,
          "l2 exponent " + shortest_number(e_l2) +
              " (need -0.5 +/- 0.05), linf exponent " +
              shortest_number(e_linf) + " (need -1 +/- 0.05)",
          start);
    });
  }

  // ---- criterion 11: comparison with the non-reacting solution ------------
  guarded(11, "comparison principle", [&](auto start) {
    const ComparisonReport result = comparison_check(mono);
    const double tolerance = 1e-8 * result.linf_b0;
    const bool pass = result.worst_margin <= tolerance;
    detail::write_file(
        (out / "comparison" / "report.txt").string(),
        "worst rho - b margin: " + shortest_number(result.worst_margin) +
            " at t=" + shortest_number(result.t_worst) + " x=" +
            shortest_number(result.x_worst) + " y=" +
            shortest_number(result.y_worst) + "\ntolerance: " +
            shortest_number(tolerance) + "\n");
    add(11, "comparison principle", pass,
        "worst margin " + shortest_number(result.worst_margin) + " (tol " +
            shortest_number(tolerance) + ")",
        start);
  });

  // ---- criterion 12: two-species conservation ------------------------------
  {
    const Grid grid = make_grid(quick ? 128 : 256, 20.0);
    SystemParams params;
    params.eps = 1.0;
    params.q = 4;
    params.kappa1 = 1.0;
    params.kappa2 = 0.5;
    params.dt_max = 0.01;
    params.flow = FlowSpec{FlowKind::cellular, 1.0, 1, 0.0};

    guarded(12, "two-species conservation", [&](auto start) {
      GaussianSpec e_blob{0.7, 0.9};
      e_blob.center_x = 11.5;
      e_blob.center_y = 10.0;
      SystemState initial{
          0.0, build_initial(grid, {GaussianSpec{1.0, 1.2}}),
          build_initial(grid, {e_blob})};
      const SystemRunResult result =
          run_two_species(initial, params, quick ? 2.0 : 5.0, 0.05);
      write_records_csv(result.records,
                        (out / "system" / "records.csv").string());
      std::string csv = "t,mass_s,mass_e\n";
      for (const DiagnosticsRecord& r : result.records)
        csv += csv_number(r.t) + "," + csv_number(r.mass_s) + "," +
               csv_number(r.mass_e) + "\n";
      detail::write_file((out / "system" / "species_masses.csv").string(),
                         csv);
      double worst_drift = 0.0;
      bool ordered = true;
      for (const DiagnosticsRecord& r : result.records) {
        worst_drift =
            std::max(worst_drift, std::abs(r.mass_s - r.mass_e - 0.3));
        ordered = ordered && r.mass_s >= r.mass_e;
      }
      const DiagnosticsRecord& last = result.records.back();
      const bool pass = worst_drift <= 1e-8 && ordered && last.mass_s > 0.0 &&
                        last.mass_e > 0.0;
      add(12, "two-species conservation", pass,
          "worst |mass gap - 0.3| = " + shortest_number(worst_drift) +
              " (tol 1e-08), final masses " + shortest_number(last.mass_s) +
              " / " + shortest_number(last.mass_e),
          start);
    });
  }

  // ---- criterion 13: interpolation-inequality survey -----------------------
  guarded(13, "interpolation inequality", [&](auto start) {
    const Grid grid = make_grid(256, 1.0);
    const std::vector<GNCase> cases = {make_gn_case(2.0, 1.0),
                                       make_gn_case(4.0, 2.0),
                                       make_gn_case(8.0 / 3.0, 2.0 / 3.0)};
    const int family = quick ? 20 : 40;
    const GNReport base = gn_suite(1, cases, family, grid);
    const GNReport doubled = gn_suite(1, cases, 2 * family, grid, false);

    const Field g = gaussian(grid, 1.0, 0.5, 0.5, 0.06);
    const double gaussian_ratio = gn_ratio(g, cases[0]);
    const double gaussian_err = std::abs(gaussian_ratio - 0.53113);

    std::string csv =
        "q,r,a,max_ratio,max_ratio_doubled,amp_change,dilation_change\n";
    bool amp_ok = true, dilation_ok = true, doubling_ok = true;
    double worst_doubling = 0.0;
    for (std::size_t i = 0; i < cases.size(); ++i) {
      const GNCaseResult& c = base.cases[i];
      const GNCaseResult& d = doubled.cases[i];
      csv += csv_number(c.gn_case.q) + "," + csv_number(c.gn_case.r) + "," +
             csv_number(c.gn_case.a) + "," + csv_number(c.max_ratio) + "," +
             csv_number(d.max_ratio) + "," +
             csv_number(c.worst_amplitude_change) + "," +
             csv_number(c.worst_dilation_change) + "\n";
      amp_ok = amp_ok && c.worst_amplitude_change <= 1e-12;
      dilation_ok = dilation_ok && c.worst_dilation_change < 0.01;
      const double change =
          std::abs(d.max_ratio - c.max_ratio) / c.max_ratio;
      worst_doubling = std::max(worst_doubling, change);
      doubling_ok = doubling_ok && change <= 0.05;
    }
    detail::write_file((out / "gn" / "gn.csv").string(), csv);
    const bool pass =
        gaussian_err <= 1e-3 && amp_ok && dilation_ok && doubling_ok;
    add(13, "interpolation inequality", pass,
        "gaussian ratio " + shortest_number(gaussian_ratio) +
            " (expect 0.53113 +/- 0.001), family-doubling change " +
            shortest_number(worst_doubling) + " (need <= 0.05)",
        start);
  });

  // ---- criterion 14: reaction-independent aggregation timescale -----------
  {
    ScenarioConfig base;
    base.grid = make_grid(quick ? 256 : 512, 16.0);
    base.model.chi = quick ? 16.0 : 32.0;
    base.model.q = 6;
    base.model.dt_max = 0.01;
    base.initial = {GaussianSpec{3.0, 0.75}};
    base.t_end = quick ? 1.0 : 0.35;
    base.record_every = quick ? 0.01 : 0.005;

    guarded(14, "reaction-independent timescale", [&](auto start) {
      std::string csv = "eps,t_half\n";
      std::vector<double> halves;
      for (double eps : {0.1, 1.0, 10.0}) {
        ScenarioConfig config = base;
        config.model.eps = eps;
        const RunResult result = run_scenario(config);
        const auto t_half = detail::half_mass_time(result.records);
        if (!t_half)
          throw error("half mass not reached for eps = " +
                      shortest_number(eps));
        halves.push_back(*t_half);
        csv += csv_number(eps) + "," + csv_number(*t_half) + "\n";
      }
      detail::write_file((out / "halfmass" / "halfmass.csv").string(), csv);
      const double lo = *std::min_element(halves.begin(), halves.end());
      const double hi = *std::max_element(halves.begin(), halves.end());
      const bool pass = hi <= 3.0 * lo;
      add(14, "reaction-independent timescale", pass,
          "half-mass times " + shortest_number(halves[0]) + ", " +
              shortest_number(halves[1]) + ", " + shortest_number(halves[2]) +
              "; spread " + shortest_number(hi / lo) + "x (need <= 3x)",
          start);
    });
  }

  // ---- criterion 15: determinism -------------------------------------------
  guarded(15, "determinism", [&](auto start) {
    if (quick) {
      ScenarioConfig probe;
      probe.grid = make_grid(64, 20.0);
      probe.model.chi = 2.0;
      probe.model.eps = 1.0;
      probe.model.q = 3;
      probe.model.dt_max = 0.01;
      probe.initial = {GaussianSpec{1.0, 1.5}};
      probe.t_end = 0.2;
      probe.record_every = 0.05;
      std::vector<std::string> artifacts;
      for (const char* tag : {"a", "b"}) {
        const RunResult result = run_scenario(probe);
        const ResidualSeries residuals = identity_residuals(
            result.records, probe.model.q, probe.model.chi, probe.model.eps);
        const std::string csv_path =
            (out / "determinism" / (std::string(tag) + "_records.csv"))
                .string();
        write_records_csv(result.records, csv_path, &residuals);
        const std::string bmx_path =
            (out / "determinism" / (std::string(tag) + ".bmx")).string();
        write_field(result.final_state.rho, result.final_state.t, "rho",
                    bmx_path);
        PlotSeries series;
        series.label = "m0";
        for (const DiagnosticsRecord& r : result.records) {
          series.xs.push_back(r.t);
          series.ys.push_back(r.m0);
        }
        const std::string svg_path =
            (out / "determinism" / (std::string(tag) + ".svg")).string();
        emit_plot({series}, PlotAxes{"t", "m0", false, false, ""}, svg_path);
        artifacts.push_back(detail::read_file(csv_path) +
                            detail::read_file(bmx_path) +
                            detail::read_file(svg_path));
      }
      const bool pass = artifacts[0] == artifacts[1];
      add(15, "determinism", pass,
          pass ? "repeated pipeline run is byte-identical"
               : "repeated pipeline run differs",
          start);
    } else {
      if (log) {
        (*log) << "criterion 15 (determinism): running the quick suite "
                  "twice...\n";
        log->flush();
      }
      run_verification(VerifyMode::quick, (out / "quick_a").string());
      run_verification(VerifyMode::quick, (out / "quick_b").string());
      std::string why;
      const bool pass = detail::directories_identical(
          out / "quick_a", out / "quick_b", &why);
      add(15, "determinism", pass,
          pass ? "two quick-suite runs are byte-identical" : why, start);
    }
  });

  std::sort(report.criteria.begin(), report.criteria.end(),
            [](const CriterionResult& a, const CriterionResult& b) {
              return a.index < b.index;
            });

  std::string text = std::string("verification report (") +
                     (quick ? "quick" : "full") + ")\n";
  for (const CriterionResult& c : report.criteria)
    text += "criterion " + std::to_string(c.index) + ": " +
            (c.pass ? "PASS" : "FAIL") + " - " + c.name + ": " + c.detail +
            "\n";
  text += report.all_pass() ? "all criteria passed\n"
                            : "at least one criterion FAILED\n";
  detail::write_file((out / "report.txt").string(), text);
  return report;
}

}  // namespace chemflow
