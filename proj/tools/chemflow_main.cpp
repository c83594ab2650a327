// Command-line front end: run a configured scenario, drive a parameter
// sweep, survey the interpolation inequality, or execute the built-in
// verification suite.  All outputs are deterministic functions of the
// configuration and seed.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chemflow/config.hpp"
#include "chemflow/diagnostics.hpp"
#include "chemflow/dynamics.hpp"
#include "chemflow/errors.hpp"
#include "chemflow/experiments.hpp"
#include "chemflow/io.hpp"
#include "chemflow/verify.hpp"

namespace fs = std::filesystem;
using namespace chemflow;

namespace {

Config load_config(const std::string& path,
                   const std::vector<std::string>& overrides) {
  Config config = parse_config(detail::read_file(path));
  for (const std::string& text : overrides) apply_override(config, text);
  return config;
}

PlotSeries m0_series(const std::vector<DiagnosticsRecord>& records,
                     const std::string& label) {
  PlotSeries series;
  series.label = label;
  for (const DiagnosticsRecord& r : records) {
    series.xs.push_back(r.t);
    series.ys.push_back(r.m0);
  }
  return series;
}

int run_command(const std::string& config_path, const std::string& out_dir,
                const std::vector<std::string>& overrides) {
  const Config config = load_config(config_path, overrides);
  fs::create_directories(out_dir);
  const fs::path out(out_dir);

  if (config.kind == ModelKind::single) {
    const ScenarioConfig scenario = to_scenario(config);
    const RunResult result = run_scenario(scenario);
    const ResidualSeries residuals =
        identity_residuals(result.records, scenario.model.q,
                           scenario.model.chi, scenario.model.eps);
    write_records_csv(result.records, (out / "records.csv").string(),
                      &residuals);
    write_field(result.final_state.rho, result.final_state.t, "rho",
                (out / "final_rho.bmx").string());
    emit_plot({m0_series(result.records, "m0")},
              PlotAxes{"t", "m0", false, false, ""},
              (out / "m0.svg").string());
    const DiagnosticsRecord& first = result.records.front();
    const BoundsReport bounds = check_bounds(
        result.records, scenario.model.q, scenario.model.chi,
        scenario.model.eps, scenario.model.flow.kind == FlowKind::zero,
        InitialStats{first.m0, first.m2, first.lpinf});
    detail::write_file((out / "bounds.txt").string(),
                       render_bounds_report(bounds));
    std::cout << "run finished at t=" << detail::shortest_number(
                     result.final_state.t)
              << (result.early_stopped ? " (steady state reached early)"
                                       : "")
              << ", final mass " << detail::shortest_number(
                     result.records.back().m0)
              << "\n"
              << render_bounds_report(bounds);
    return bounds.all_pass() ? 0 : 1;
  }

  const SystemParams params = to_system_params(config);
  const Grid grid = make_grid(config.n, config.box_size);
  SystemState initial{0.0, build_initial(grid, initial_blobs(config, 1)),
                      build_initial(grid, initial_blobs(config, 2))};
  const SystemRunResult result =
      run_two_species(initial, params, config.t_end, config.record_every);
  write_records_csv(result.records, (out / "records.csv").string());
  const Field total = lin_comb(1.0, result.final_state.s, 1.0,
                               result.final_state.e);
  write_field(total, result.final_state.t, "rho",
              (out / "final_rho.bmx").string());
  emit_plot({m0_series(result.records, "m0")},
            PlotAxes{"t", "m0", false, false, ""}, (out / "m0.svg").string());
  std::string report = "two-species run\n";
  double worst_drift = 0.0;
  bool ordered = true;
  const double gap0 =
      result.records.front().mass_s - result.records.front().mass_e;
  for (const DiagnosticsRecord& r : result.records) {
    worst_drift = std::max(worst_drift, std::abs(r.mass_s - r.mass_e - gap0));
    ordered = ordered && r.mass_s + 1e-15 >= r.mass_e;
  }
  report += "mass-gap conservation drift: " +
            detail::shortest_number(worst_drift) + "\n";
  report += std::string("species ordering (mass_s >= mass_e): ") +
            (ordered ? "holds" : "VIOLATED") + "\n";
  report += "final masses: " +
            detail::shortest_number(result.records.back().mass_s) + " / " +
            detail::shortest_number(result.records.back().mass_e) + "\n";
  detail::write_file((out / "bounds.txt").string(), report);
  std::cout << report;
  return (worst_drift <= 1e-8 && ordered) ? 0 : 1;
}

int sweep_command(const std::string& config_path,
                  const std::string& experiment, const std::string& out_dir,
                  const std::vector<std::string>& overrides) {
  const Config config = load_config(config_path, overrides);
  fs::create_directories(out_dir);
  const fs::path out(out_dir);
  const ScenarioConfig base = to_scenario(config);

  auto point_csv = [&](const std::string& name,
                       const std::vector<DiagnosticsRecord>& records) {
    write_records_csv(records, (out / name).string());
  };
  std::string summary;

  if (experiment == "epsilon") {
    if (config.eps_list.empty())
      throw invalid_argument("epsilon sweep needs [experiment] eps_list");
    const EpsilonSweep sweep = epsilon_linearity(base, config.eps_list);
    std::string csv = "eps,deficit,m_end\n";
    PlotSeries data;
    data.label = "mass deficit";
    for (const SweepPoint& p : sweep.points) {
      point_csv("point_eps_" + detail::shortest_number(p.parameter) + ".csv",
                p.records);
      csv += detail::csv_number(p.parameter) + "," +
             detail::csv_number(p.deficit) + "," +
             detail::csv_number(p.m_end) + "\n";
      data.xs.push_back(p.parameter);
      data.ys.push_back(p.deficit);
    }
    detail::write_file((out / "sweep.csv").string(), csv);
    emit_plot({data, detail::fit_line(sweep.fit, data.xs.front(),
                                      data.xs.back(), "fit")},
              PlotAxes{"eps", "deficit", true, true,
                       "slope = " +
                           detail::shortest_number(sweep.fit.exponent)},
              (out / "sweep.svg").string());
    summary = "epsilon sweep: fitted exponent " +
              detail::shortest_number(sweep.fit.exponent) + ", prefactor " +
              detail::shortest_number(sweep.fit.prefactor) +
              ", min steady mass " +
              detail::shortest_number(sweep.min_steady_mass) + "\n";
  } else if (experiment == "chi") {
    if (config.chi_list.empty())
      throw invalid_argument("chi sweep needs [experiment] chi_list");
    const ChiSweep sweep = chi_scaling(base, config.chi_list);
    std::string csv = "chi,m_end,deficit\n";
    PlotSeries data;
    data.label = "steady mass";
    for (const SweepPoint& p : sweep.points) {
      point_csv("point_chi_" + detail::shortest_number(p.parameter) + ".csv",
                p.records);
      csv += detail::csv_number(p.parameter) + "," +
             detail::csv_number(p.m_end) + "," +
             detail::csv_number(p.deficit) + "\n";
      data.xs.push_back(p.parameter);
      data.ys.push_back(p.m_end);
    }
    detail::write_file((out / "sweep.csv").string(), csv);
    emit_plot({data, detail::fit_line(sweep.fit, data.xs.front(),
                                      data.xs.back(), "fit")},
              PlotAxes{"chi", "m_end", true, true,
                       "slope = " +
                           detail::shortest_number(sweep.fit.exponent)},
              (out / "sweep.svg").string());
    summary = "chi sweep: fitted exponent " +
              detail::shortest_number(sweep.fit.exponent) + ", prefactor " +
              detail::shortest_number(sweep.fit.prefactor) +
              ", worst mass-bound margin " +
              detail::shortest_number(sweep.worst_mass_bound_margin) +
              ", bounds " + (sweep.all_bounds_pass ? "pass" : "FAIL") + "\n";
  } else if (experiment == "flowchi") {
    if (config.chi_list.empty() || config.tau_grid.empty())
      throw invalid_argument(
          "flowchi sweep needs [experiment] chi_list and tau_grid");
    const FlowChiReport sweep =
        flow_chi_scaling(base, config.chi_list, config.tau_grid);
    for (std::size_t i = 0; i < sweep.run_records.size(); ++i)
      point_csv("point_chi_" +
                    detail::shortest_number(sweep.run_chis[i]) + ".csv",
                sweep.run_records[i]);
    std::string csv = "chi,tau,chi_tau,m0\n";
    std::vector<std::pair<double, double>> sorted;
    for (const FlowChiSample& s : sweep.samples) {
      csv += detail::csv_number(s.chi) + "," + detail::csv_number(s.tau) +
             "," + detail::csv_number(s.chi * s.tau) + "," +
             detail::csv_number(s.m0) + "\n";
      sorted.push_back({s.chi * s.tau, s.m0});
    }
    std::sort(sorted.begin(), sorted.end());
    detail::write_file((out / "sweep.csv").string(), csv);
    PlotSeries data;
    data.label = "m0 samples";
    for (const auto& [x, y] : sorted) {
      data.xs.push_back(x);
      data.ys.push_back(y);
    }
    emit_plot({data, detail::fit_line(sweep.fit, sorted.front().first,
                                      sorted.back().first, "fit")},
              PlotAxes{"chi*tau", "m0", true, true,
                       "slope = " +
                           detail::shortest_number(sweep.fit.exponent)},
              (out / "sweep.svg").string());
    summary = "flowchi sweep: fitted exponent " +
              detail::shortest_number(sweep.fit.exponent) +
              ", cover prefactor " +
              detail::shortest_number(sweep.cover_prefactor) +
              ", collapse factor " +
              detail::shortest_number(sweep.collapse_max_ratio) + "\n";
  } else if (experiment == "decay") {
    const DecayReport report =
        diffusion_decay(base, config.t_lo, config.t_hi);
    point_csv("records.csv", report.records);
    std::string csv = "t,l2,linf\n";
    PlotSeries l2_series, linf_series;
    l2_series.label = "l2";
    linf_series.label = "linf";
    for (const DecaySample& s : report.samples) {
      csv += detail::csv_number(s.t) + "," + detail::csv_number(s.l2) + "," +
             detail::csv_number(s.linf) + "\n";
      l2_series.xs.push_back(s.t);
      l2_series.ys.push_back(s.l2);
      linf_series.xs.push_back(s.t);
      linf_series.ys.push_back(s.linf);
    }
    detail::write_file((out / "sweep.csv").string(), csv);
    std::string annotation = "no fit (flow on)";
    if (report.fit_l2 && report.fit_linf)
      annotation = "slopes: l2 " +
                   detail::shortest_number(report.fit_l2->exponent) +
                   ", linf " +
                   detail::shortest_number(report.fit_linf->exponent);
    emit_plot({l2_series, linf_series},
              PlotAxes{"t", "norm", true, true, annotation},
              (out / "sweep.svg").string());
    summary = "decay: " + annotation + "\n";
  } else {
    throw invalid_argument("unknown experiment '" + experiment + "'");
  }
  detail::write_file((out / "summary.txt").string(), summary);
  std::cout << summary;
  return 0;
}

std::vector<GNCase> parse_gn_cases(const std::string& spec) {
  if (spec == "default")
    return {make_gn_case(2.0, 1.0), make_gn_case(4.0, 2.0),
            make_gn_case(8.0 / 3.0, 2.0 / 3.0)};
  std::vector<GNCase> cases;
  std::string item;
  auto flush = [&]() {
    if (item.empty()) return;
    const std::size_t colon = item.find(':');
    if (colon == std::string::npos)
      throw invalid_argument("gn case must look like q:r, got '" + item +
                             "'");
    cases.push_back(make_gn_case(std::stod(item.substr(0, colon)),
                                 std::stod(item.substr(colon + 1))));
    item.clear();
  };
  for (char c : spec) {
    if (c == ',')
      flush();
    else if (!std::isspace(static_cast<unsigned char>(c)))
      item.push_back(c);
  }
  flush();
  if (cases.empty()) throw invalid_argument("no gn cases given");
  return cases;
}

int gn_command(const std::string& cases_spec, std::uint64_t seed,
               const std::string& out_dir) {
  const std::vector<GNCase> cases = parse_gn_cases(cases_spec);
  fs::create_directories(out_dir);
  const GNReport report = gn_suite(seed, cases, 40, make_grid(256, 1.0));
  std::string csv =
      "q,r,a,max_ratio,argmax_member,amp_change,dilation_change\n";
  for (const GNCaseResult& c : report.cases)
    csv += detail::csv_number(c.gn_case.q) + "," +
           detail::csv_number(c.gn_case.r) + "," +
           detail::csv_number(c.gn_case.a) + "," +
           detail::csv_number(c.max_ratio) + "," +
           std::to_string(c.argmax_member) + "," +
           detail::csv_number(c.worst_amplitude_change) + "," +
           detail::csv_number(c.worst_dilation_change) + "\n";
  detail::write_file((fs::path(out_dir) / "gn.csv").string(), csv);
  std::cout << csv;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseudo-spectral chemotaxis-reaction simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", experiment, cases_spec = "default";
  std::vector<std::string> overrides;
  std::uint64_t seed = 1;
  bool quick = false, full = false;

  CLI::App* cmd_run = app.add_subcommand("run", "integrate one scenario");
  cmd_run->add_option("--config", config_path, "configuration file")
      ->required();
  cmd_run->add_option("--out", out_dir, "output directory")->required();
  cmd_run->add_option("--override", overrides,
                      "dotted-path overrides (model.chi=8)");

  CLI::App* cmd_sweep = app.add_subcommand("sweep", "parameter sweep");
  cmd_sweep->add_option("--config", config_path, "configuration file")
      ->required();
  cmd_sweep
      ->add_option("--experiment", experiment,
                   "one of: epsilon, chi, flowchi, decay")
      ->required();
  cmd_sweep->add_option("--out", out_dir, "output directory")->required();
  cmd_sweep->add_option("--override", overrides,
                        "dotted-path overrides (model.chi=8)");

  CLI::App* cmd_gn = app.add_subcommand(
      "gn", "interpolation-inequality ratio survey");
  cmd_gn->add_option("--cases", cases_spec,
                     "'default' or comma list of q:r pairs");
  cmd_gn->add_option("--seed", seed, "random-family seed");
  cmd_gn->add_option("--out", out_dir, "output directory")->required();

  CLI::App* cmd_verify =
      app.add_subcommand("verify", "built-in verification suite");
  cmd_verify->add_flag("--quick", quick, "trimmed configurations (seconds)");
  cmd_verify->add_flag("--full", full, "pinned configurations (minutes)");
  cmd_verify->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) return run_command(config_path, out_dir, overrides);
    if (cmd_sweep->parsed())
      return sweep_command(config_path, experiment, out_dir, overrides);
    if (cmd_gn->parsed()) return gn_command(cases_spec, seed, out_dir);
    if (cmd_verify->parsed()) {
      if (quick == full) {
        std::cerr << "verify: pass exactly one of --quick or --full\n";
        return 2;
      }
      if (out_dir == "out") out_dir = "verify_out";
      const VerifyReport report = run_verification(
          quick ? VerifyMode::quick : VerifyMode::full, out_dir, &std::cout);
      std::cout << (report.all_pass() ? "all criteria passed"
                                      : "at least one criterion FAILED")
                << "\n";
      return report.all_pass() ? 0 : 1;
    }
  } catch (const config_error& err) {
    std::cerr << "config error: " << err.what();
    if (err.line > 0) std::cerr << " (line " << err.line << ")";
    std::cerr << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 2;
}
