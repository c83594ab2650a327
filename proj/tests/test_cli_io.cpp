// Config text round trips, the records CSV schema, the binary field-dump
// format, and deterministic SVG rendering.

#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "chemflow/config.hpp"
#include "chemflow/errors.hpp"
#include "chemflow/field.hpp"
#include "chemflow/grid.hpp"
#include "chemflow/io.hpp"

using namespace chemflow;

namespace {

std::filesystem::path tmp_dir() {
  const auto dir = std::filesystem::path("test_io_tmp");
  std::filesystem::create_directories(dir);
  return dir;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    lines.push_back(text.substr(pos, eol - pos));
    pos = eol + 1;
  }
  return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return fields;
}

}  // namespace

TEST_CASE("config parsing applies defaults and reports line numbers") {
  const Config c = parse_config("[model]\nchi = 5\n");
  CHECK(c.chi == 5.0);
  CHECK(c.n == 256);
  CHECK(c.box_size == 20.0);
  CHECK(c.q == 3);
  CHECK(c.kind == ModelKind::single);
  CHECK(c.eps == 1.0);
  CHECK(c.initial.empty());

  // Violated invariants name the offending rule.
  try {
    parse_config("[model]\nq = 2\n");
    FAIL("expected config_error");
  } catch (const config_error& err) {
    CHECK(std::string(err.what()).find("q must be an integer >= 3") !=
          std::string::npos);
  }

  // Unknown keys and sections carry their line number.
  try {
    parse_config("[grid]\nm = 4\n");
    FAIL("expected config_error");
  } catch (const config_error& err) {
    CHECK(err.line == 2);
    CHECK(std::string(err.what()).find("unknown key 'm'") !=
          std::string::npos);
  }
  try {
    parse_config("\n\n[lattice]\nn = 32\n");
    FAIL("expected config_error");
  } catch (const config_error& err) {
    CHECK(err.line == 4);
    CHECK(std::string(err.what()).find("unknown section") !=
          std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("[flow]\nkind = vortex\n"), config_error);
  CHECK_THROWS_AS(parse_config("chi = 5\n"), config_error);  // no section
  CHECK_THROWS_AS(parse_config("[model]\nchi\n"), config_error);
  CHECK_THROWS_AS(parse_config("[model\nchi = 5\n"), config_error);
  CHECK_THROWS_AS(parse_config("[grid]\nn = 48\n"), config_error);
  CHECK_THROWS_AS(parse_config("[model]\nchi = two\n"), config_error);

  // Comments and blank lines are ignored, including trailing comments.
  const Config commented =
      parse_config("# header\n\n[grid]\nn = 64\nL = 10 # trailing\n");
  CHECK(commented.n == 64);
  CHECK(commented.box_size == 10.0);

  // A system-kind config defaults q to 4 and requires both species.
  CHECK_THROWS_AS(parse_config("[model]\nkind = system\n"), config_error);
  const Config system = parse_config(
      "[model]\nkind = system\n"
      "[initial.1]\nmass = 1\nsigma = 1\nspecies = 1\n"
      "[initial.2]\nmass = 0.5\nsigma = 1\nspecies = 2\n");
  CHECK(system.q == 4);
  REQUIRE(system.initial.size() == 2);
  CHECK(system.initial[1].species == 2);
}

TEST_CASE("dotted overrides edit one key and re-validate") {
  Config c = parse_config("[model]\nchi = 5\n");
  apply_override(c, "model.chi=8");
  CHECK(c.chi == 8.0);
  apply_override(c, "initial.1.mass=2.5");
  REQUIRE(c.initial.size() == 1);
  CHECK(c.initial[0].blob.mass == 2.5);
  apply_override(c, "flow.kind=shear");
  CHECK(c.flow.kind == FlowKind::shear);

  CHECK_THROWS_AS(apply_override(c, "chi=8"), config_error);
  CHECK_THROWS_AS(apply_override(c, "model.chi"), config_error);
  CHECK_THROWS_AS(apply_override(c, "grid.n=17"), config_error);
  CHECK_THROWS_AS(apply_override(c, "model.nope=1"), config_error);
}

TEST_CASE("config rendering round-trips every field") {
  Config c;
  c.n = 128;
  c.box_size = 16.0;
  c.kind = ModelKind::system;
  c.chi = 0.0;
  c.eps = 2.5;
  c.q = 6;
  c.q_given = true;
  c.kappa1 = 1.5;
  c.kappa2 = 0.25;
  c.flow.kind = FlowKind::cellular;
  c.flow.amplitude = 1.75;
  c.flow.cells = 2;
  c.flow.time_frequency = 0.3;
  c.initial.push_back(ConfigInitial{GaussianSpec{1.0, 1.2}, 1});
  c.initial.push_back(
      ConfigInitial{GaussianSpec{0.7, 0.9, 11.5, 10.0}, 2});
  c.t_end = 5.0;
  c.record_every = 0.05;
  c.dt_max = 0.01;
  c.seed = 99;
  c.eps_list = {0.01, 0.02, 0.1};
  c.tau_grid = {0.25, 0.5, 1.0};
  c.t_lo = 0.5;
  c.t_hi = 4.0;

  const Config back = parse_config(render_config(c));
  CHECK(back == c);

  // A near-default single-species config round-trips too (NaN centers are
  // omitted and re-parsed as NaN).
  Config d;
  d.initial.push_back(ConfigInitial{GaussianSpec{2.0, 1.5}, 1});
  CHECK(parse_config(render_config(d)) == d);

  // Converters hand the model layers exactly what was configured.
  const ModelParams mp = to_model_params(parse_config("[model]\nchi = 5\n"));
  CHECK(mp.chi == 5.0);
  CHECK(mp.kappa == 1.0);
  const SystemParams sp = to_system_params(c);
  CHECK(sp.kappa2 == 0.25);
  CHECK(sp.q == 6);
  CHECK(initial_blobs(c, 2).size() == 1);
  CHECK(initial_blobs(c, 1).size() == 1);
  CHECK_THROWS_AS(to_scenario(c), invalid_argument);  // system kind
  const ScenarioConfig sc = to_scenario(parse_config("[model]\nchi = 5\n"));
  CHECK(sc.grid.n == 256);
  CHECK(sc.initial.size() == 1);  // default blob
}

TEST_CASE("records CSV has the pinned header and residual alignment") {
  DiagnosticsRecord r0;
  r0.t = 0.0;
  r0.m0 = 1.0;
  r0.m2 = 2.0;
  r0.lp1 = 1.0;
  r0.lp2 = 0.5;
  r0.lpq = 1.0 / 3.0;
  r0.lpinf = 0.25;
  r0.min_val = 0.0;
  DiagnosticsRecord r1 = r0;
  r1.t = 0.5;
  r1.m0 = 0.9;

  ResidualSeries res;
  res.t_mid = {0.25};
  res.res_mass = {1e-5};
  res.res_m2 = {2e-5};
  res.res_lq = {3e-4};

  const std::string csv = render_records_csv({r0, r1}, &res);
  const auto lines = split_lines(csv);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "t,m0,m2,l1,l2,lq,linf,min_val,res_mass,res_eq45,res_eq410");

  const auto row0 = split_fields(lines[1]);
  REQUIRE(row0.size() == 11);
  CHECK(row0[0] == "0");
  CHECK(row0[1] == "1");
  // Residuals live on the later record's row; the first row is blank there.
  CHECK(row0[8].empty());
  CHECK(row0[9].empty());
  CHECK(row0[10].empty());

  const auto row1 = split_fields(lines[2]);
  REQUIRE(row1.size() == 11);
  CHECK(!row1[8].empty());
  CHECK(std::strtod(row1[8].c_str(), nullptr) == 1e-5);
  CHECK(std::strtod(row1[10].c_str(), nullptr) == 3e-4);

  // 17 significant digits: every value round-trips bit-exactly.
  CHECK(std::strtod(row0[5].c_str(), nullptr) == 1.0 / 3.0);
  const std::string no_res = render_records_csv({r0, r1});
  const auto bare = split_fields(split_lines(no_res)[2]);
  CHECK(bare[8].empty());
}

TEST_CASE("field dumps round-trip bit-exactly with a readable header") {
  const auto dir = tmp_dir();
  const Grid g = make_grid(64, 20.0);
  const Field f = gaussian(g, 1.0, 1.5);
  const std::string path = (dir / "rho.bmx").string();
  write_field(f, 0.5, "rho", path);

  const std::string raw = detail::read_file(path);
  CHECK(raw.rfind("BMX1 n=64 L=20 t=0.5 name=rho\n", 0) == 0);
  CHECK(raw.size() == 30 + 64 * 64 * 8);

  const FieldDump dump = read_field(path);
  CHECK(dump.t == 0.5);
  CHECK(dump.name == "rho");
  CHECK(dump.field.grid.n == 64);
  CHECK(dump.field.grid.box_size == 20.0);
  REQUIRE(dump.field.values.size() == f.values.size());
  for (std::size_t i = 0; i < f.values.size(); ++i)
    CHECK(dump.field.values[i] == f.values[i]);

  CHECK_THROWS_AS(write_field(f, 0.5, "bad name", path), invalid_argument);
  CHECK_THROWS_AS(write_field(f, 0.5, "", path), invalid_argument);

  // Corrupt payloads and foreign files are rejected.
  detail::write_file((dir / "short.bmx").string(),
                     raw.substr(0, raw.size() - 1));
  CHECK_THROWS_AS(read_field((dir / "short.bmx").string()), error);
  detail::write_file((dir / "not.bmx").string(), "hello\nworld\n");
  CHECK_THROWS_AS(read_field((dir / "not.bmx").string()), error);
  CHECK_THROWS_AS(read_field((dir / "missing.bmx").string()), error);
}

TEST_CASE("plots render deterministically with the expected structure") {
  PlotSeries decay{{1.0, 2.0, 4.0, 8.0}, {1.0, 0.51, 0.26, 0.13}, "mass"};
  PlotSeries fit{{1.0, 8.0}, {1.0, 0.125}, "slope -1"};
  PlotAxes axes;
  axes.x_label = "chi tau";
  axes.y_label = "m0";
  axes.log_x = true;
  axes.log_y = true;
  axes.annotation = "slope = -0.98";

  const std::string a = render_plot({decay, fit}, axes);
  const std::string b = render_plot({decay, fit}, axes);
  CHECK(a == b);
  CHECK(a.rfind("<?xml", 0) == 0);
  CHECK(a.find("<svg") != std::string::npos);
  CHECK(a.find("<polyline") != std::string::npos);
  CHECK(a.find("chi tau") != std::string::npos);
  CHECK(a.find("m0") != std::string::npos);
  CHECK(a.find("slope = -0.98") != std::string::npos);
  CHECK(a.find("slope -1") != std::string::npos);  // legend entry

  // Linear axes work on the same data.
  const std::string lin = render_plot({decay}, PlotAxes{"x", "y"});
  CHECK(lin.find("<polyline") != std::string::npos);

  CHECK_THROWS_AS(render_plot({}, axes), invalid_argument);
  PlotSeries mismatched{{1.0, 2.0}, {1.0}, ""};
  CHECK_THROWS_AS(render_plot({mismatched}, axes), invalid_argument);
  PlotSeries nonpositive{{1.0, 2.0}, {1.0, -1.0}, ""};
  CHECK_THROWS_AS(render_plot({nonpositive}, axes), invalid_argument);

  const auto dir = tmp_dir();
  emit_plot({decay}, axes, (dir / "plot.svg").string());
  CHECK(detail::read_file((dir / "plot.svg").string()) ==
        render_plot({decay}, axes));
}

TEST_CASE("bounds reports print one line per check") {
  BoundsReport report;
  report.checks.push_back(BoundCheck{"density_ceiling", true, true, 0.5, 1.0});
  report.checks.push_back(BoundCheck{"mass_bound", false, true, 0.0, 0.0});
  report.checks.push_back(
      BoundCheck{"mass_monotone", true, false, -2e-3, 0.75});
  const std::string text = render_bounds_report(report);
  CHECK(text.find("density_ceiling") != std::string::npos);
  CHECK(text.find("pass") != std::string::npos);
  CHECK(text.find("not applicable") != std::string::npos);
  CHECK(text.find("FAIL") != std::string::npos);
  CHECK(text.find("mass_monotone") != std::string::npos);
}
