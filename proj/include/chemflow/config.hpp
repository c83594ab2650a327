#pragma once

// INI-style run configuration: flat, diff-friendly text with sections
// [grid], [model], [flow], [initial.N], [run], [experiment].  '#' starts a
// comment.  Unknown sections or keys are hard errors (with line numbers);
// missing keys take the documented defaults.  Dotted overrides
// ("model.chi=8") reuse the same key table, and parse(render(config))
// round-trips to an equal Config.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "chemflow/dynamics.hpp"
#include "chemflow/errors.hpp"
#include "chemflow/experiments.hpp"
#include "chemflow/field.hpp"
#include "chemflow/flows.hpp"
#include "chemflow/grid.hpp"

namespace chemflow {

enum class ModelKind { single, system };

struct ConfigInitial {
  GaussianSpec blob;
  int species = 1;  // 1 = rho/s, 2 = e
};

struct Config {
  int n = 256;
  double box_size = 20.0;
  ModelKind kind = ModelKind::single;
  double chi = 0.0;
  double eps = 1.0;
  int q = 3;  // defaults to 4 when kind = system and q was never given
  bool q_given = false;
  double kappa1 = 1.0;
  double kappa2 = 1.0;
  FlowSpec flow;
  std::vector<ConfigInitial> initial;  // empty means one default blob
  double t_end = 1.0;
  double record_every = 0.01;
  double dt_max = 1e-2;
  std::uint64_t seed = 1;
  std::vector<double> eps_list;
  std::vector<double> chi_list;
  std::vector<double> tau_grid;
  double t_lo = 1.0;
  double t_hi = 20.0;
};

inline bool operator==(const ConfigInitial& a, const ConfigInitial& b) {
  auto same = [](double x, double y) {
    return (std::isnan(x) && std::isnan(y)) || x == y;
  };
  return a.species == b.species && same(a.blob.mass, b.blob.mass) &&
         same(a.blob.sigma, b.blob.sigma) &&
         same(a.blob.center_x, b.blob.center_x) &&
         same(a.blob.center_y, b.blob.center_y);
}

inline bool operator==(const FlowSpec& a, const FlowSpec& b) {
  return a.kind == b.kind && a.amplitude == b.amplitude &&
         a.cells == b.cells && a.time_frequency == b.time_frequency;
}

inline bool operator==(const Config& a, const Config& b) {
  return a.n == b.n && a.box_size == b.box_size && a.kind == b.kind &&
         a.chi == b.chi && a.eps == b.eps && a.q == b.q &&
         a.kappa1 == b.kappa1 && a.kappa2 == b.kappa2 && a.flow == b.flow &&
         a.initial == b.initial && a.t_end == b.t_end &&
         a.record_every == b.record_every && a.dt_max == b.dt_max &&
         a.seed == b.seed && a.eps_list == b.eps_list &&
         a.chi_list == b.chi_list && a.tau_grid == b.tau_grid &&
         a.t_lo == b.t_lo && a.t_hi == b.t_hi;
}

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline double parse_double(const std::string& text, int line) {
  const std::string t = trim(text);
  double value = 0.0;
  const char* begin = t.data();
  const char* end = begin + t.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw config_error("expected a number, got '" + t + "'", line);
  return value;
}

inline long long parse_int(const std::string& text, int line) {
  const std::string t = trim(text);
  long long value = 0;
  const char* begin = t.data();
  const char* end = begin + t.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw config_error("expected an integer, got '" + t + "'", line);
  return value;
}

inline std::uint64_t parse_u64(const std::string& text, int line) {
  const std::string t = trim(text);
  std::uint64_t value = 0;
  const char* begin = t.data();
  const char* end = begin + t.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw config_error("expected an unsigned integer, got '" + t + "'", line);
  return value;
}

inline std::vector<double> parse_list(const std::string& text, int line) {
  std::vector<double> out;
  std::string item;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ',') {
      const std::string t = trim(item);
      if (!t.empty()) out.push_back(parse_double(t, line));
      item.clear();
    } else {
      item.push_back(text[i]);
    }
  }
  if (out.empty()) throw config_error("expected a comma-separated list", line);
  return out;
}

// Applies one key to the config; `section` is "grid", "model", "flow",
// "run", "experiment", or "initial.N".  Unknown section/key -> error.
inline void apply_key(Config& config, const std::string& section,
                      const std::string& key, const std::string& value,
                      int line) {
  auto bad_key = [&]() -> config_error {
    return config_error("unknown key '" + key + "' in [" + section + "]",
                        line);
  };
  if (section == "grid") {
    if (key == "n")
      config.n = static_cast<int>(parse_int(value, line));
    else if (key == "L")
      config.box_size = parse_double(value, line);
    else
      throw bad_key();
  } else if (section == "model") {
    if (key == "chi")
      config.chi = parse_double(value, line);
    else if (key == "eps")
      config.eps = parse_double(value, line);
    else if (key == "q") {
      config.q = static_cast<int>(parse_int(value, line));
      config.q_given = true;
    } else if (key == "kind") {
      const std::string v = trim(value);
      if (v == "single")
        config.kind = ModelKind::single;
      else if (v == "system")
        config.kind = ModelKind::system;
      else
        throw config_error("unknown model kind '" + v + "'", line);
    } else if (key == "kappa1")
      config.kappa1 = parse_double(value, line);
    else if (key == "kappa2")
      config.kappa2 = parse_double(value, line);
    else
      throw bad_key();
  } else if (section == "flow") {
    if (key == "kind") {
      try {
        config.flow.kind = flow_kind_from_string(trim(value));
      } catch (const invalid_argument& err) {
        throw config_error(err.what(), line);
      }
    } else if (key == "A")
      config.flow.amplitude = parse_double(value, line);
    else if (key == "k")
      config.flow.cells = static_cast<int>(parse_int(value, line));
    else if (key == "omega")
      config.flow.time_frequency = parse_double(value, line);
    else
      throw bad_key();
  } else if (section == "run") {
    if (key == "t_end")
      config.t_end = parse_double(value, line);
    else if (key == "record_every")
      config.record_every = parse_double(value, line);
    else if (key == "dt_max")
      config.dt_max = parse_double(value, line);
    else if (key == "seed")
      config.seed = parse_u64(value, line);
    else
      throw bad_key();
  } else if (section == "experiment") {
    if (key == "eps_list")
      config.eps_list = parse_list(value, line);
    else if (key == "chi_list")
      config.chi_list = parse_list(value, line);
    else if (key == "tau_grid")
      config.tau_grid = parse_list(value, line);
    else if (key == "t_lo")
      config.t_lo = parse_double(value, line);
    else if (key == "t_hi")
      config.t_hi = parse_double(value, line);
    else
      throw bad_key();
  } else if (section.rfind("initial.", 0) == 0) {
    const std::string index_text = section.substr(8);
    int index = 0;
    try {
      index = static_cast<int>(parse_int(index_text, line));
    } catch (const config_error&) {
      throw config_error("bad initial section '[" + section + "]'", line);
    }
    if (index < 1 || index > 64)
      throw config_error("initial blob index out of range", line);
    if (static_cast<int>(config.initial.size()) < index)
      config.initial.resize(index);
    ConfigInitial& blob = config.initial[index - 1];
    if (key == "mass")
      blob.blob.mass = parse_double(value, line);
    else if (key == "sigma")
      blob.blob.sigma = parse_double(value, line);
    else if (key == "center_x")
      blob.blob.center_x = parse_double(value, line);
    else if (key == "center_y")
      blob.blob.center_y = parse_double(value, line);
    else if (key == "species")
      blob.species = static_cast<int>(parse_int(value, line));
    else
      throw bad_key();
  } else {
    throw config_error("unknown section '[" + section + "]'", line);
  }
}

}  // namespace detail

// Re-validates every referenced module invariant; throws config_error
// naming the violated one.
inline void validate_config(const Config& config) {
  auto fail = [](const std::string& what) -> config_error {
    return config_error(what, 0);
  };
  if (config.n < 16 || (config.n & (config.n - 1)) != 0)
    throw fail("grid n must be a power of two >= 16");
  if (!(config.box_size > 0.0)) throw fail("grid L must be > 0");
  if (config.chi < 0.0) throw fail("chi must be >= 0");
  if (config.eps < 0.0) throw fail("eps must be >= 0");
  if (config.kind == ModelKind::single) {
    if (config.q < 3) throw fail("q must be an integer >= 3");
  } else {
    if (config.q < 4 || config.q % 2 != 0)
      throw fail("system q must be an even integer >= 4");
  }
  if (!(config.kappa1 > 0.0) || !(config.kappa2 > 0.0))
    throw fail("kappa1 and kappa2 must be > 0");
  if (config.flow.amplitude < 0.0) throw fail("flow A must be >= 0");
  if (config.flow.cells < 1) throw fail("flow k must be >= 1");
  if (config.flow.time_frequency < 0.0) throw fail("flow omega must be >= 0");
  if (config.t_end < 0.0) throw fail("t_end must be >= 0");
  if (!(config.record_every > 0.0)) throw fail("record_every must be > 0");
  if (!(config.dt_max > 0.0)) throw fail("dt_max must be > 0");
  if (!(config.t_lo > 0.0) || !(config.t_hi > config.t_lo))
    throw fail("decay window needs 0 < t_lo < t_hi");
  const double dx = config.box_size / config.n;
  for (const ConfigInitial& init : config.initial) {
    if (!(init.blob.mass > 0.0)) throw fail("blob mass must be > 0");
    if (!(init.blob.sigma >= 4.0 * dx))
      throw fail("blob sigma must be >= 4*dx (resolvable)");
    if (init.species < 1 ||
        init.species > (config.kind == ModelKind::system ? 2 : 1))
      throw fail("blob species index invalid for the model kind");
  }
  if (config.kind == ModelKind::system) {
    bool has1 = false, has2 = false;
    for (const ConfigInitial& init : config.initial) {
      has1 = has1 || init.species == 1;
      has2 = has2 || init.species == 2;
    }
    if (!has1 || !has2)
      throw fail("system runs need initial blobs for both species");
  }
}

inline Config parse_config(const std::string& text) {
  Config config;
  std::string section;
  int line_number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_number;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = detail::trim(line);
    if (t.empty()) {
      if (pos > text.size()) break;
      continue;
    }
    if (t.front() == '[') {
      if (t.back() != ']')
        throw config_error("unterminated section header", line_number);
      section = detail::trim(t.substr(1, t.size() - 2));
      if (section.empty())
        throw config_error("empty section name", line_number);
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw config_error("expected 'key = value'", line_number);
    if (section.empty())
      throw config_error("key outside any [section]", line_number);
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string value = detail::trim(t.substr(eq + 1));
    if (key.empty()) throw config_error("empty key", line_number);
    detail::apply_key(config, section, key, value, line_number);
    if (pos > text.size()) break;
  }
  if (config.kind == ModelKind::system && !config.q_given) config.q = 4;
  validate_config(config);
  return config;
}

// Dotted override "section.key=value" (initial blobs: "initial.1.mass=2").
inline void apply_override(Config& config, const std::string& text) {
  const std::size_t eq = text.find('=');
  if (eq == std::string::npos)
    throw config_error("override must look like section.key=value", 0);
  const std::string path = detail::trim(text.substr(0, eq));
  const std::string value = detail::trim(text.substr(eq + 1));
  const std::size_t dot = path.rfind('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == path.size())
    throw config_error("override must look like section.key=value", 0);
  const std::string section = path.substr(0, dot);
  const std::string key = path.substr(dot + 1);
  detail::apply_key(config, section, key, value, 0);
  if (config.kind == ModelKind::system && !config.q_given) config.q = 4;
  validate_config(config);
}

namespace detail {

// Shortest representation that parses back to the identical double.
inline std::string format_number(double value) {
  char buffer[32];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  (void)ec;
  return std::string(buffer, ptr);
}

inline std::string format_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_number(values[i]);
  }
  return out;
}

}  // namespace detail

// Emits text such that parse_config(render_config(c)) == c.
inline std::string render_config(const Config& config) {
  using detail::format_number;
  std::string out;
  out += "[grid]\n";
  out += "n = " + std::to_string(config.n) + "\n";
  out += "L = " + format_number(config.box_size) + "\n";
  out += "\n[model]\n";
  out += std::string("kind = ") +
         (config.kind == ModelKind::single ? "single" : "system") + "\n";
  out += "chi = " + format_number(config.chi) + "\n";
  out += "eps = " + format_number(config.eps) + "\n";
  if (config.q_given || config.kind == ModelKind::system ||
      config.q != 3)
    out += "q = " + std::to_string(config.q) + "\n";
  out += "kappa1 = " + format_number(config.kappa1) + "\n";
  out += "kappa2 = " + format_number(config.kappa2) + "\n";
  out += "\n[flow]\n";
  out += "kind = " + to_string(config.flow.kind) + "\n";
  out += "A = " + format_number(config.flow.amplitude) + "\n";
  out += "k = " + std::to_string(config.flow.cells) + "\n";
  out += "omega = " + format_number(config.flow.time_frequency) + "\n";
  for (std::size_t i = 0; i < config.initial.size(); ++i) {
    const ConfigInitial& init = config.initial[i];
    out += "\n[initial." + std::to_string(i + 1) + "]\n";
    out += "mass = " + format_number(init.blob.mass) + "\n";
    out += "sigma = " + format_number(init.blob.sigma) + "\n";
    if (!std::isnan(init.blob.center_x))
      out += "center_x = " + format_number(init.blob.center_x) + "\n";
    if (!std::isnan(init.blob.center_y))
      out += "center_y = " + format_number(init.blob.center_y) + "\n";
    out += "species = " + std::to_string(init.species) + "\n";
  }
  out += "\n[run]\n";
  out += "t_end = " + format_number(config.t_end) + "\n";
  out += "record_every = " + format_number(config.record_every) + "\n";
  out += "dt_max = " + format_number(config.dt_max) + "\n";
  out += "seed = " + std::to_string(config.seed) + "\n";
  const bool any_experiment = !config.eps_list.empty() ||
                              !config.chi_list.empty() ||
                              !config.tau_grid.empty() ||
                              config.t_lo != 1.0 || config.t_hi != 20.0;
  if (any_experiment) {
    out += "\n[experiment]\n";
    if (!config.eps_list.empty())
      out += "eps_list = " + detail::format_list(config.eps_list) + "\n";
    if (!config.chi_list.empty())
      out += "chi_list = " + detail::format_list(config.chi_list) + "\n";
    if (!config.tau_grid.empty())
      out += "tau_grid = " + detail::format_list(config.tau_grid) + "\n";
    out += "t_lo = " + format_number(config.t_lo) + "\n";
    out += "t_hi = " + format_number(config.t_hi) + "\n";
  }
  return out;
}

inline ModelParams to_model_params(const Config& config) {
  ModelParams params;
  params.chi = config.chi;
  params.eps = config.eps;
  params.q = config.q;
  params.kappa = config.kappa1;
  params.flow = config.flow;
  params.dt_max = config.dt_max;
  return params;
}

inline SystemParams to_system_params(const Config& config) {
  SystemParams params;
  params.eps = config.eps;
  params.q = config.q;
  params.kappa1 = config.kappa1;
  params.kappa2 = config.kappa2;
  params.flow = config.flow;
  params.dt_max = config.dt_max;
  return params;
}

inline std::vector<GaussianSpec> initial_blobs(const Config& config,
                                               int species) {
  std::vector<GaussianSpec> blobs;
  if (config.initial.empty()) {
    if (species == 1) blobs.push_back(GaussianSpec{});
    return blobs;
  }
  for (const ConfigInitial& init : config.initial)
    if (init.species == species) blobs.push_back(init.blob);
  return blobs;
}

inline ScenarioConfig to_scenario(const Config& config) {
  if (config.kind != ModelKind::single)
    throw invalid_argument("scenario conversion requires kind = single");
  ScenarioConfig scenario{make_grid(config.n, config.box_size),
                          to_model_params(config), initial_blobs(config, 1),
                          config.t_end, config.record_every};
  return scenario;
}

}  // namespace chemflow
