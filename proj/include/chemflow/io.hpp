#pragma once

// Result persistence and plotting.
//
//  * records CSV    — fixed 11-column schema, 17-significant-digit decimal
//                     text (preserves binary64 exactly); the residual
//                     columns of a row describe the interval ending at that
//                     row, so row 0 leaves them empty.
//  * field dump     — one ASCII header line "BMX1 n=<n> L=<L> t=<t>
//                     name=<name>\n" followed by n*n IEEE-754 binary64
//                     little-endian values, row-major with y outer.
//                     Round-trips bit-identically.
//  * SVG plots      — self-contained, no external dependency, byte-
//                     deterministic for identical input.

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "chemflow/diagnostics.hpp"
#include "chemflow/errors.hpp"
#include "chemflow/field.hpp"
#include "chemflow/grid.hpp"

namespace chemflow {

namespace detail {

// Shortest decimal that parses back to the identical double ("20", "0.5").
inline std::string shortest_number(double value) {
  char buffer[32];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  (void)ec;
  return std::string(buffer, ptr);
}

// 17 significant digits: always enough to reconstruct the exact binary64.
inline std::string csv_number(double value) {
  char buffer[48];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                 std::chars_format::general, 17);
  (void)ec;
  return std::string(buffer, ptr);
}

inline void write_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw error("cannot open '" + path + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw error("write failed for '" + path + "'");
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("cannot open '" + path + "' for reading");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return text;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Records CSV

inline constexpr std::string_view records_csv_header =
    "t,m0,m2,l1,l2,lq,linf,min_val,res_mass,res_eq45,res_eq410";

inline std::string render_records_csv(
    const std::vector<DiagnosticsRecord>& records,
    const ResidualSeries* residuals = nullptr) {
  using detail::csv_number;
  std::string out(records_csv_header);
  out += '\n';
  for (std::size_t i = 0; i < records.size(); ++i) {
    const DiagnosticsRecord& r = records[i];
    out += csv_number(r.t);
    out += ',';
    out += csv_number(r.m0);
    out += ',';
    out += csv_number(r.m2);
    out += ',';
    out += csv_number(r.lp1);
    out += ',';
    out += csv_number(r.lp2);
    out += ',';
    out += csv_number(r.lpq);
    out += ',';
    out += csv_number(r.lpinf);
    out += ',';
    out += csv_number(r.min_val);
    const bool have = residuals != nullptr && i >= 1 &&
                      i - 1 < residuals->res_mass.size();
    if (have) {
      out += ',';
      out += csv_number(residuals->res_mass[i - 1]);
      out += ',';
      out += csv_number(residuals->res_m2[i - 1]);
      out += ',';
      out += csv_number(residuals->res_lq[i - 1]);
    } else {
      out += ",,,";
    }
    out += '\n';
  }
  return out;
}

inline void write_records_csv(const std::vector<DiagnosticsRecord>& records,
                              const std::string& path,
                              const ResidualSeries* residuals = nullptr) {
  detail::write_file(path, render_records_csv(records, residuals));
}

// ---------------------------------------------------------------------------
// Binary field dump

struct FieldDump {
  Field field;
  double t = 0.0;
  std::string name;
};

inline void write_field(const Field& f, double t, const std::string& name,
                        const std::string& path) {
  if (name.empty() ||
      name.find_first_of(" \t\n\r") != std::string::npos)
    throw invalid_argument("field name must be nonempty without whitespace");
  std::string out = "BMX1 n=" + std::to_string(f.grid.n) +
                    " L=" + detail::shortest_number(f.grid.box_size) +
                    " t=" + detail::shortest_number(t) + " name=" + name +
                    "\n";
  out.reserve(out.size() + f.values.size() * 8);
  for (double v : f.values) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int byte = 0; byte < 8; ++byte)
      out.push_back(static_cast<char>((bits >> (8 * byte)) & 0xff));
  }
  detail::write_file(path, out);
}

inline FieldDump read_field(const std::string& path) {
  const std::string text = detail::read_file(path);
  const std::size_t eol = text.find('\n');
  if (eol == std::string::npos || text.compare(0, 5, "BMX1 ") != 0)
    throw error("'" + path + "' is not a BMX1 field dump");
  const std::string header = text.substr(0, eol);
  auto take = [&](const std::string& key) -> std::string {
    const std::string tag = " " + key + "=";
    const std::size_t at = header.find(tag);
    if (at == std::string::npos)
      throw error("BMX1 header missing '" + key + "' in '" + path + "'");
    const std::size_t begin = at + tag.size();
    const std::size_t end = header.find(' ', begin);
    return header.substr(begin, end == std::string::npos ? std::string::npos
                                                         : end - begin);
  };
  auto parse_double = [&](const std::string& s) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
      throw error("BMX1 header has malformed number '" + s + "'");
    return v;
  };
  const int n = static_cast<int>(parse_double(take("n")));
  const double box_size = parse_double(take("L"));
  const double t = parse_double(take("t"));
  const std::string name = take("name");
  const std::size_t count = static_cast<std::size_t>(n) * n;
  if (text.size() - (eol + 1) != count * 8)
    throw error("BMX1 payload size mismatch in '" + path + "'");
  FieldDump dump{Field(make_grid(n, box_size)), t, name};
  const char* bytes = text.data() + eol + 1;
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits = 0;
    for (int byte = 0; byte < 8; ++byte)
      bits |= static_cast<std::uint64_t>(
                  static_cast<unsigned char>(bytes[8 * i + byte]))
              << (8 * byte);
    dump.field.values[i] = std::bit_cast<double>(bits);
  }
  return dump;
}

// ---------------------------------------------------------------------------
// SVG plots

struct PlotSeries {
  std::vector<double> xs;
  std::vector<double> ys;
  std::string label;
};

struct PlotAxes {
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::string annotation;  // e.g. "slope = -0.93", drawn inside the frame
};

namespace detail {

inline constexpr std::array<std::string_view, 8> plot_palette = {
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

// Fixed two-decimal pixel coordinates keep the output deterministic.
inline std::string pixel(double value) {
  char buffer[32];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                 std::chars_format::fixed, 2);
  (void)ec;
  return std::string(buffer, ptr);
}

inline std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '&')
      out += "&amp;";
    else if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else
      out.push_back(c);
  }
  return out;
}

struct PlotRange {
  double lo = 0.0;
  double hi = 1.0;
};

// ~5 round tick positions covering [lo, hi] on a linear axis.
inline std::vector<double> linear_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> ticks;
  double v = std::ceil(lo / step) * step;
  for (; v <= hi + 1e-9 * span; v += step) {
    if (std::abs(v) < 1e-12 * span) v = 0.0;
    ticks.push_back(v);
  }
  return ticks;
}

// Decade ticks for a log axis (values are log10 already); thinned to <= 6.
inline std::vector<double> decade_ticks(double lo, double hi) {
  std::vector<double> ticks;
  const int first = static_cast<int>(std::ceil(lo - 1e-9));
  const int last = static_cast<int>(std::floor(hi + 1e-9));
  int stride = 1;
  while ((last - first) / stride + 1 > 6) ++stride;
  for (int d = first; d <= last; d += stride)
    ticks.push_back(static_cast<double>(d));
  if (ticks.empty()) {
    ticks.push_back(lo);
    ticks.push_back(hi);
  }
  return ticks;
}

inline std::string tick_label(double value, bool log_axis) {
  if (log_axis) {
    const double rounded = std::round(value);
    if (std::abs(value - rounded) < 1e-9)
      return shortest_number(std::pow(10.0, rounded));
    return shortest_number(std::pow(10.0, value));
  }
  // Trim float-noise on linear ticks ("0.30000000000000004" -> "0.3").
  char buffer[32];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                 std::chars_format::general, 6);
  (void)ec;
  return std::string(buffer, ptr);
}

}  // namespace detail

inline std::string render_plot(const std::vector<PlotSeries>& series,
                               const PlotAxes& axes) {
  if (series.empty()) throw invalid_argument("plot needs at least one series");
  for (const PlotSeries& s : series) {
    if (s.xs.empty() || s.xs.size() != s.ys.size())
      throw invalid_argument("plot series needs matching nonempty x/y data");
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i]))
        throw invalid_argument("plot data must be finite");
      if ((axes.log_x && s.xs[i] <= 0.0) || (axes.log_y && s.ys[i] <= 0.0))
        throw invalid_argument("log axes need strictly positive data");
    }
  }
  auto tx = [&](double v) { return axes.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return axes.log_y ? std::log10(v) : v; };
  detail::PlotRange rx{tx(series[0].xs[0]), tx(series[0].xs[0])};
  detail::PlotRange ry{ty(series[0].ys[0]), ty(series[0].ys[0])};
  for (const PlotSeries& s : series)
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      rx.lo = std::min(rx.lo, tx(s.xs[i]));
      rx.hi = std::max(rx.hi, tx(s.xs[i]));
      ry.lo = std::min(ry.lo, ty(s.ys[i]));
      ry.hi = std::max(ry.hi, ty(s.ys[i]));
    }
  auto pad = [](detail::PlotRange& r) {
    double margin = 0.05 * (r.hi - r.lo);
    if (margin <= 0.0) margin = r.lo == 0.0 ? 0.5 : 0.1 * std::abs(r.lo);
    r.lo -= margin;
    r.hi += margin;
  };
  pad(rx);
  pad(ry);

  constexpr double width = 640.0, height = 480.0;
  constexpr double left = 72.0, right = 616.0, top = 24.0, bottom = 432.0;
  auto px = [&](double v) {
    return left + (tx(v) - rx.lo) / (rx.hi - rx.lo) * (right - left);
  };
  auto py = [&](double v) {
    return bottom - (ty(v) - ry.lo) / (ry.hi - ry.lo) * (bottom - top);
  };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" "
         "height=\"480\" viewBox=\"0 0 640 480\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" "
         "fill=\"white\"/>\n";
  svg += "<rect x=\"" + detail::pixel(left) + "\" y=\"" + detail::pixel(top) +
         "\" width=\"" + detail::pixel(right - left) + "\" height=\"" +
         detail::pixel(bottom - top) +
         "\" fill=\"none\" stroke=\"black\"/>\n";

  const std::vector<double> xticks =
      axes.log_x ? detail::decade_ticks(rx.lo, rx.hi)
                 : detail::linear_ticks(rx.lo, rx.hi);
  const std::vector<double> yticks =
      axes.log_y ? detail::decade_ticks(ry.lo, ry.hi)
                 : detail::linear_ticks(ry.lo, ry.hi);
  for (double t : xticks) {
    const double x = left + (t - rx.lo) / (rx.hi - rx.lo) * (right - left);
    svg += "<line x1=\"" + detail::pixel(x) + "\" y1=\"" +
           detail::pixel(bottom) + "\" x2=\"" + detail::pixel(x) +
           "\" y2=\"" + detail::pixel(bottom + 6.0) +
           "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + detail::pixel(x) + "\" y=\"" +
           detail::pixel(bottom + 20.0) +
           "\" font-family=\"monospace\" font-size=\"12\" "
           "text-anchor=\"middle\">" +
           detail::xml_escape(detail::tick_label(t, axes.log_x)) +
           "</text>\n";
  }
  for (double t : yticks) {
    const double y = bottom - (t - ry.lo) / (ry.hi - ry.lo) * (bottom - top);
    svg += "<line x1=\"" + detail::pixel(left - 6.0) + "\" y1=\"" +
           detail::pixel(y) + "\" x2=\"" + detail::pixel(left) + "\" y2=\"" +
           detail::pixel(y) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + detail::pixel(left - 10.0) + "\" y=\"" +
           detail::pixel(y + 4.0) +
           "\" font-family=\"monospace\" font-size=\"12\" "
           "text-anchor=\"end\">" +
           detail::xml_escape(detail::tick_label(t, axes.log_y)) +
           "</text>\n";
  }
  svg += "<text x=\"" + detail::pixel((left + right) / 2.0) + "\" y=\"" +
         detail::pixel(height - 12.0) +
         "\" font-family=\"monospace\" font-size=\"14\" "
         "text-anchor=\"middle\">" +
         detail::xml_escape(axes.x_label) + "</text>\n";
  svg += "<text x=\"18\" y=\"" + detail::pixel((top + bottom) / 2.0) +
         "\" font-family=\"monospace\" font-size=\"14\" "
         "text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         detail::pixel((top + bottom) / 2.0) + ")\">" +
         detail::xml_escape(axes.y_label) + "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const std::string_view color =
        detail::plot_palette[s % detail::plot_palette.size()];
    std::string points;
    for (std::size_t i = 0; i < series[s].xs.size(); ++i) {
      if (i) points += ' ';
      points += detail::pixel(px(series[s].xs[i])) + "," +
                detail::pixel(py(series[s].ys[i]));
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
  }

  double legend_y = top + 16.0;
  for (std::size_t s = 0; s < series.size(); ++s) {
    if (series[s].label.empty()) continue;
    const std::string_view color =
        detail::plot_palette[s % detail::plot_palette.size()];
    svg += "<line x1=\"" + detail::pixel(right - 150.0) + "\" y1=\"" +
           detail::pixel(legend_y - 4.0) + "\" x2=\"" +
           detail::pixel(right - 126.0) + "\" y2=\"" +
           detail::pixel(legend_y - 4.0) + "\" stroke=\"" +
           std::string(color) + "\" stroke-width=\"1.5\"/>\n";
    svg += "<text x=\"" + detail::pixel(right - 120.0) + "\" y=\"" +
           detail::pixel(legend_y) +
           "\" font-family=\"monospace\" font-size=\"12\">" +
           detail::xml_escape(series[s].label) + "</text>\n";
    legend_y += 16.0;
  }
  if (!axes.annotation.empty()) {
    svg += "<text x=\"" + detail::pixel(left + 10.0) + "\" y=\"" +
           detail::pixel(top + 16.0) +
           "\" font-family=\"monospace\" font-size=\"12\">" +
           detail::xml_escape(axes.annotation) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

inline void emit_plot(const std::vector<PlotSeries>& series,
                      const PlotAxes& axes, const std::string& path) {
  detail::write_file(path, render_plot(series, axes));
}

// ---------------------------------------------------------------------------
// Human-readable reports

inline std::string render_bounds_report(const BoundsReport& report) {
  std::string out;
  for (const BoundCheck& check : report.checks) {
    out += check.name;
    out += check.applicable ? (check.pass ? ": pass" : ": FAIL")
                            : ": not applicable";
    if (check.applicable) {
      out += " (worst margin " + detail::shortest_number(check.worst_margin) +
             " at t=" + detail::shortest_number(check.t_worst) + ")";
    }
    out += '\n';
  }
  return out;
}

}  // namespace chemflow
