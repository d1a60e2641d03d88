#pragma once

// Small standalone SVG plots. They are a convenience for eyeballing runs;
// the CSV files are the actual output.

#include <algorithm>
#include <cmath>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "zdyn/cli/csv.hpp"

namespace zdyn::cli {

namespace detail {

struct Frame {
  double x0, x1, y0, y1;
  static constexpr double kSize = 480.0;
  static constexpr double kPad = 40.0;

  double px(double x) const { return kPad + (x - x0) / (x1 - x0) * (kSize - 2 * kPad); }
  double py(double y) const { return kSize - kPad - (y - y0) / (y1 - y0) * (kSize - 2 * kPad); }
};

inline Frame frame_for(std::span<const double> xs, std::span<const double> ys, bool square) {
  auto finite_range = [](std::span<const double> v) {
    double lo = INFINITY, hi = -INFINITY;
    for (double d : v)
      if (std::isfinite(d)) {
        lo = std::min(lo, d);
        hi = std::max(hi, d);
      }
    if (!(lo <= hi)) return std::pair{-1.0, 1.0};
    if (hi - lo < 1e-300) return std::pair{lo - 1.0, hi + 1.0};
    return std::pair{lo, hi};
  };
  auto [x0, x1] = finite_range(xs);
  auto [y0, y1] = finite_range(ys);
  if (square) {
    const double half = 0.5 * std::max(x1 - x0, y1 - y0);
    const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
    return {cx - half, cx + half, cy - half, cy + half};
  }
  return {x0, x1, y0, y1};
}

inline void header(std::ostream& os, const std::string& title) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"480\" viewBox=\"0 0 480 480\">\n"
     << "<rect width=\"480\" height=\"480\" fill=\"white\"/>\n"
     << "<text x=\"240\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" << title
     << "</text>\n";
}

inline void polyline(std::ostream& os, const Frame& f, std::span<const double> xs, std::span<const double> ys,
                     const std::string& colour) {
  os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) continue;
    os << format_double(f.px(xs[i])) << ',' << format_double(f.py(ys[i])) << ' ';
  }
  os << "\"/>\n";
}

}  // namespace detail

/// x-y phase portrait of a scalar game run, with the start marked in red
/// and the equilibrium (origin) as a cross when it is in view.
inline void write_phase_portrait(std::ostream& os, std::span<const double> xs, std::span<const double> ys,
                                 const std::string& title) {
  const auto f = detail::frame_for(xs, ys, true);
  detail::header(os, title);
  detail::polyline(os, f, xs, ys, "steelblue");
  if (!xs.empty())
    os << "<circle cx=\"" << format_double(f.px(xs[0])) << "\" cy=\"" << format_double(f.py(ys[0]))
       << "\" r=\"4\" fill=\"crimson\"/>\n";
  if (f.x0 <= 0 && 0 <= f.x1 && f.y0 <= 0 && 0 <= f.y1) {
    const double ox = f.px(0), oy = f.py(0);
    os << "<path d=\"M" << format_double(ox - 5) << ',' << format_double(oy) << " h10 M" << format_double(ox) << ','
       << format_double(oy - 5) << " v10\" stroke=\"black\"/>\n";
  }
  os << "</svg>\n";
}

/// Line plot of one or more series sharing the x values; NaN entries are skipped.
inline void write_line_plot(std::ostream& os, std::span<const double> xs,
                            const std::vector<std::pair<std::string, std::vector<double>>>& series,
                            const std::string& title) {
  std::vector<double> all;
  for (const auto& s : series) all.insert(all.end(), s.second.begin(), s.second.end());
  std::vector<double> xs_rep;
  for (std::size_t i = 0; i < series.size(); ++i) xs_rep.insert(xs_rep.end(), xs.begin(), xs.end());
  const auto f = detail::frame_for(xs_rep, all, false);
  detail::header(os, title);
  const char* colours[] = {"steelblue", "darkorange", "seagreen", "purple"};
  for (std::size_t i = 0; i < series.size(); ++i) {
    detail::polyline(os, f, xs, series[i].second, colours[i % 4]);
    os << "<text x=\"48\" y=\"" << 44 + 16 * i << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
       << colours[i % 4] << "\">" << series[i].first << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace zdyn::cli
