#include "selfsep/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <vector>

#include "selfsep/error.hpp"

namespace selfsep {

namespace {

constexpr double kWidth = 820.0;
constexpr double kHeight = 520.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 650.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 460.0;

const char* method_color(Method method) {
  switch (method) {
    case Method::lw_hf: return "#1f77b4";
    case Method::lw_mf: return "#ff7f0e";
    case Method::map_hf: return "#2ca02c";
    case Method::map_mf: return "#d62728";
    case Method::bayes_mf: return "#9467bd";
  }
  return "#000000";
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

struct Series {
  std::string scenario;
  Method method = Method::lw_hf;
  std::vector<const CurvePoint*> points;
};

}  // namespace

std::string render_curves_svg(std::span<const CurvePoint> curves,
                              const std::string& title) {
  require(!curves.empty(), ErrorCode::invalid_argument, "no curves to plot");

  std::vector<Series> series;
  std::set<std::string> scenarios;
  double x_min = 1e300;
  double x_max = -1e300;
  double y_max = 1.05;
  for (const auto& c : curves) {
    scenarios.insert(c.scenario);
    auto it = std::find_if(series.begin(), series.end(), [&](const Series& s) {
      return s.method == c.method && s.scenario == c.scenario;
    });
    if (it == series.end()) {
      series.push_back(Series{c.scenario, c.method, {}});
      it = series.end() - 1;
    }
    if (!c.mean_efficiency) continue;
    it->points.push_back(&c);
    x_min = std::min(x_min, static_cast<double>(c.n_high));
    x_max = std::max(x_max, static_cast<double>(c.n_high));
    y_max = std::max(y_max, (*c.mean_efficiency + c.std_error) * 1.05);
  }
  require(x_min <= x_max, ErrorCode::invalid_argument,
          "no numeric efficiencies to plot");
  if (x_min == x_max) {
    x_min *= 0.9;
    x_max *= 1.1;
  }
  const double lx_min = std::log(x_min);
  const double lx_max = std::log(x_max);

  const auto to_x = [&](double n_high) {
    return kLeft + (std::log(n_high) - lx_min) / (lx_max - lx_min) *
                       (kRight - kLeft);
  };
  const auto to_y = [&](double eff) {
    return kBottom - eff / y_max * (kBottom - kTop);
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) +
         "\" height=\"" + num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) +
         " " + num(kHeight) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num((kLeft + kRight) / 2) +
         "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">" + title + "</text>\n";

  // Axes.
  svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kBottom) + "\" x2=\"" +
         num(kRight) + "\" y2=\"" + num(kBottom) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" +
         num(kLeft) + "\" y2=\"" + num(kBottom) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";

  // X ticks at every sample count present in the data.
  std::set<int> x_ticks;
  for (const auto& c : curves) {
    if (c.mean_efficiency) x_ticks.insert(c.n_high);
  }
  for (const int tick : x_ticks) {
    const double x = to_x(tick);
    svg += "<line x1=\"" + num(x) + "\" y1=\"" + num(kBottom) + "\" x2=\"" +
           num(x) + "\" y2=\"" + num(kBottom + 5) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num(x) + "\" y=\"" + num(kBottom + 20) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\">" + std::to_string(tick) + "</text>\n";
  }
  svg += "<text x=\"" + num((kLeft + kRight) / 2) + "\" y=\"" +
         num(kBottom + 45) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">high-fidelity training samples (log scale)</text>\n";

  // Y ticks, six even divisions.
  for (int i = 0; i <= 5; ++i) {
    const double value = y_max * static_cast<double>(i) / 5.0;
    const double y = to_y(value);
    svg += "<line x1=\"" + num(kLeft - 5) + "\" y1=\"" + num(y) + "\" x2=\"" +
           num(kLeft) + "\" y2=\"" + num(y) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(y) + "\" x2=\"" +
           num(kRight) + "\" y2=\"" + num(y) +
           "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
    svg += "<text x=\"" + num(kLeft - 10) + "\" y=\"" + num(y + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"12\">" + num(value) + "</text>\n";
  }
  svg += "<text x=\"18\" y=\"" + num((kTop + kBottom) / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\" transform=\"rotate(-90 18 " +
         num((kTop + kBottom) / 2) + ")\">predictive efficiency</text>\n";

  // Error bands first so every polyline draws above them.
  for (const auto& s : series) {
    if (s.points.size() < 2) continue;
    std::string poly;
    for (const auto* p : s.points) {
      poly += num(to_x(p->n_high)) + "," +
              num(to_y(*p->mean_efficiency + p->std_error)) + " ";
    }
    for (auto it = s.points.rbegin(); it != s.points.rend(); ++it) {
      poly += num(to_x((*it)->n_high)) + "," +
              num(to_y(*(*it)->mean_efficiency - (*it)->std_error)) + " ";
    }
    svg += "<polygon points=\"" + poly + "\" fill=\"" +
           method_color(s.method) + "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
  }

  for (const auto& s : series) {
    if (s.points.empty()) continue;
    std::string poly;
    for (const auto* p : s.points) {
      poly += num(to_x(p->n_high)) + "," + num(to_y(*p->mean_efficiency)) + " ";
    }
    svg += "<polyline points=\"" + poly + "\" fill=\"none\" stroke=\"" +
           method_color(s.method) + "\" stroke-width=\"2\"/>\n";
    for (const auto* p : s.points) {
      svg += "<circle cx=\"" + num(to_x(p->n_high)) + "\" cy=\"" +
             num(to_y(*p->mean_efficiency)) + "\" r=\"3\" fill=\"" +
             method_color(s.method) + "\"/>\n";
    }
  }

  // Legend.
  double legend_y = kTop + 10;
  for (const auto& s : series) {
    const std::string label = scenarios.size() > 1
                                  ? s.scenario + " " + to_string(s.method)
                                  : std::string(to_string(s.method));
    svg += "<line x1=\"" + num(kRight + 15) + "\" y1=\"" + num(legend_y) +
           "\" x2=\"" + num(kRight + 45) + "\" y2=\"" + num(legend_y) +
           "\" stroke=\"" + method_color(s.method) + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + num(kRight + 52) + "\" y=\"" + num(legend_y + 4) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + label +
           "</text>\n";
    legend_y += 20;
  }

  svg += "</svg>\n";
  return svg;
}

}  // namespace selfsep
