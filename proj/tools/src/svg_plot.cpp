#include "lmdp_cli/svg_plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>

#include "lmdp/curriculum.hpp"

namespace lmdp::cli {
namespace {

constexpr double kPanelWidth = 360.0;
constexpr double kPanelHeight = 260.0;
constexpr double kMarginLeft = 64.0;
constexpr double kMarginTop = 40.0;
constexpr double kGap = 70.0;
constexpr double kLegendHeight = 26.0;

constexpr std::array<const char*, 9> kColors = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                                "#8c564b", "#e377c2", "#7f7f7f", "#17becf"};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string tick(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

struct Panel {
  std::string title;
  std::function<double(const TrainLogRow&)> value;
  bool band = false;
};

}  // namespace

std::string series_name(const std::vector<TrainLogRow>& rows, const std::string& fallback) {
  if (rows.empty() || rows.front().mode.empty()) return fallback;
  const auto& mode = rows.front().mode;
  return mode.substr(0, mode.find('/'));
}

bool series_dashed(const std::string& scheme) {
  auto parsed = parse_scheme(scheme);
  return parsed ? !scheme_recipe(*parsed).warmup : false;
}

std::string render_svg(const std::vector<PlotSeries>& series) {
  const std::vector<Panel> panels = {
      {"reward", [](const TrainLogRow& r) { return r.reward_mean; }, true},
      {"ln kappa", [](const TrainLogRow& r) { return r.ln_kappa; }, false},
      {"avg err", [](const TrainLogRow& r) { return r.avg_err; }, false},
  };
  const double width = kMarginLeft + panels.size() * (kPanelWidth + kGap);
  const double height = kMarginTop + kPanelHeight + 60.0 + kLegendHeight * (series.size() + 1);

  Range xr;
  for (const auto& s : series)
    for (const auto& r : s.rows) xr.add(static_cast<double>(r.samples_cumulative));
  xr.finish();

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\""
      << fmt(height) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (std::size_t p = 0; p < panels.size(); ++p) {
    const auto& panel = panels[p];
    const double x0 = kMarginLeft + p * (kPanelWidth + kGap);
    const double y0 = kMarginTop;
    Range yr;
    bool has_inf = false;
    for (const auto& s : series)
      for (const auto& r : s.rows) {
        const double v = panel.value(r);
        if (std::isinf(v)) has_inf = true;
        yr.add(v);
        if (panel.band && std::isfinite(v) && std::isfinite(r.reward_ci95)) {
          yr.add(v - r.reward_ci95);
          yr.add(v + r.reward_ci95);
        }
      }
    yr.finish();
    auto sx = [&](double x) { return x0 + (x - xr.lo) / (xr.hi - xr.lo) * kPanelWidth; };
    auto sy = [&](double y) { return y0 + kPanelHeight - (y - yr.lo) / (yr.hi - yr.lo) * kPanelHeight; };

    svg << "<g class=\"panel\" id=\"panel-" << p << "\">\n";
    svg << "<text x=\"" << fmt(x0 + kPanelWidth / 2) << "\" y=\"" << fmt(y0 - 14)
        << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(panel.title) << "</text>\n";
    svg << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y0) << "\" width=\"" << fmt(kPanelWidth)
        << "\" height=\"" << fmt(kPanelHeight) << "\" fill=\"none\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fmt(x0 - 4) << "\" y=\"" << fmt(y0 + 4) << "\" text-anchor=\"end\">"
        << tick(yr.hi) << "</text>\n";
    svg << "<text x=\"" << fmt(x0 - 4) << "\" y=\"" << fmt(y0 + kPanelHeight) << "\" text-anchor=\"end\">"
        << tick(yr.lo) << "</text>\n";
    svg << "<text x=\"" << fmt(x0) << "\" y=\"" << fmt(y0 + kPanelHeight + 14) << "\">" << tick(xr.lo)
        << "</text>\n";
    svg << "<text x=\"" << fmt(x0 + kPanelWidth) << "\" y=\"" << fmt(y0 + kPanelHeight + 14)
        << "\" text-anchor=\"end\">" << tick(xr.hi) << "</text>\n";
    svg << "<text x=\"" << fmt(x0 + kPanelWidth / 2) << "\" y=\"" << fmt(y0 + kPanelHeight + 30)
        << "\" text-anchor=\"middle\" font-size=\"9\">number of trajectories, i.e., number of episodes"
           " × horizon × batch size</text>\n";
    if (has_inf)
      svg << "<text class=\"inf-note\" x=\"" << fmt(x0 + kPanelWidth - 4) << "\" y=\"" << fmt(y0 + 12)
          << "\" text-anchor=\"end\" font-size=\"9\">▲ = +inf (clipped)</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
      const auto& s = series[k];
      const char* color = kColors[k % kColors.size()];
      if (panel.band) {
        std::ostringstream upper, lower;
        int count = 0;
        for (const auto& r : s.rows) {
          if (!std::isfinite(r.reward_mean) || !std::isfinite(r.reward_ci95)) continue;
          const double x = sx(static_cast<double>(r.samples_cumulative));
          upper << fmt(x) << ',' << fmt(sy(r.reward_mean + r.reward_ci95)) << ' ';
          ++count;
        }
        for (auto it = s.rows.rbegin(); it != s.rows.rend(); ++it) {
          if (!std::isfinite(it->reward_mean) || !std::isfinite(it->reward_ci95)) continue;
          lower << fmt(sx(static_cast<double>(it->samples_cumulative))) << ','
                << fmt(sy(it->reward_mean - it->reward_ci95)) << ' ';
        }
        if (count >= 2)
          svg << "<polygon class=\"ci-band\" points=\"" << upper.str() << lower.str() << "\" fill=\""
              << color << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
      }
      std::vector<std::pair<double, double>> pts;
      std::vector<double> inf_x;
      for (const auto& r : s.rows) {
        const double v = panel.value(r);
        const double x = sx(static_cast<double>(r.samples_cumulative));
        if (std::isfinite(v))
          pts.emplace_back(x, sy(v));
        else if (v > 0 && std::isinf(v))
          inf_x.push_back(x);
      }
      if (pts.size() >= 2) {
        svg << "<polyline class=\"series\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
        if (s.dashed) svg << " stroke-dasharray=\"6,4\"";
        svg << " points=\"";
        for (const auto& [x, y] : pts) svg << fmt(x) << ',' << fmt(y) << ' ';
        svg << "\"/>\n";
      } else if (pts.size() == 1) {
        svg << "<circle class=\"point\" cx=\"" << fmt(pts[0].first) << "\" cy=\"" << fmt(pts[0].second)
            << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      }
      for (double x : inf_x)
        svg << "<path class=\"inf-marker\" d=\"M" << fmt(x - 3) << ',' << fmt(y0 + 5) << " L" << fmt(x + 3)
            << ',' << fmt(y0 + 5) << " L" << fmt(x) << ',' << fmt(y0) << " Z\" fill=\"" << color << "\"/>\n";
    }
    svg << "</g>\n";
  }

  double ly = kMarginTop + kPanelHeight + 56.0;
  svg << "<g class=\"legend\">\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % kColors.size()];
    svg << "<g class=\"legend-entry\"><line x1=\"" << fmt(kMarginLeft) << "\" y1=\"" << fmt(ly)
        << "\" x2=\"" << fmt(kMarginLeft + 30) << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"";
    if (s.dashed) svg << " stroke-dasharray=\"6,4\"";
    svg << "/><text x=\"" << fmt(kMarginLeft + 38) << "\" y=\"" << fmt(ly + 4) << "\">" << escape(s.name)
        << "</text></g>\n";
    ly += kLegendHeight;
  }
  svg << "<text x=\"" << fmt(kMarginLeft) << "\" y=\"" << fmt(ly + 4)
      << "\" font-size=\"9\">dashed: final phase only; solid: curriculum</text>\n";
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace lmdp::cli
