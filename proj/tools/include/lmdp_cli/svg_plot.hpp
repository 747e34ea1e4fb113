#pragma once

#include <string>
#include <vector>

#include "lmdp/npg.hpp"

namespace lmdp::cli {

struct PlotSeries {
  std::string name;
  std::vector<TrainLogRow> rows;
  bool dashed = false;
};

// Series name from the mode column ("<scheme>/<phase>").
std::string series_name(const std::vector<TrainLogRow>& rows, const std::string& fallback);
// Final-phase-only schemes are dashed, curriculum schemes solid.
bool series_dashed(const std::string& scheme);

// Three panels (reward with 95% band, ln kappa, avg err) against samples_cumulative.
// Infinite ln kappa values are drawn as clipped markers on the panel's top edge.
std::string render_svg(const std::vector<PlotSeries>& series);

}  // namespace lmdp::cli
