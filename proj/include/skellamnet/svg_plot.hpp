#pragma once

#include <string>
#include <vector>

namespace skellamnet {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

// Log-log line chart with decade ticks and a legend. Points with a
// nonpositive or non-finite coordinate are skipped.
std::string render_loglog_svg(const std::string& title, const std::string& x_label,
                              const std::string& y_label, const std::vector<PlotSeries>& series);

}  // namespace skellamnet
