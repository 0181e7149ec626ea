#pragma once

#include <string>
#include <utility>
#include <vector>

namespace lrb {

struct PlotSeries {
    std::string label;
    std::vector<std::pair<double, double>> points; // (n, mean regret)
};

// Self-contained log-log line chart. Points with non-positive coordinates
// are dropped; series left empty after that are skipped.
std::string render_loglog_svg(const std::vector<PlotSeries>& series,
                              const std::string& title);

} // namespace lrb
