#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace corner::cli {

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

// Self-contained log-log plot: axes, decade ticks, one polyline and marker set per series.
// Non-positive values are skipped.
void write_loglog_svg(std::ostream &os, const std::string &title, const std::string &xlabel, const std::string &ylabel,
                      const std::vector<PlotSeries> &series);

}  // namespace corner::cli
