#pragma once

#include <string>
#include <vector>

#include "qucl/report.hpp"

namespace qucl {

enum class PlotScale { Linear, SemilogX, SemilogY, LogLog };

/// "linear", "semilogx", "semilogy" or "loglog"; anything else throws InvalidArgument.
PlotScale parse_plot_scale(const std::string& text);

struct PlotSpec {
    std::string x;
    std::vector<std::string> y;
    PlotScale scale = PlotScale::LogLog;
    std::string title;
    int width = 640, height = 420;
};

/// Standalone SVG line chart of the y columns against x. Rows with non-finite values, or nonpositive
/// values on a log axis, are skipped. Throws InvalidArgument for an unknown column and EmptyRegion
/// when no point survives.
std::string svg_plot(const Table& table, const PlotSpec& spec);

}  // namespace qucl
