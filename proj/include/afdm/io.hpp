// io.hpp - CSV/SVG emitters and small file helpers used by the CLI

#pragma once

#include "afdm/cfr.hpp"
#include "afdm/channel.hpp"
#include "afdm/transforms.hpp"

#include <string>
#include <vector>

namespace afdm {

// Throws std::runtime_error on failure.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Long format "row,col,magnitude" of |H_bar|.
std::string cfr_magnitude_csv(const CfrMatrix& cfr);

// One row per path: gain, delay, DFS and the indices the CFR uses.
std::string paths_csv(const PathSet& paths, const WaveformParams& params);

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

// Static SVG line plot; log_y uses a base-10 axis and skips non-positive points.
std::string svg_line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<PlotSeries>& series, bool log_y);

}  // namespace afdm
