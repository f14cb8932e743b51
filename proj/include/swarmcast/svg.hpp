#pragma once

#include <string>
#include <vector>

#include "swarmcast/types.hpp"

namespace swarmcast {

// Deterministic SVG snapshot of one frame: agents as dots, codebook
// centroids as crosses, decoded clusters as radius circles.
std::string render_snapshot_svg(const Frame& frame, const Codebook& codebook,
                                const ClusterConfig& clusters, const std::string& title);

struct Series {
  std::string label;
  std::vector<double> y;  // x is the 0-based sample index
};

// Line chart with shared axes; used for loss curves and per-step losses.
std::string render_lines_svg(const std::vector<Series>& series, const std::string& title,
                             const std::string& x_label, const std::string& y_label,
                             bool log_y = false);

}  // namespace swarmcast
