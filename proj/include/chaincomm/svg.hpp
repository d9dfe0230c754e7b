#pragma once

#include <string>
#include <vector>

#include "chaincomm/experiment.hpp"

namespace chaincomm {

// Static figures, no dependencies: a PER heatmap over (N, T) with the T = N^2
// curve overlaid, and PER-vs-T line panels for sweeps.
std::string heatmap_svg(const std::vector<CellResult>& cells);
std::string sweep_svg(const std::vector<CellResult>& cells, const std::string& sweep_param);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace chaincomm
