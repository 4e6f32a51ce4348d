#pragma once

#include <filesystem>
#include <string>

#include "beatscope/fourier.hpp"
#include "beatscope/spectral_cube.hpp"

namespace beatscope {

/// Fill color of a value normalised to [0, 1] as "#rrggbb".
std::string heatmap_color(double fraction);

/// Standalone SVG 1.1 heatmap: detection nm on x, excitation nm on y, color bar,
/// title with the wavenumber and band tag. Output depends only on the map.
std::string heatmap_svg(const FrequencyMap& map);
void render_heatmap_svg(const FrequencyMap& map, const std::filesystem::path& path);

/// Line plot of a trace against time in fs.
std::string trace_svg(const TimeTrace& trace, const std::string& title);
void render_trace_svg(const TimeTrace& trace, const std::string& title, const std::filesystem::path& path);

}  // namespace beatscope
