#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "beatscope/lineshape.hpp"

namespace beatscope {

struct SimulationConfig {
  LineShapeModel model = LineShapeModel::five_mode_default();
  SimulationGrids grids;
};

/// Parses `key=value` lines. Missing keys keep the defaults of SimulationConfig.
///
/// Model keys: omega_eg_cm, modes (comma list of w:S), lambda_cm, Lambda_inv_fs, temperature_K.
/// Grid keys: t1_max_fs, t1_step_fs, t3_max_fs, t3_step_fs, t2_min_fs, t2_max_fs, t2_step_fs,
/// t1_pad, t3_pad, exc_nm_min, exc_nm_max, exc_nm_step, det_nm_min, det_nm_max, det_nm_step.
SimulationConfig parse_simulation_config(std::string_view text);
SimulationConfig load_simulation_config(const std::filesystem::path& path);

/// Every key written out, so parse(to_config_text(c)) reproduces c.
std::string to_config_text(const SimulationConfig& config);

}  // namespace beatscope
