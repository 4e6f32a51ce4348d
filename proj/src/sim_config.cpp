#include "beatscope/sim_config.hpp"

#include "beatscope/error.hpp"
#include "text_io.hpp"

namespace beatscope {

namespace {

const std::vector<std::string> kKeys = {
    "omega_eg_cm", "modes",      "lambda_cm",  "Lambda_inv_fs", "temperature_K", "t1_max_fs",  "t1_step_fs",
    "t3_max_fs",   "t3_step_fs", "t2_min_fs",  "t2_max_fs",     "t2_step_fs",    "t1_pad",     "t3_pad",
    "exc_nm_min",  "exc_nm_max", "exc_nm_step", "det_nm_min",   "det_nm_max",    "det_nm_step"};

std::vector<VibrationalMode> parse_modes(std::string_view text) {
  std::vector<VibrationalMode> modes;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    auto item = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) {
      const auto colon = item.find(':');
      if (colon == std::string_view::npos) throw Error(ErrorKind::MalformedConfig, "mode entry needs w:S form");
      modes.push_back({detail::parse_double(item.substr(0, colon)), detail::parse_double(item.substr(colon + 1))});
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return modes;
}

int parse_pad(const std::string& s) { return static_cast<int>(detail::parse_count(s)); }

}  // namespace

SimulationConfig parse_simulation_config(std::string_view text) {
  SimulationConfig config;
  try {
    const auto kv = detail::parse_key_values(text, kKeys);
    const auto num = [&](const char* key, double& target) {
      if (const auto it = kv.find(key); it != kv.end()) target = detail::parse_double(it->second);
    };
    auto& m = config.model;
    auto& g = config.grids;
    num("omega_eg_cm", m.electronic_gap_cm);
    if (const auto it = kv.find("modes"); it != kv.end()) m.modes = parse_modes(it->second);
    num("lambda_cm", m.bath.reorganization_cm);
    num("Lambda_inv_fs", m.bath.inverse_correlation_fs);
    num("temperature_K", m.temperature_k);
    num("t1_max_fs", g.t1.stop);
    num("t1_step_fs", g.t1.step);
    num("t3_max_fs", g.t3.stop);
    num("t3_step_fs", g.t3.step);
    num("t2_min_fs", g.t2.start);
    num("t2_max_fs", g.t2.stop);
    num("t2_step_fs", g.t2.step);
    if (const auto it = kv.find("t1_pad"); it != kv.end()) g.t1_pad = parse_pad(it->second);
    if (const auto it = kv.find("t3_pad"); it != kv.end()) g.t3_pad = parse_pad(it->second);
    num("exc_nm_min", g.excitation_nm.start);
    num("exc_nm_max", g.excitation_nm.stop);
    num("exc_nm_step", g.excitation_nm.step);
    num("det_nm_min", g.detection_nm.start);
    num("det_nm_max", g.detection_nm.stop);
    num("det_nm_step", g.detection_nm.step);
    m.validate();
    g.validate();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::MalformedConfig) throw;
    throw Error(ErrorKind::MalformedConfig, e.what());
  }
  return config;
}

SimulationConfig load_simulation_config(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw Error(ErrorKind::MissingFile, path.string() + " not found");
  return parse_simulation_config(detail::read_text_file(path));
}

std::string to_config_text(const SimulationConfig& config) {
  const auto& m = config.model;
  const auto& g = config.grids;
  std::string modes;
  for (std::size_t i = 0; i < m.modes.size(); ++i) {
    if (i) modes += ',';
    modes += format_double(m.modes[i].frequency_cm) + ':' + format_double(m.modes[i].huang_rhys);
  }
  std::string out;
  const auto put = [&](const char* key, const std::string& value) { out += std::string(key) + '=' + value + '\n'; };
  put("omega_eg_cm", format_double(m.electronic_gap_cm));
  put("modes", modes);
  put("lambda_cm", format_double(m.bath.reorganization_cm));
  put("Lambda_inv_fs", format_double(m.bath.inverse_correlation_fs));
  put("temperature_K", format_double(m.temperature_k));
  put("t1_max_fs", format_double(g.t1.stop));
  put("t1_step_fs", format_double(g.t1.step));
  put("t3_max_fs", format_double(g.t3.stop));
  put("t3_step_fs", format_double(g.t3.step));
  put("t2_min_fs", format_double(g.t2.start));
  put("t2_max_fs", format_double(g.t2.stop));
  put("t2_step_fs", format_double(g.t2.step));
  put("t1_pad", std::to_string(g.t1_pad));
  put("t3_pad", std::to_string(g.t3_pad));
  put("exc_nm_min", format_double(g.excitation_nm.start));
  put("exc_nm_max", format_double(g.excitation_nm.stop));
  put("exc_nm_step", format_double(g.excitation_nm.step));
  put("det_nm_min", format_double(g.detection_nm.start));
  put("det_nm_max", format_double(g.detection_nm.stop));
  put("det_nm_step", format_double(g.detection_nm.step));
  return out;
}

}  // namespace beatscope
