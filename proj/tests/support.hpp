#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "beatscope/spectral_cube.hpp"

namespace test_support {

inline constexpr double kC = 2.99792458e-5;
inline constexpr double kPi = std::numbers::pi;

// Time grid t0, t0 + dt, ..., t1.
inline std::vector<double> grid(double t0, double t1, double dt) {
  std::vector<double> t;
  for (int i = 0; t0 + i * dt <= t1 + 1e-9; ++i) t.push_back(t0 + i * dt);
  return t;
}

inline beatscope::TimeTrace tones(const std::vector<double>& nus, double t0 = 80, double t1 = 1000, double dt = 20) {
  std::vector<double> y;
  for (double t : grid(t0, t1, dt)) {
    double v = 0;
    for (double nu : nus) v += std::cos(2 * kPi * kC * nu * t);
    y.push_back(v);
  }
  return beatscope::TimeTrace(t0, dt, y);
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("beatscope_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace test_support
