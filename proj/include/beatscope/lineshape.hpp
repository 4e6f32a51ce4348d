#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "beatscope/fourier.hpp"
#include "beatscope/spectral_cube.hpp"

namespace beatscope {

/// Undamped displaced harmonic mode.
struct VibrationalMode {
  double frequency_cm = 0.0;
  double huang_rhys = 0.0;
};

/// Overdamped Brownian oscillator in the high-temperature limit.
struct BrownianBath {
  double reorganization_cm = 50.0;
  double inverse_correlation_fs = 0.01;  // Lambda
};

struct LineShapeModel {
  double electronic_gap_cm = 1e7 / 680.0;  // vertical gap
  std::vector<VibrationalMode> modes;
  BrownianBath bath;
  double temperature_k = 80.0;

  /// Five modes at 120/190/265/340/440 cm^-1 with S = 0.1, lambda = 50 cm^-1, 80 K.
  static LineShapeModel five_mode_default();

  void validate() const;
  /// Bath lambda plus S * omega of every mode.
  double total_reorganization_cm() const;
  double max_mode_cm() const;
};

/// S [coth(w / 2kT) (1 - cos wt) + i (sin wt - wt)].
std::complex<double> g_vibrational(double t_fs, const VibrationalMode& mode, double temperature_k);

/// (2 l th / L^2)(e^{-Lt} + Lt - 1) - i (l / L)(e^{-Lt} + Lt - 1), l and th in rad/fs.
std::complex<double> g_brownian(double t_fs, const BrownianBath& bath, double temperature_k);

/// Sum of all mode terms and the bath term. `classical` drops the imaginary part.
std::complex<double> g_total(double t_fs, const LineShapeModel& model, bool classical = false);

struct PathwayFactors {
  std::complex<double> stimulated_emission;
  std::complex<double> ground_state_bleach;
};

/// F_SE and F_GSB, i.e. the rephasing response without the e^{i w_eg (t1 - t3)} carrier.
PathwayFactors rephasing_pathways(double t1_fs, double t2_fs, double t3_fs, const LineShapeModel& model,
                                  bool classical = false);

/// e^{i w_eg (t1 - t3)} (F_SE + F_GSB).
std::complex<double> rephasing_response(double t1_fs, double t2_fs, double t3_fs, const LineShapeModel& model);

struct LinearSpectrumOptions {
  double dt_fs = 0.0;           // 0 picks 1 / (20 c nu_max)
  double t_max_fs = 1e5;        // hard cap on the integration window
  double damping_cm = 0.0;      // extra homogeneous damping exp(-2 pi c gamma t)
  double cutoff = 1e-6;         // stop once |e^{-g}| falls below this
};

/// Re int_0^inf e^{i(w - w_eg) t} e^{-g(t)} dt on the given wavenumber grid, unit maximum.
/// Throws UnresolvedGrid when dt exceeds 1 / (10 c nu_max).
AmplitudeSpectrum linear_absorption(const LineShapeModel& model, const std::vector<double>& wavenumber_cm,
                                    const LinearSpectrumOptions& options = {});

/// Re int_0^inf e^{i(w - w_eg + 2 lambda_total) t} e^{-g*(t)} dt, unit maximum.
AmplitudeSpectrum linear_emission(const LineShapeModel& model, const std::vector<double>& wavenumber_cm,
                                  const LinearSpectrumOptions& options = {});

/// Uniform grid start, start + step, ... up to stop (inclusive within 1e-9 step).
struct UniformGrid {
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;

  std::size_t count() const;
  std::vector<double> values() const;
};

struct SimulationGrids {
  UniformGrid t1{0.0, 400.0, 2.0};
  UniformGrid t2{0.0, 1000.0, 20.0};
  UniformGrid t3{0.0, 400.0, 2.0};
  int t1_pad = 2;
  int t3_pad = 2;
  UniformGrid excitation_nm{650.0, 710.0, 1.0};
  UniformGrid detection_nm{650.0, 710.0, 1.0};

  void validate() const;
};

struct SimulationResult {
  SpectralCube cube;
  std::vector<std::string> warnings;
};

/// Real rephasing 2D spectra (GSB + SE) stacked over t2, resampled onto the nm grids.
SimulationResult simulate_cube(const LineShapeModel& model, const SimulationGrids& grids, unsigned threads = 1);

}  // namespace beatscope
