#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "beatscope/fourier.hpp"
#include "beatscope/spectral_cube.hpp"

namespace beatscope {

/// Complex Morlet parameters: bandwidth F_b and center frequency F_c (both dimensionless).
struct MorletParams {
  double bandwidth = 2.0;
  double center = 1.0;

  void validate() const;
};

/// Relative envelope level below which the wavelet support is cut off.
inline constexpr double kWaveletEnvelopeCutoff = 1e-16;

/// Scales in sample units for a list of wavenumbers at time step dt.
struct ScaleSet {
  std::vector<double> scales;
  std::vector<double> wavenumber_cm;
  double dt_fs = 0.0;
};

struct Scalogram {
  std::vector<std::complex<double>> coeffs;  // row-major [scale][u]
  std::vector<double> u_fs;                  // equals the input trace's time grid
  ScaleSet scale_set;
  std::vector<std::size_t> coi_margin;       // per scale, samples flagged at each edge
  MorletParams params;

  std::size_t n_scales() const noexcept { return scale_set.scales.size(); }
  std::size_t n_times() const noexcept { return u_fs.size(); }
  std::complex<double> at(std::size_t s, std::size_t u) const { return coeffs[s * u_fs.size() + u]; }
  /// True where edge effects make the coefficient unreliable.
  bool in_coi(std::size_t s, std::size_t u) const {
    return u < coi_margin[s] || u + coi_margin[s] >= u_fs.size();
  }
};

/// |cwt| at one scale over the pixel grid, for every translation u.
struct TimeResolvedFrequencyMap {
  double wavenumber_cm = 0.0;
  double band_cm = 0.0;
  double scale = 0.0;
  std::size_t coi_margin = 0;
  std::vector<double> u_fs;
  std::vector<double> excitation_nm;
  std::vector<double> detection_nm;
  std::vector<double> amplitude;  // [u][excitation][detection]

  double at(std::size_t u, std::size_t e, std::size_t d) const {
    return amplitude[(u * excitation_nm.size() + e) * detection_nm.size() + d];
  }
  /// Snapshot at the translation nearest `u`.
  FrequencyMap slice_at(double u_fs_value) const;
};

/// Psi(T) = (pi F_b)^-1/2 exp(-2 i pi F_c T) exp(-T^2 / F_b), T in samples.
std::complex<double> morlet(double T, const MorletParams& params = {});

ScaleSet scales_for_frequencies(std::span<const double> wavenumber_cm, double dt_fs, const MorletParams& params = {});

/// nu = F_c / (c s dt) in cm^-1.
double pseudofrequency(double scale, double dt_fs, const MorletParams& params = {});

/// Edge margin in samples: ceil(2 s sqrt(F_b / 2)), at least one sample.
std::size_t cone_of_influence(double scale, const MorletParams& params = {});

/// coeffs[s][u] = sum_n y[n] conj(s^-1/2 Psi((n - u) / s)), zero extension outside the record.
Scalogram cwt(const TimeTrace& trace, const ScaleSet& scale_set, const MorletParams& params = {});

TimeResolvedFrequencyMap time_resolved_frequency_map(const SpectralCube& cube, double wavenumber_cm,
                                                     const MorletParams& params = {}, unsigned threads = 1);

/// |coefficient| series at the snapped pixel and the scale of `wavenumber_cm`.
TimeTrace wavelet_trace(const SpectralCube& cube, const PixelCoord& pixel, double wavenumber_cm,
                        const MorletParams& params = {});

/// Rows are scales (annotated with wavenumber and COI margin), columns are u in fs; cells hold |coeffs|.
void write_scalogram_csv(const Scalogram& scalogram, const std::filesystem::path& path);

}  // namespace beatscope
