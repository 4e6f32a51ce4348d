#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "beatscope/spectral_cube.hpp"

namespace beatscope {

/// One-sided spectrum of a real trace along population time.
struct AmplitudeSpectrum {
  std::vector<double> wavenumber_cm;  // ascending, starts at 0
  std::vector<double> amplitude;      // |DFT|
  std::vector<double> phase;          // arg DFT, radians
  double bin_spacing_cm = 0.0;        // 1 / (c * N_pad * dt)
  double native_resolution_cm = 0.0;  // 1 / (c * (N - 1) * dt), the record-limited resolution
};

/// Amplitude at a single wavenumber over the (excitation, detection) plane.
struct FrequencyMap {
  double wavenumber_cm = 0.0;
  double band_cm = 0.0;              // +/- half native resolution, a label only
  std::string quantity = "abs_ft";   // what the amplitudes are
  std::vector<double> excitation_nm;
  std::vector<double> detection_nm;
  std::vector<double> amplitude;     // row-major [excitation][detection]

  double at(std::size_t e, std::size_t d) const { return amplitude[e * detection_nm.size() + d]; }
};

struct GaussianWindow {
  double center_cm = 0.0;
  double fwhm_cm = 0.0;
};

enum class Apodization { None, Hann };

struct SpectralPeak {
  double wavenumber_cm = 0.0;
  double amplitude = 0.0;
};

struct MapPeak {
  std::size_t excitation_index = 0;
  std::size_t detection_index = 0;
  PixelCoord coord;
  double amplitude = 0.0;
};

/// |DFT| of the trace zero-padded to pad_factor * N samples; non-negative
/// frequencies only. Throws TooShort below 4 samples.
AmplitudeSpectrum ft_spectrum(const TimeTrace& trace, int pad_factor = 4, Apodization apodization = Apodization::None);

/// Per-pixel FT amplitude at the bin nearest `wavenumber_cm`. The cube is
/// expected to be cropped and detrended already.
FrequencyMap frequency_map(const SpectralCube& cube, double wavenumber_cm, int pad_factor = 4, unsigned threads = 1);

/// Gaussian band-pass applied symmetrically to both frequency branches,
/// returned as an analytic signal: |z| is the envelope, Re z the filtered trace.
ComplexTrace bandpass_filter(const TimeTrace& trace, const GaussianWindow& window, int pad_factor = 4);

/// Local maxima above min_rel_height * max, refined on log-amplitude, sorted by wavenumber.
std::vector<SpectralPeak> spectral_peaks(const AmplitudeSpectrum& spectrum, double min_rel_height);

/// Strict 8-neighbour maxima of the map's interior cells above min_rel_height * max,
/// strongest first.
std::vector<MapPeak> map_local_maxima(const FrequencyMap& map, double min_rel_height);

/// Header row of detection nm, first column excitation nm. Metadata goes on
/// leading '#' lines.
void write_map_csv(const FrequencyMap& map, const std::filesystem::path& path);
FrequencyMap read_map_csv(const std::filesystem::path& path);

}  // namespace beatscope
