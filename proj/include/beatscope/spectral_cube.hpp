#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace beatscope {

/// A point in the 2D spectral plane, (excitation, detection) in nm.
struct PixelCoord {
  double excitation_nm = 0.0;
  double detection_nm = 0.0;
};

/// Tag attached to traces pulled out of a cube.
struct TraceOrigin {
  PixelCoord pixel;
  std::optional<double> wavenumber_cm;  // set for wavelet traces
};

/// Real-valued samples on a uniform population-time grid t_i = t0 + i*dt (fs).
class TimeTrace {
 public:
  TimeTrace(double t0_fs, double dt_fs, std::vector<double> values,
            std::optional<TraceOrigin> origin = std::nullopt);

  /// Builds a trace from explicit sample times; rejects non-uniform grids.
  static TimeTrace from_samples(std::span<const double> times_fs, std::vector<double> values);

  double t0() const noexcept { return t0_; }
  double dt() const noexcept { return dt_; }
  std::size_t size() const noexcept { return values_.size(); }
  double time(std::size_t i) const noexcept { return t0_ + static_cast<double>(i) * dt_; }
  double back_time() const noexcept { return time(values_.size() - 1); }
  std::vector<double> times() const;
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  const std::optional<TraceOrigin>& origin() const noexcept { return origin_; }

  /// Samples [first, first + count).
  TimeTrace slice(std::size_t first, std::size_t count) const;

 private:
  double t0_;
  double dt_;
  std::vector<double> values_;
  std::optional<TraceOrigin> origin_;
};

/// Complex counterpart used for analytic (band-passed) signals.
class ComplexTrace {
 public:
  ComplexTrace(double t0_fs, double dt_fs, std::vector<std::complex<double>> values);

  double t0() const noexcept { return t0_; }
  double dt() const noexcept { return dt_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const std::complex<double>> values() const noexcept { return values_; }

  TimeTrace envelope() const;
  TimeTrace real_part() const;

 private:
  double t0_;
  double dt_;
  std::vector<std::complex<double>> values_;
};

struct SnappedPixel {
  std::size_t excitation_index = 0;
  std::size_t detection_index = 0;
  PixelCoord coord;
};

/// Stack of real 2D spectra along population time, indexed [T][excitation][detection].
///
/// The constructor enforces every invariant: non-empty axes, dt > 0, strictly
/// ascending wavelength axes, matching payload length and finite values. A
/// SpectralCube that exists is therefore always archivable.
class SpectralCube {
 public:
  SpectralCube(double t0_fs, double dt_fs, std::size_t n_population, std::vector<double> excitation_nm,
               std::vector<double> detection_nm, std::vector<double> values, std::string label = {});

  double t0() const noexcept { return t0_; }
  double dt() const noexcept { return dt_; }
  std::size_t n_population() const noexcept { return n_population_; }
  std::size_t n_excitation() const noexcept { return excitation_nm_.size(); }
  std::size_t n_detection() const noexcept { return detection_nm_.size(); }
  double population_time(std::size_t i) const noexcept { return t0_ + static_cast<double>(i) * dt_; }
  std::vector<double> population_times() const;
  const std::vector<double>& excitation_nm() const noexcept { return excitation_nm_; }
  const std::vector<double>& detection_nm() const noexcept { return detection_nm_; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::string& label() const noexcept { return label_; }

  std::size_t index(std::size_t t, std::size_t e, std::size_t d) const noexcept {
    return (t * excitation_nm_.size() + e) * detection_nm_.size() + d;
  }
  double at(std::size_t t, std::size_t e, std::size_t d) const noexcept { return values_[index(t, e, d)]; }

  /// Population-time series of one grid pixel.
  std::vector<double> pixel_series(std::size_t e, std::size_t d) const;

  /// Nearest grid pixel; ties go to the lower index. Throws OutOfRange.
  SnappedPixel snap(const PixelCoord& p) const;

 private:
  double t0_;
  double dt_;
  std::size_t n_population_;
  std::vector<double> excitation_nm_;
  std::vector<double> detection_nm_;
  std::vector<double> values_;
  std::string label_;
};

/// Reads `manifest.txt` + `cube.f64le` from a directory.
SpectralCube load_archive(const std::filesystem::path& dir);

/// Writes the archive; output bytes depend only on the cube.
void save_archive(const SpectralCube& cube, const std::filesystem::path& dir);

TimeTrace extract_trace(const SpectralCube& cube, const PixelCoord& p);

/// Keeps samples with t_min <= t <= t_max.
SpectralCube crop_population(const SpectralCube& cube, double t_min_fs, double t_max_fs);

/// Subtracts the least-squares polynomial of the given order.
TimeTrace detrend(const TimeTrace& trace, int order);

/// Applies detrend to every pixel series of the cube.
SpectralCube detrend_cube(const SpectralCube& cube, int order, unsigned threads = 1);

void write_trace_csv(const TimeTrace& trace, const std::filesystem::path& path);
TimeTrace read_trace_csv(const std::filesystem::path& path);

/// Formats with 17 significant digits so a parse returns the identical double.
std::string format_double(double x);

}  // namespace beatscope
