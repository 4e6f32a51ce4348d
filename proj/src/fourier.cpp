#include "beatscope/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "beatscope/error.hpp"
#include "beatscope/units.hpp"
#include "fft.hpp"
#include "parallel.hpp"
#include "text_io.hpp"

namespace beatscope {

namespace {

void require_pad(int pad_factor) {
  if (pad_factor < 1) throw Error(ErrorKind::InvalidArgument, "pad factor must be >= 1");
}

std::vector<std::complex<double>> as_complex(std::span<const double> xs) {
  return {xs.begin(), xs.end()};
}

}  // namespace

AmplitudeSpectrum ft_spectrum(const TimeTrace& trace, int pad_factor, Apodization apodization) {
  const std::size_t n = trace.size();
  if (n < 4) throw Error(ErrorKind::TooShort, "FT needs at least 4 samples, got " + std::to_string(n));
  require_pad(pad_factor);

  auto samples = as_complex(trace.values());
  if (apodization == Apodization::Hann) {
    for (std::size_t i = 0; i < n; ++i) {
      samples[i] *= 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n - 1)));
    }
  }
  const std::size_t n_pad = n * static_cast<std::size_t>(pad_factor);
  const auto spectrum = detail::fft(samples, n_pad, detail::FftDirection::Forward);

  AmplitudeSpectrum out;
  out.bin_spacing_cm = 1.0 / (kSpeedOfLight * static_cast<double>(n_pad) * trace.dt());
  out.native_resolution_cm = 1.0 / (kSpeedOfLight * static_cast<double>(n - 1) * trace.dt());
  const std::size_t bins = n_pad / 2 + 1;
  out.wavenumber_cm.resize(bins);
  out.amplitude.resize(bins);
  out.phase.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    out.wavenumber_cm[k] = static_cast<double>(k) * out.bin_spacing_cm;
    out.amplitude[k] = std::abs(spectrum[k]);
    out.phase[k] = std::arg(spectrum[k]);
  }
  return out;
}

FrequencyMap frequency_map(const SpectralCube& cube, double wavenumber_cm, int pad_factor, unsigned threads) {
  if (!(wavenumber_cm > 0.0)) throw Error(ErrorKind::NonPositiveFrequency, "map wavenumber must be positive");
  require_pad(pad_factor);
  if (cube.n_population() < 4) throw Error(ErrorKind::TooShort, "FT needs at least 4 population times");

  const std::size_t n_e = cube.n_excitation();
  const std::size_t n_d = cube.n_detection();
  FrequencyMap map;
  map.wavenumber_cm = wavenumber_cm;
  map.excitation_nm = cube.excitation_nm();
  map.detection_nm = cube.detection_nm();
  map.amplitude.assign(n_e * n_d, 0.0);

  const double bin = 1.0 / (kSpeedOfLight * static_cast<double>(cube.n_population() * pad_factor) * cube.dt());
  const std::size_t max_bin = cube.n_population() * static_cast<std::size_t>(pad_factor) / 2;
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(std::llround(wavenumber_cm / bin)), max_bin);
  map.band_cm = 0.5 / (kSpeedOfLight * static_cast<double>(cube.n_population() - 1) * cube.dt());

  detail::parallel_for(n_e * n_d, threads, [&](std::size_t, std::size_t pixel) {
    const std::size_t e = pixel / n_d;
    const std::size_t d = pixel % n_d;
    const auto spec = ft_spectrum(TimeTrace(cube.t0(), cube.dt(), cube.pixel_series(e, d)), pad_factor);
    map.amplitude[pixel] = spec.amplitude[k];
  });
  return map;
}

ComplexTrace bandpass_filter(const TimeTrace& trace, const GaussianWindow& window, int pad_factor) {
  const std::size_t n = trace.size();
  if (n < 4) throw Error(ErrorKind::TooShort, "band-pass needs at least 4 samples");
  if (!(window.fwhm_cm > 0.0) || !(window.center_cm > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "window center and FWHM must be positive");
  }
  require_pad(pad_factor);

  const std::size_t n_pad = n * static_cast<std::size_t>(pad_factor);
  auto spectrum = detail::fft(as_complex(trace.values()), n_pad, detail::FftDirection::Forward);
  const double bin = 1.0 / (kSpeedOfLight * static_cast<double>(n_pad) * trace.dt());
  const double shape = 4.0 * std::log(2.0) / (window.fwhm_cm * window.fwhm_cm);
  for (std::size_t k = 0; k < n_pad; ++k) {
    const std::size_t folded = std::min(k, n_pad - k);
    const double nu = static_cast<double>(folded) * bin;
    const double gain = std::exp(-shape * (nu - window.center_cm) * (nu - window.center_cm));
    // Analytic signal: keep DC and Nyquist once, double positive bins, drop negative ones.
    double branch = 0.0;
    if (k == 0 || 2 * k == n_pad) {
      branch = 1.0;
    } else if (2 * k < n_pad) {
      branch = 2.0;
    }
    spectrum[k] *= gain * branch;
  }
  auto filtered = detail::fft(spectrum, n_pad, detail::FftDirection::Backward);
  std::vector<std::complex<double>> out(filtered.begin(), filtered.begin() + static_cast<std::ptrdiff_t>(n));
  for (auto& z : out) z /= static_cast<double>(n_pad);
  return ComplexTrace(trace.t0(), trace.dt(), std::move(out));
}

std::vector<SpectralPeak> spectral_peaks(const AmplitudeSpectrum& spectrum, double min_rel_height) {
  if (!(min_rel_height > 0.0 && min_rel_height <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "min_rel_height must lie in (0, 1]");
  }
  const auto& a = spectrum.amplitude;
  std::vector<SpectralPeak> peaks;
  if (a.size() < 3) return peaks;
  const double top = *std::max_element(a.begin(), a.end());
  if (!(top > 0.0)) return peaks;
  const double threshold = min_rel_height * top;

  for (std::size_t k = 1; k + 1 < a.size(); ++k) {
    if (!(a[k] > a[k - 1] && a[k] > a[k + 1] && a[k] >= threshold)) continue;
    double offset = 0.0;
    double height = a[k];
    if (a[k - 1] > 0.0 && a[k + 1] > 0.0) {
      const double l0 = std::log(a[k - 1]);
      const double l1 = std::log(a[k]);
      const double l2 = std::log(a[k + 1]);
      const double curvature = l0 - 2.0 * l1 + l2;
      if (curvature < 0.0) {
        offset = std::clamp(0.5 * (l0 - l2) / curvature, -0.5, 0.5);
        height = std::exp(l1 - 0.25 * (l0 - l2) * offset);
      }
    } else {
      const double curvature = a[k - 1] - 2.0 * a[k] + a[k + 1];
      if (curvature < 0.0) {
        offset = std::clamp(0.5 * (a[k - 1] - a[k + 1]) / curvature, -0.5, 0.5);
        height = a[k] - 0.25 * (a[k - 1] - a[k + 1]) * offset;
      }
    }
    peaks.push_back({spectrum.wavenumber_cm[k] + offset * spectrum.bin_spacing_cm, height});
  }
  return peaks;
}

std::vector<MapPeak> map_local_maxima(const FrequencyMap& map, double min_rel_height) {
  const std::size_t n_e = map.excitation_nm.size();
  const std::size_t n_d = map.detection_nm.size();
  std::vector<MapPeak> peaks;
  if (n_e < 3 || n_d < 3 || map.amplitude.empty()) return peaks;
  const double top = *std::max_element(map.amplitude.begin(), map.amplitude.end());
  if (!(top > 0.0)) return peaks;
  for (std::size_t e = 1; e + 1 < n_e; ++e) {
    for (std::size_t d = 1; d + 1 < n_d; ++d) {
      const double v = map.at(e, d);
      if (v < min_rel_height * top) continue;
      bool is_max = true;
      for (int de = -1; de <= 1 && is_max; ++de) {
        for (int dd = -1; dd <= 1; ++dd) {
          if (de == 0 && dd == 0) continue;
          if (!(v > map.at(e + de, d + dd))) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) peaks.push_back({e, d, {map.excitation_nm[e], map.detection_nm[d]}, v});
    }
  }
  std::stable_sort(peaks.begin(), peaks.end(), [](const MapPeak& a, const MapPeak& b) { return a.amplitude > b.amplitude; });
  return peaks;
}

void write_map_csv(const FrequencyMap& map, const std::filesystem::path& path) {
  std::string out;
  out += "# wavenumber_cm=" + format_double(map.wavenumber_cm) + '\n';
  out += "# band_cm=" + format_double(map.band_cm) + '\n';
  out += "# quantity=" + map.quantity + '\n';
  out += "excitation_nm\\detection_nm";
  for (double d : map.detection_nm) out += ',' + format_double(d);
  out += '\n';
  for (std::size_t e = 0; e < map.excitation_nm.size(); ++e) {
    out += format_double(map.excitation_nm[e]);
    for (std::size_t d = 0; d < map.detection_nm.size(); ++d) out += ',' + format_double(map.at(e, d));
    out += '\n';
  }
  detail::write_text_file(path, out);
}

FrequencyMap read_map_csv(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw Error(ErrorKind::MissingFile, path.string() + " not found");
  const std::string text = detail::read_text_file(path);
  FrequencyMap map;
  std::size_t pos = 0;
  while (pos < text.size() && text[pos] == '#') {
    const auto end = text.find('\n', pos);
    const std::string line = text.substr(pos + 1, end == std::string::npos ? std::string::npos : end - pos - 1);
    const auto eq = line.find('=');
    if (eq != std::string::npos) {
      std::string key = line.substr(0, eq);
      key.erase(0, key.find_first_not_of(' '));
      const std::string value = line.substr(eq + 1);
      try {
        if (key == "wavenumber_cm") map.wavenumber_cm = detail::parse_double(value);
        if (key == "band_cm") map.band_cm = detail::parse_double(value);
      } catch (const Error&) {
        throw Error(ErrorKind::MalformedCsv, path.string() + ": bad metadata line");
      }
      if (key == "quantity") map.quantity = value;
    }
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  const auto rows = detail::read_csv_rows(text);
  if (rows.size() < 2 || rows.front().size() < 2) throw Error(ErrorKind::MalformedCsv, path.string() + ": empty map");
  try {
    for (std::size_t j = 1; j < rows.front().size(); ++j) map.detection_nm.push_back(detail::parse_double(rows.front()[j]));
    for (std::size_t r = 1; r < rows.size(); ++r) {
      if (rows[r].size() != rows.front().size()) {
        throw Error(ErrorKind::MalformedCsv, path.string() + ": ragged row " + std::to_string(r));
      }
      map.excitation_nm.push_back(detail::parse_double(rows[r][0]));
      for (std::size_t j = 1; j < rows[r].size(); ++j) map.amplitude.push_back(detail::parse_double(rows[r][j]));
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::MalformedCsv) throw;
    throw Error(ErrorKind::MalformedCsv, path.string() + ": " + e.what());
  }
  return map;
}

}  // namespace beatscope
