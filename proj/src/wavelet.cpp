#include "beatscope/wavelet.hpp"

#include <algorithm>
#include <cmath>

#include "beatscope/error.hpp"
#include "beatscope/units.hpp"
#include "parallel.hpp"
#include "text_io.hpp"

namespace beatscope {

namespace {

// Conjugated, scale-normalised atom sampled at integer offsets k = n - u in
// [-half, half]; index k + half.
struct AtomKernel {
  std::ptrdiff_t half = 0;
  std::vector<std::complex<double>> taps;
};

AtomKernel make_kernel(double scale, const MorletParams& params) {
  AtomKernel kernel;
  const double reach = scale * std::sqrt(params.bandwidth * std::log(1.0 / kWaveletEnvelopeCutoff));
  kernel.half = static_cast<std::ptrdiff_t>(std::floor(reach));
  kernel.taps.resize(static_cast<std::size_t>(2 * kernel.half + 1));
  const double norm = 1.0 / std::sqrt(scale);
  for (std::ptrdiff_t k = -kernel.half; k <= kernel.half; ++k) {
    kernel.taps[static_cast<std::size_t>(k + kernel.half)] =
        std::conj(norm * morlet(static_cast<double>(k) / scale, params));
  }
  return kernel;
}

void transform_row(std::span<const double> y, const AtomKernel& kernel, std::complex<double>* out) {
  const auto n = static_cast<std::ptrdiff_t>(y.size());
  for (std::ptrdiff_t u = 0; u < n; ++u) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, u - kernel.half);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, u + kernel.half);
    std::complex<double> acc{};
    for (std::ptrdiff_t m = lo; m <= hi; ++m) {
      acc += y[static_cast<std::size_t>(m)] * kernel.taps[static_cast<std::size_t>(m - u + kernel.half)];
    }
    out[u] = acc;
  }
}

void require_dt(double dt_fs) {
  if (!(dt_fs > 0.0) || !std::isfinite(dt_fs)) throw Error(ErrorKind::InvalidArgument, "time step must be positive");
}

double half_resolution(std::size_t n, double dt) {
  return 0.5 / (kSpeedOfLight * static_cast<double>(n - 1) * dt);
}

}  // namespace

void MorletParams::validate() const {
  if (!(bandwidth > 0.0) || !(center > 0.0) || !std::isfinite(bandwidth) || !std::isfinite(center)) {
    throw Error(ErrorKind::InvalidArgument, "Morlet F_b and F_c must be positive");
  }
}

std::complex<double> morlet(double T, const MorletParams& params) {
  const double norm = 1.0 / std::sqrt(kPi * params.bandwidth);
  const double envelope = std::exp(-T * T / params.bandwidth);
  return norm * envelope * std::polar(1.0, -2.0 * kPi * params.center * T);
}

ScaleSet scales_for_frequencies(std::span<const double> wavenumber_cm, double dt_fs, const MorletParams& params) {
  params.validate();
  require_dt(dt_fs);
  ScaleSet set;
  set.dt_fs = dt_fs;
  for (double nu : wavenumber_cm) {
    if (!(nu > 0.0) || !std::isfinite(nu)) {
      throw Error(ErrorKind::NonPositiveFrequency, "wavenumber must be positive, got " + format_double(nu));
    }
    set.scales.push_back(params.center / (kSpeedOfLight * nu * dt_fs));
    set.wavenumber_cm.push_back(nu);
  }
  return set;
}

double pseudofrequency(double scale, double dt_fs, const MorletParams& params) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorKind::NonPositiveScale, "scale must be positive, got " + format_double(scale));
  }
  require_dt(dt_fs);
  return params.center / (kSpeedOfLight * scale * dt_fs);
}

std::size_t cone_of_influence(double scale, const MorletParams& params) {
  const double margin = std::ceil(2.0 * scale * std::sqrt(params.bandwidth / 2.0));
  return std::max<std::size_t>(1, static_cast<std::size_t>(margin));
}

Scalogram cwt(const TimeTrace& trace, const ScaleSet& scale_set, const MorletParams& params) {
  params.validate();
  if (trace.size() < 8) throw Error(ErrorKind::TooShort, "CWT needs at least 8 samples, got " + std::to_string(trace.size()));
  if (std::abs(scale_set.dt_fs - trace.dt()) > 1e-9 * trace.dt()) {
    throw Error(ErrorKind::InvalidArgument, "scale set was built for a different time step");
  }
  Scalogram out;
  out.scale_set = scale_set;
  out.params = params;
  out.u_fs = trace.times();
  out.coeffs.resize(scale_set.scales.size() * trace.size());
  for (std::size_t s = 0; s < scale_set.scales.size(); ++s) {
    const double scale = scale_set.scales[s];
    if (!(scale > 0.0) || !std::isfinite(scale)) throw Error(ErrorKind::NonPositiveScale, "scale must be positive");
    transform_row(trace.values(), make_kernel(scale, params), out.coeffs.data() + s * trace.size());
    out.coi_margin.push_back(cone_of_influence(scale, params));
  }
  return out;
}

FrequencyMap TimeResolvedFrequencyMap::slice_at(double u_value) const {
  if (u_fs.empty()) throw Error(ErrorKind::EmptySelection, "map has no translations");
  std::size_t best = 0;
  for (std::size_t i = 1; i < u_fs.size(); ++i) {
    if (std::abs(u_fs[i] - u_value) < std::abs(u_fs[best] - u_value)) best = i;
  }
  const double step = u_fs.size() > 1 ? u_fs[1] - u_fs[0] : 1.0;
  if (std::abs(u_fs[best] - u_value) > 0.5 * step) {
    throw Error(ErrorKind::OutOfRange, "u = " + format_double(u_value) + " fs is outside the map");
  }
  FrequencyMap map;
  map.wavenumber_cm = wavenumber_cm;
  map.band_cm = band_cm;
  map.quantity = "abs_cwt";
  map.excitation_nm = excitation_nm;
  map.detection_nm = detection_nm;
  const std::size_t plane = excitation_nm.size() * detection_nm.size();
  map.amplitude.assign(amplitude.begin() + static_cast<std::ptrdiff_t>(best * plane),
                       amplitude.begin() + static_cast<std::ptrdiff_t>((best + 1) * plane));
  return map;
}

TimeResolvedFrequencyMap time_resolved_frequency_map(const SpectralCube& cube, double wavenumber_cm,
                                                     const MorletParams& params, unsigned threads) {
  params.validate();
  if (cube.n_population() < 8) throw Error(ErrorKind::TooShort, "CWT needs at least 8 population times");
  const double nu[] = {wavenumber_cm};
  const auto set = scales_for_frequencies(nu, cube.dt(), params);
  const auto kernel = make_kernel(set.scales[0], params);

  TimeResolvedFrequencyMap map;
  map.wavenumber_cm = wavenumber_cm;
  map.band_cm = half_resolution(cube.n_population(), cube.dt());
  map.scale = set.scales[0];
  map.coi_margin = cone_of_influence(map.scale, params);
  map.u_fs = cube.population_times();
  map.excitation_nm = cube.excitation_nm();
  map.detection_nm = cube.detection_nm();
  map.amplitude.assign(cube.values().size(), 0.0);

  const std::size_t n_d = cube.n_detection();
  detail::parallel_for(cube.n_excitation() * n_d, threads, [&](std::size_t, std::size_t pixel) {
    const std::size_t e = pixel / n_d;
    const std::size_t d = pixel % n_d;
    const auto series = cube.pixel_series(e, d);
    std::vector<std::complex<double>> row(series.size());
    transform_row(series, kernel, row.data());
    for (std::size_t u = 0; u < row.size(); ++u) map.amplitude[cube.index(u, e, d)] = std::abs(row[u]);
  });
  return map;
}

TimeTrace wavelet_trace(const SpectralCube& cube, const PixelCoord& pixel, double wavenumber_cm,
                        const MorletParams& params) {
  const auto raw = extract_trace(cube, pixel);
  const double nu[] = {wavenumber_cm};
  const auto sc = cwt(raw, scales_for_frequencies(nu, cube.dt(), params), params);
  std::vector<double> envelope(sc.n_times());
  for (std::size_t u = 0; u < envelope.size(); ++u) envelope[u] = std::abs(sc.at(0, u));
  TraceOrigin origin = *raw.origin();
  origin.wavenumber_cm = wavenumber_cm;
  return TimeTrace(raw.t0(), raw.dt(), std::move(envelope), origin);
}

void write_scalogram_csv(const Scalogram& scalogram, const std::filesystem::path& path) {
  std::string out;
  out += "# quantity=abs_cwt\n";
  out += "# morlet_bandwidth=" + format_double(scalogram.params.bandwidth) + '\n';
  out += "# morlet_center=" + format_double(scalogram.params.center) + '\n';
  out += "# coi=ceil(2*scale*sqrt(bandwidth/2)) samples flagged at each edge\n";
  out += "wavenumber_cm,scale,coi_margin";
  for (double u : scalogram.u_fs) out += ',' + format_double(u);
  out += '\n';
  for (std::size_t s = 0; s < scalogram.n_scales(); ++s) {
    out += format_double(scalogram.scale_set.wavenumber_cm[s]) + ',' + format_double(scalogram.scale_set.scales[s]) +
           ',' + std::to_string(scalogram.coi_margin[s]);
    for (std::size_t u = 0; u < scalogram.n_times(); ++u) out += ',' + format_double(std::abs(scalogram.at(s, u)));
    out += '\n';
  }
  detail::write_text_file(path, out);
}

}  // namespace beatscope
