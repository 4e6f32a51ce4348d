#include "beatscope/lineshape.hpp"

#include <algorithm>
#include <cmath>

#include "beatscope/error.hpp"
#include "beatscope/units.hpp"
#include "fft.hpp"
#include "parallel.hpp"

namespace beatscope {

namespace {

using cplx = std::complex<double>;

constexpr double kDampingThreshold = 1e-3;

PathwayFactors combine(cplx g1, cplx g2, cplx g3, cplx g12, cplx g23, cplx g123) {
  const cplx common = -std::conj(g1) - std::conj(g12) + std::conj(g123);
  return {std::exp(common + g2 - std::conj(g3) - g23), std::exp(common + std::conj(g2) - g3 - std::conj(g23))};
}

double trapezoid_weight(std::size_t i, std::size_t n) { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; }

double grid_step(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double step = xs[1] - xs[0];
  for (std::size_t i = 2; i < xs.size(); ++i) {
    if (std::abs(xs[i] - xs[i - 1] - step) > 1e-9 * std::abs(step)) return 0.0;
  }
  return step;
}

enum class LinearKind { Absorption, Emission };

AmplitudeSpectrum linear_spectrum(const LineShapeModel& model, const std::vector<double>& wavenumber_cm,
                                  const LinearSpectrumOptions& options, LinearKind kind) {
  model.validate();
  if (wavenumber_cm.empty()) throw Error(ErrorKind::EmptyAxis, "wavenumber grid is empty");
  if (!(options.t_max_fs > 0.0) || !(options.cutoff > 0.0) || options.damping_cm < 0.0 || options.dt_fs < 0.0) {
    throw Error(ErrorKind::InvalidArgument, "linear spectrum options must be positive");
  }
  const double shift = kind == LinearKind::Emission ? 2.0 * model.total_reorganization_cm() : 0.0;
  double nu_max = model.max_mode_cm();
  for (double nu : wavenumber_cm) {
    if (!std::isfinite(nu)) throw Error(ErrorKind::NonFiniteValue, "wavenumber grid holds a non-finite value");
    nu_max = std::max(nu_max, std::abs(nu - model.electronic_gap_cm + shift));
  }
  nu_max = std::max(nu_max, 1.0);
  const double limit = 1.0 / (10.0 * kSpeedOfLight * nu_max);
  const double dt = options.dt_fs > 0.0 ? options.dt_fs : 0.5 * limit;
  if (dt > limit) {
    throw Error(ErrorKind::UnresolvedGrid, "integration step " + format_double(dt) + " fs exceeds " +
                                               format_double(limit) + " fs needed for " + format_double(nu_max) +
                                               " cm^-1");
  }
  const double gamma = wavenumber_to_angular(options.damping_cm);

  // Samples of the time-domain kernel up to the cutoff.
  std::vector<cplx> kernel;
  const auto max_steps = static_cast<std::size_t>(std::floor(options.t_max_fs / dt)) + 1;
  for (std::size_t n = 0; n < max_steps; ++n) {
    const double t = static_cast<double>(n) * dt;
    cplx g = g_total(t, model);
    if (kind == LinearKind::Emission) g = std::conj(g);
    const cplx value = std::exp(-g - gamma * t);
    if (n > 0 && std::abs(value) < options.cutoff) break;
    kernel.push_back(value * (n == 0 ? 0.5 : 1.0));
  }

  AmplitudeSpectrum out;
  out.wavenumber_cm = wavenumber_cm;
  out.amplitude.resize(wavenumber_cm.size());
  out.phase.assign(wavenumber_cm.size(), 0.0);
  out.bin_spacing_cm = grid_step(wavenumber_cm);
  out.native_resolution_cm = 1.0 / (kSpeedOfLight * dt * static_cast<double>(kernel.size()));
  for (std::size_t k = 0; k < wavenumber_cm.size(); ++k) {
    const double delta = wavenumber_to_angular(wavenumber_cm[k] - model.electronic_gap_cm + shift);
    double acc = 0.0;
    for (std::size_t n = 0; n < kernel.size(); ++n) {
      acc += (std::polar(1.0, delta * static_cast<double>(n) * dt) * kernel[n]).real();
    }
    out.amplitude[k] = acc * dt;
  }
  const double top = *std::max_element(out.amplitude.begin(), out.amplitude.end());
  if (!(top > 0.0)) throw Error(ErrorKind::DivisionByNegligible, "spectrum has no positive intensity on the grid");
  for (double& a : out.amplitude) a /= top;
  return out;
}

// Position of `delta` (rad/fs) on an FFT frequency axis of length n and step dt:
// the two neighbouring storage indices and the weight of the upper one.
struct AxisPoint {
  std::size_t lower = 0;
  std::size_t upper = 0;
  double frac = 0.0;
};

AxisPoint locate(double delta, std::size_t n, double dt, const char* axis) {
  const auto kmin = -static_cast<std::ptrdiff_t>(n / 2);
  const auto kmax = static_cast<std::ptrdiff_t>((n - 1) / 2);
  const double x = delta * static_cast<double>(n) * dt / (2.0 * kPi);
  if (x < static_cast<double>(kmin) || x > static_cast<double>(kmax)) {
    throw Error(ErrorKind::OutOfRange, std::string(axis) + " wavelength lies outside the sampled spectral band");
  }
  const auto lo = std::min(static_cast<std::ptrdiff_t>(std::floor(x)), kmax - 1);
  const auto wrap = [n](std::ptrdiff_t k) {
    return static_cast<std::size_t>(k < 0 ? k + static_cast<std::ptrdiff_t>(n) : k);
  };
  return {wrap(lo), wrap(lo + 1), x - static_cast<double>(lo)};
}

}  // namespace

LineShapeModel LineShapeModel::five_mode_default() {
  LineShapeModel model;
  for (double w : {120.0, 190.0, 265.0, 340.0, 440.0}) model.modes.push_back({w, 0.1});
  return model;
}

void LineShapeModel::validate() const {
  if (!(electronic_gap_cm > 0.0) || !std::isfinite(electronic_gap_cm)) {
    throw Error(ErrorKind::InvalidArgument, "electronic gap must be positive");
  }
  if (!(temperature_k > 0.0) || !std::isfinite(temperature_k)) {
    throw Error(ErrorKind::InvalidArgument, "temperature must be positive");
  }
  for (const auto& m : modes) {
    if (!(m.frequency_cm > 0.0) || !std::isfinite(m.frequency_cm)) {
      throw Error(ErrorKind::InvalidArgument, "mode frequency must be positive");
    }
    if (!(m.huang_rhys >= 0.0) || !std::isfinite(m.huang_rhys)) {
      throw Error(ErrorKind::InvalidArgument, "Huang-Rhys factor must be non-negative");
    }
  }
  if (!(bath.reorganization_cm >= 0.0) || !std::isfinite(bath.reorganization_cm)) {
    throw Error(ErrorKind::InvalidArgument, "bath reorganization energy must be non-negative");
  }
  if (!(bath.inverse_correlation_fs > 0.0) || !std::isfinite(bath.inverse_correlation_fs)) {
    throw Error(ErrorKind::InvalidArgument, "bath inverse correlation time must be positive");
  }
}

double LineShapeModel::total_reorganization_cm() const {
  double total = bath.reorganization_cm;
  for (const auto& m : modes) total += m.huang_rhys * m.frequency_cm;
  return total;
}

double LineShapeModel::max_mode_cm() const {
  double top = 0.0;
  for (const auto& m : modes) top = std::max(top, m.frequency_cm);
  return top;
}

std::complex<double> g_vibrational(double t_fs, const VibrationalMode& mode, double temperature_k) {
  const double w = wavenumber_to_angular(mode.frequency_cm);
  const double coth = 1.0 / std::tanh(mode.frequency_cm / (2.0 * kBoltzmannWavenumber * temperature_k));
  const double wt = w * t_fs;
  return mode.huang_rhys * cplx(coth * (1.0 - std::cos(wt)), std::sin(wt) - wt);
}

std::complex<double> g_brownian(double t_fs, const BrownianBath& bath, double temperature_k) {
  const double lambda = wavenumber_to_angular(bath.reorganization_cm);
  const double theta = wavenumber_to_angular(kBoltzmannWavenumber * temperature_k);
  const double big_lambda = bath.inverse_correlation_fs;
  const double x = std::expm1(-big_lambda * t_fs) + big_lambda * t_fs;
  return {2.0 * lambda * theta / (big_lambda * big_lambda) * x, -lambda / big_lambda * x};
}

std::complex<double> g_total(double t_fs, const LineShapeModel& model, bool classical) {
  cplx g = g_brownian(t_fs, model.bath, model.temperature_k);
  for (const auto& m : model.modes) g += g_vibrational(t_fs, m, model.temperature_k);
  return classical ? cplx(g.real(), 0.0) : g;
}

PathwayFactors rephasing_pathways(double t1, double t2, double t3, const LineShapeModel& model, bool classical) {
  const auto g = [&](double t) { return g_total(t, model, classical); };
  return combine(g(t1), g(t2), g(t3), g(t1 + t2), g(t2 + t3), g(t1 + t2 + t3));
}

std::complex<double> rephasing_response(double t1, double t2, double t3, const LineShapeModel& model) {
  const auto f = rephasing_pathways(t1, t2, t3, model);
  const double w = wavenumber_to_angular(model.electronic_gap_cm);
  return std::polar(1.0, w * (t1 - t3)) * (f.stimulated_emission + f.ground_state_bleach);
}

AmplitudeSpectrum linear_absorption(const LineShapeModel& model, const std::vector<double>& wavenumber_cm,
                                    const LinearSpectrumOptions& options) {
  return linear_spectrum(model, wavenumber_cm, options, LinearKind::Absorption);
}

AmplitudeSpectrum linear_emission(const LineShapeModel& model, const std::vector<double>& wavenumber_cm,
                                  const LinearSpectrumOptions& options) {
  return linear_spectrum(model, wavenumber_cm, options, LinearKind::Emission);
}

std::size_t UniformGrid::count() const {
  return static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
}

std::vector<double> UniformGrid::values() const {
  std::vector<double> xs(count());
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = start + static_cast<double>(i) * step;
  return xs;
}

void SimulationGrids::validate() const {
  const auto check = [](const UniformGrid& g, const char* name) {
    if (!std::isfinite(g.start) || !std::isfinite(g.stop) || !(g.step > 0.0) || !std::isfinite(g.step) ||
        g.stop < g.start) {
      throw Error(ErrorKind::InvalidArgument, std::string(name) + " grid needs start <= stop and step > 0");
    }
  };
  check(t1, "t1");
  check(t2, "t2");
  check(t3, "t3");
  check(excitation_nm, "excitation");
  check(detection_nm, "detection");
  if (t1.start != 0.0 || t3.start != 0.0) throw Error(ErrorKind::InvalidArgument, "t1 and t3 grids must start at 0");
  if (t2.start < 0.0) throw Error(ErrorKind::InvalidArgument, "t2 grid must be non-negative");
  if (t1.count() < 2 || t3.count() < 2) throw Error(ErrorKind::TooShort, "t1 and t3 grids need at least 2 points");
  if (!(excitation_nm.start > 0.0) || !(detection_nm.start > 0.0)) {
    throw Error(ErrorKind::NonPositive, "wavelength grids must be positive");
  }
  if (t1_pad < 1 || t3_pad < 1) throw Error(ErrorKind::InvalidArgument, "pad factors must be >= 1");
}

SimulationResult simulate_cube(const LineShapeModel& model, const SimulationGrids& grids, unsigned threads) {
  model.validate();
  grids.validate();
  const auto t1 = grids.t1.values();
  const auto t2 = grids.t2.values();
  const auto t3 = grids.t3.values();
  const auto exc = grids.excitation_nm.values();
  const auto det = grids.detection_nm.values();
  const std::size_t n1 = t1.size();
  const std::size_t n3 = t3.size();
  const std::size_t p1 = n1 * static_cast<std::size_t>(grids.t1_pad);
  const std::size_t p3 = n3 * static_cast<std::size_t>(grids.t3_pad);

  std::vector<std::string> warnings;
  for (const auto& [name, t_end] : {std::pair{"t1", t1.back()}, std::pair{"t3", t3.back()}}) {
    const double level = std::exp(-g_total(t_end, model).real());
    if (level >= kDampingThreshold) {
      warnings.push_back(std::string(name) + " window ends at " + format_double(t_end) + " fs where |exp(-g)| = " +
                         format_double(level) + " >= 1e-3; spectra may show truncation ripples");
    }
  }

  // Detuning in the rotating frame for every output wavelength.
  const double gap = model.electronic_gap_cm;
  std::vector<AxisPoint> exc_at;
  std::vector<AxisPoint> det_at;
  for (double nm : exc) exc_at.push_back(locate(wavenumber_to_angular(nm_to_wavenumber(nm) - gap), p1, grids.t1.step, "excitation"));
  for (double nm : det) det_at.push_back(locate(wavenumber_to_angular(nm_to_wavenumber(nm) - gap), p3, grids.t3.step, "detection"));

  std::vector<cplx> g1(n1);
  std::vector<cplx> g3(n3);
  for (std::size_t i = 0; i < n1; ++i) g1[i] = g_total(t1[i], model);
  for (std::size_t j = 0; j < n3; ++j) g3[j] = g_total(t3[j], model);

  const std::size_t plane = exc.size() * det.size();
  std::vector<double> values(t2.size() * plane);
  detail::parallel_for(t2.size(), threads, [&](std::size_t, std::size_t k) {
    const double tw = t2[k];
    const cplx g2 = g_total(tw, model);
    std::vector<cplx> g12(n1);
    std::vector<cplx> g23(n3);
    for (std::size_t i = 0; i < n1; ++i) g12[i] = g_total(t1[i] + tw, model);
    for (std::size_t j = 0; j < n3; ++j) g23[j] = g_total(tw + t3[j], model);

    std::vector<cplx> data(p1 * p3, cplx{});
    for (std::size_t i = 0; i < n1; ++i) {
      for (std::size_t j = 0; j < n3; ++j) {
        const auto f = combine(g1[i], g2, g3[j], g12[i], g23[j], g_total(t1[i] + tw + t3[j], model));
        data[i * p3 + j] =
            (f.stimulated_emission + f.ground_state_bleach) * (trapezoid_weight(i, n1) * trapezoid_weight(j, n3));
      }
    }
    // e^{-i d1 t1} along t1 and e^{+i d3 t3} along t3 put the rephasing peaks on the diagonal.
    detail::fft_axis(data, p1, p3, 0, detail::FftDirection::Forward);
    detail::fft_axis(data, p1, p3, 1, detail::FftDirection::Backward);

    double* out = values.data() + k * plane;
    for (std::size_t e = 0; e < exc.size(); ++e) {
      const auto& a = exc_at[e];
      for (std::size_t d = 0; d < det.size(); ++d) {
        const auto& b = det_at[d];
        const double v00 = data[a.lower * p3 + b.lower].real();
        const double v01 = data[a.lower * p3 + b.upper].real();
        const double v10 = data[a.upper * p3 + b.lower].real();
        const double v11 = data[a.upper * p3 + b.upper].real();
        out[e * det.size() + d] = (1.0 - a.frac) * ((1.0 - b.frac) * v00 + b.frac * v01) +
                                  a.frac * ((1.0 - b.frac) * v10 + b.frac * v11);
      }
    }
  });

  SpectralCube cube(grids.t2.start, grids.t2.step, t2.size(), exc, det, std::move(values),
                    "simulated real rephasing 2D spectra (GSB + SE)");
  return {std::move(cube), std::move(warnings)};
}

}  // namespace beatscope
