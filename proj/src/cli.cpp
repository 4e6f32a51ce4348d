#include "beatscope/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <optional>
#include <thread>

#include "beatscope/diagnostics.hpp"
#include "beatscope/error.hpp"
#include "beatscope/fourier.hpp"
#include "beatscope/lineshape.hpp"
#include "beatscope/sim_config.hpp"
#include "beatscope/spectral_cube.hpp"
#include "beatscope/svg.hpp"
#include "beatscope/wavelet.hpp"
#include "text_io.hpp"

namespace beatscope {

namespace {

namespace fs = std::filesystem;

// Population-time preparation shared by every cube-reading subcommand.
struct Preparation {
  double t_min = 80.0;
  double t_max = std::numeric_limits<double>::infinity();
  int detrend_order = 3;
};

struct WaveletFlags {
  double bandwidth = 2.0;
  double center = 1.0;

  MorletParams params() const { return {bandwidth, center}; }
};

void add_preparation(CLI::App* cmd, Preparation& prep) {
  cmd->add_option("--tmin", prep.t_min, "drop population times below this (fs)")->capture_default_str();
  cmd->add_option("--tmax", prep.t_max, "drop population times above this (fs)");
  cmd->add_option("--detrend", prep.detrend_order, "polynomial order removed per pixel, -1 to skip")
      ->capture_default_str();
}

void add_wavelet(CLI::App* cmd, WaveletFlags& w) {
  cmd->add_option("--fb", w.bandwidth, "Morlet bandwidth F_b")->capture_default_str();
  cmd->add_option("--fc", w.center, "Morlet center frequency F_c")->capture_default_str();
}

SpectralCube prepared_cube(const fs::path& dir, const Preparation& prep, unsigned threads) {
  auto cube = crop_population(load_archive(dir), prep.t_min, prep.t_max);
  if (prep.detrend_order >= 0) cube = detrend_cube(cube, prep.detrend_order, threads);
  return cube;
}

PixelCoord parse_pixel(const std::string& text) {
  const auto xs = detail::parse_double_list(text, ',');
  if (xs.size() != 2) throw CLI::ValidationError("--pixel", "expected EXC,DET in nm");
  return {xs[0], xs[1]};
}

// Compact numeric tag for file names, e.g. 340 or 337.1.
std::string name_tag(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

void write_file(const fs::path& path, const std::string& content) {
  ensure_parent(path);
  detail::write_text_file(path, content);
}

void write_peaks_csv(const std::vector<MapPeak>& peaks, const fs::path& path) {
  std::string out = "excitation_nm,detection_nm,amplitude\n";
  for (const auto& p : peaks) {
    out += format_double(p.coord.excitation_nm) + ',' + format_double(p.coord.detection_nm) + ',' +
           format_double(p.amplitude) + '\n';
  }
  write_file(path, out);
}

std::size_t coi_samples(double nu, double dt, const WaveletFlags& w) {
  const double nus[] = {nu};
  return cone_of_influence(scales_for_frequencies(nus, dt, w.params()).scales[0], w.params());
}

void write_wtmap_slices(const TimeResolvedFrequencyMap& map, const std::vector<double>& at, const fs::path& dir) {
  fs::create_directories(dir);
  const auto& us = at.empty() ? map.u_fs : at;
  for (double u : us) {
    write_map_csv(map.slice_at(u), dir / ("wtmap_" + name_tag(map.wavenumber_cm) + "_u" + name_tag(u) + ".csv"));
  }
}

std::string beats_text(const TimeTrace& trace, double nu, const std::vector<double>& detected, double tol,
                       bool trim_coi, const WaveletFlags& w) {
  const auto used = trim_coi ? trim_edges(trace, coi_samples(nu, trace.dt(), w)) : trace;
  return to_key_values(beat_report(used, nu, detected, tol));
}

std::string fit_text(const TimeTrace& trace, std::optional<double> nu, bool trim, const WaveletFlags& w,
                     const std::vector<double>& fold) {
  const auto used = (nu && trim) ? trim_edges(trace, coi_samples(*nu, trace.dt(), w)) : trace;
  std::string out = to_key_values(fit_exp_decay(used));
  if (!fold.empty()) out += "fold_ratio=" + format_double(fold_decay(trace, fold[0], fold[1])) + '\n';
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Population-time coherence analysis of 2D electronic spectra", "beatscope"};
  app.require_subcommand(1);
  app.fallthrough();
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--threads", threads, "worker threads (results do not depend on it)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "synthesize a cube from a line-shape model");
  std::string config_path;
  std::string out_path;
  simulate->add_option("--config", config_path, "key=value model and grid file (defaults to the five-mode model)");
  simulate->add_option("--out", out_path, "archive directory")->required();

  // ftmap
  auto* ftmap = app.add_subcommand("ftmap", "FT amplitude maps at fixed wavenumbers");
  std::string in_path;
  std::vector<double> nus;
  int pad = 4;
  std::string peaks_path;
  double min_rel = 0.1;
  Preparation prep;
  ftmap->add_option("--in", in_path, "archive directory")->required();
  ftmap->add_option("--nu", nus, "wavenumbers in cm^-1")->required()->delimiter(',');
  ftmap->add_option("--out", out_path, "CSV file (one --nu) or directory")->required();
  ftmap->add_option("--pad", pad, "zero-padding factor")->capture_default_str();
  ftmap->add_option("--peaks", peaks_path, "CSV of local maxima (one --nu only)");
  ftmap->add_option("--min-rel", min_rel, "relative height for --peaks")->capture_default_str();
  add_preparation(ftmap, prep);

  // wtmap
  auto* wtmap = app.add_subcommand("wtmap", "time-resolved |CWT| maps at one wavenumber");
  double nu = 0.0;
  std::vector<double> at;
  WaveletFlags wavelet;
  wtmap->add_option("--in", in_path, "archive directory")->required();
  wtmap->add_option("--nu", nu, "wavenumber in cm^-1")->required();
  wtmap->add_option("--at", at, "translations u in fs (default: all)")->delimiter(',');
  wtmap->add_option("--out", out_path, "output directory")->required();
  add_preparation(wtmap, prep);
  add_wavelet(wtmap, wavelet);

  // trace
  auto* trace_cmd = app.add_subcommand("trace", "population-time trace at one pixel");
  std::string pixel_text;
  std::optional<double> trace_nu;
  std::string scalogram_path;
  std::vector<double> scalogram_nus;
  trace_cmd->add_option("--in", in_path, "archive directory")->required();
  trace_cmd->add_option("--pixel", pixel_text, "EXC,DET in nm")->required();
  trace_cmd->add_option("--nu", trace_nu, "wavelet trace |CWT| at this wavenumber instead of the raw trace");
  trace_cmd->add_option("--out", out_path, "trace CSV")->required();
  trace_cmd->add_option("--scalogram", scalogram_path, "also write the scalogram of the raw trace");
  trace_cmd->add_option("--scalogram-nu", scalogram_nus, "scalogram wavenumbers (default 50..600 step 5)")
      ->delimiter(',');
  add_preparation(trace_cmd, prep);
  add_wavelet(trace_cmd, wavelet);

  // bandpass
  auto* bandpass = app.add_subcommand("bandpass", "Gaussian band-pass envelopes of a trace");
  double center = 0.0;
  std::vector<double> fwhms;
  bandpass->add_option("--in", in_path, "trace CSV")->required();
  bandpass->add_option("--center", center, "window center in cm^-1")->required();
  bandpass->add_option("--fwhm", fwhms, "window FWHM values in cm^-1")->required()->delimiter(',');
  bandpass->add_option("--out", out_path, "output directory")->required();
  bandpass->add_option("--pad", pad, "zero-padding factor")->capture_default_str();

  // beats
  auto* beats = app.add_subcommand("beats", "beat period and interfering frequency candidates");
  std::vector<double> detected;
  double tol = kDefaultMatchTolerance;
  bool trim_coi = false;
  std::string csv_path;
  beats->add_option("--in", in_path, "wavelet trace CSV")->required();
  beats->add_option("--nu", nu, "wavenumber of the trace in cm^-1")->required();
  beats->add_option("--detected", detected, "detected spectral peaks in cm^-1")->delimiter(',');
  beats->add_option("--tol", tol, "matching tolerance in cm^-1")->capture_default_str();
  beats->add_flag("--trim-coi", trim_coi, "ignore samples inside the cone of influence");
  beats->add_option("--out", out_path, "key=value report")->required();
  beats->add_option("--csv", csv_path, "also write a CSV row");
  add_wavelet(beats, wavelet);

  // fit
  auto* fit = app.add_subcommand("fit", "exponential decay fit of an envelope trace");
  std::optional<double> fit_nu;
  bool no_trim = false;
  std::vector<double> fold;
  fit->add_option("--in", in_path, "envelope trace CSV")->required();
  fit->add_option("--nu", fit_nu, "wavenumber of the trace; enables cone-of-influence trimming");
  fit->add_flag("--no-coi-trim", no_trim, "keep cone-of-influence samples");
  fit->add_option("--fold", fold, "TA,TB: also report trace(TA)/trace(TB)")->delimiter(',')->expected(2);
  fit->add_option("--out", out_path, "key=value report")->required();
  fit->add_option("--csv", csv_path, "also write a CSV row");
  add_wavelet(fit, wavelet);

  // export-svg
  auto* svg = app.add_subcommand("export-svg", "render a map or trace CSV as SVG");
  std::string map_in;
  std::string trace_in;
  std::string title;
  auto* map_opt = svg->add_option("--map", map_in, "map CSV");
  auto* trace_opt = svg->add_option("--trace", trace_in, "trace CSV");
  map_opt->excludes(trace_opt);
  svg->add_option("--title", title, "plot title for traces");
  svg->add_option("--out", out_path, "SVG file")->required();

  // analyze
  auto* analyze = app.add_subcommand("analyze", "detrend, wtmap, trace, beats and fit in one run");
  analyze->add_option("--in", in_path, "archive directory")->required();
  analyze->add_option("--nu", nu, "wavenumber in cm^-1")->required();
  analyze->add_option("--pixel", pixel_text, "EXC,DET in nm")->required();
  analyze->add_option("--at", at, "translations u in fs for the maps")->delimiter(',');
  analyze->add_option("--detected", detected, "detected spectral peaks in cm^-1")->delimiter(',');
  analyze->add_option("--tol", tol, "matching tolerance in cm^-1")->capture_default_str();
  analyze->add_option("--out", out_path, "output directory")->required();
  add_preparation(analyze, prep);
  add_wavelet(analyze, wavelet);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (*svg && map_in.empty() == trace_in.empty()) throw CLI::RequiredError("exactly one of --map or --trace");
    if (*ftmap && nus.size() > 1 && !peaks_path.empty()) throw CLI::ValidationError("--peaks", "needs a single --nu");
    if (!trace_cmd->get_option("--pixel")->empty() || !analyze->get_option("--pixel")->empty()) {
      (void)parse_pixel(pixel_text);
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const Error& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*simulate) {
      const auto config = config_path.empty() ? SimulationConfig{} : load_simulation_config(config_path);
      const auto result = simulate_cube(config.model, config.grids, threads);
      for (const auto& w : result.warnings) err << "warning: " << w << '\n';
      save_archive(result.cube, out_path);
    } else if (*ftmap) {
      const auto cube = prepared_cube(in_path, prep, threads);
      for (double v : nus) {
        const auto map = frequency_map(cube, v, pad, threads);
        const fs::path target = nus.size() == 1 ? fs::path(out_path) : fs::path(out_path) / ("ftmap_" + name_tag(v) + ".csv");
        ensure_parent(target);
        write_map_csv(map, target);
        if (!peaks_path.empty()) write_peaks_csv(map_local_maxima(map, min_rel), peaks_path);
      }
    } else if (*wtmap) {
      const auto cube = prepared_cube(in_path, prep, threads);
      write_wtmap_slices(time_resolved_frequency_map(cube, nu, wavelet.params(), threads), at, out_path);
    } else if (*trace_cmd) {
      const auto cube = prepared_cube(in_path, prep, threads);
      const auto pixel = parse_pixel(pixel_text);
      const auto raw = extract_trace(cube, pixel);
      ensure_parent(out_path);
      write_trace_csv(trace_nu ? wavelet_trace(cube, pixel, *trace_nu, wavelet.params()) : raw, out_path);
      if (!scalogram_path.empty()) {
        if (scalogram_nus.empty()) {
          for (int v = 50; v <= 600; v += 5) scalogram_nus.push_back(v);
        }
        const auto sc = cwt(raw, scales_for_frequencies(scalogram_nus, raw.dt(), wavelet.params()), wavelet.params());
        ensure_parent(scalogram_path);
        write_scalogram_csv(sc, scalogram_path);
      }
    } else if (*bandpass) {
      const auto trace = read_trace_csv(in_path);
      fs::create_directories(out_path);
      for (double f : fwhms) {
        const auto z = bandpass_filter(trace, {center, f}, pad);
        const std::string stem = "bandpass_" + name_tag(center) + "_fwhm" + name_tag(f);
        write_trace_csv(z.envelope(), fs::path(out_path) / (stem + "_envelope.csv"));
        write_trace_csv(z.real_part(), fs::path(out_path) / (stem + "_real.csv"));
      }
    } else if (*beats) {
      const auto trace = read_trace_csv(in_path);
      const auto used = trim_coi ? trim_edges(trace, coi_samples(nu, trace.dt(), wavelet)) : trace;
      const auto report = beat_report(used, nu, detected, tol);
      write_file(out_path, to_key_values(report));
      if (!csv_path.empty()) write_file(csv_path, beat_report_csv_header() + '\n' + to_csv_row(report) + '\n');
    } else if (*fit) {
      const auto trace = read_trace_csv(in_path);
      write_file(out_path, fit_text(trace, fit_nu, !no_trim, wavelet, fold));
      if (!csv_path.empty()) {
        const auto used = (fit_nu && !no_trim) ? trim_edges(trace, coi_samples(*fit_nu, trace.dt(), wavelet)) : trace;
        write_file(csv_path, decay_fit_csv_header() + '\n' + to_csv_row(fit_exp_decay(used)) + '\n');
      }
    } else if (*svg) {
      ensure_parent(out_path);
      if (!map_in.empty()) {
        render_heatmap_svg(read_map_csv(map_in), out_path);
      } else {
        const auto trace = read_trace_csv(trace_in);
        render_trace_svg(trace, title.empty() ? fs::path(trace_in).filename().string() : title, out_path);
      }
    } else if (*analyze) {
      const fs::path dir = out_path;
      const auto cube = prepared_cube(in_path, prep, threads);
      write_wtmap_slices(time_resolved_frequency_map(cube, nu, wavelet.params(), threads), at, dir);
      const auto wt = wavelet_trace(cube, parse_pixel(pixel_text), nu, wavelet.params());
      write_trace_csv(wt, dir / "trace.csv");
      // Re-read so every later stage sees exactly what the standalone commands would.
      const auto stored = read_trace_csv(dir / "trace.csv");
      write_file(dir / "beats.txt", beats_text(stored, nu, detected, tol, false, wavelet));
      write_file(dir / "fit.txt", fit_text(stored, nu, true, wavelet, {}));
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace beatscope
