#include "beatscope/spectral_cube.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <Eigen/Dense>

#include "beatscope/error.hpp"
#include "parallel.hpp"
#include "text_io.hpp"

namespace beatscope {

namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFiniteValue, std::string(what) + " contains a non-finite value");
  }
}

void require_ascending(const std::vector<double>& axis, const char* what) {
  if (axis.empty()) throw Error(ErrorKind::EmptyAxis, std::string(what) + " axis is empty");
  require_finite(axis, what);
  for (std::size_t i = 1; i < axis.size(); ++i) {
    if (!(axis[i] > axis[i - 1])) {
      throw Error(ErrorKind::InvalidArgument, std::string(what) + " axis must be strictly ascending");
    }
  }
}

void require_uniform_step(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(ErrorKind::NonUniformTimeAxis, "time step must be positive and finite");
  }
}

// Nearest node on an ascending axis; ties resolve to the lower index.
std::size_t snap_axis(const std::vector<double>& axis, double x, const char* what) {
  const double lo_half = axis.size() > 1 ? 0.5 * (axis[1] - axis[0]) : 0.5;
  const double hi_half = axis.size() > 1 ? 0.5 * (axis[axis.size() - 1] - axis[axis.size() - 2]) : 0.5;
  if (!std::isfinite(x) || x < axis.front() - lo_half || x > axis.back() + hi_half) {
    throw Error(ErrorKind::OutOfRange, std::string(what) + " coordinate " + format_double(x) + " nm is outside the grid");
  }
  std::size_t best = 0;
  double best_distance = std::abs(axis[0] - x);
  for (std::size_t i = 1; i < axis.size(); ++i) {
    const double d = std::abs(axis[i] - x);
    if (d < best_distance) {
      best = i;
      best_distance = d;
    }
  }
  return best;
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += format_double(xs[i]);
  }
  return out;
}

constexpr const char* kManifestName = "manifest.txt";
constexpr const char* kPayloadName = "cube.f64le";

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ---------------------------------------------------------------- TimeTrace

TimeTrace::TimeTrace(double t0_fs, double dt_fs, std::vector<double> values, std::optional<TraceOrigin> origin)
    : t0_(t0_fs), dt_(dt_fs), values_(std::move(values)), origin_(std::move(origin)) {
  require_uniform_step(dt_);
  if (!std::isfinite(t0_)) throw Error(ErrorKind::NonFiniteValue, "trace origin time is not finite");
  if (values_.empty()) throw Error(ErrorKind::EmptyAxis, "trace has no samples");
  require_finite(values_, "trace");
}

TimeTrace TimeTrace::from_samples(std::span<const double> times_fs, std::vector<double> values) {
  if (times_fs.size() != values.size()) {
    throw Error(ErrorKind::SizeMismatch, "time and value columns differ in length");
  }
  if (times_fs.size() < 2) throw Error(ErrorKind::NonUniformTimeAxis, "need at least two samples to define a step");
  require_finite(times_fs, "time axis");
  const double t0 = times_fs.front();
  const double dt = (times_fs.back() - t0) / static_cast<double>(times_fs.size() - 1);
  require_uniform_step(dt);
  for (std::size_t i = 0; i < times_fs.size(); ++i) {
    if (std::abs(times_fs[i] - (t0 + static_cast<double>(i) * dt)) > 1e-6 * dt) {
      throw Error(ErrorKind::NonUniformTimeAxis, "sample times are not uniformly spaced");
    }
  }
  return TimeTrace(t0, dt, std::move(values));
}

std::vector<double> TimeTrace::times() const {
  std::vector<double> t(values_.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = time(i);
  return t;
}

TimeTrace TimeTrace::slice(std::size_t first, std::size_t count) const {
  if (count == 0 || first + count > values_.size()) throw Error(ErrorKind::EmptySelection, "slice outside the trace");
  return TimeTrace(time(first), dt_, std::vector<double>(values_.begin() + first, values_.begin() + first + count),
                   origin_);
}

ComplexTrace::ComplexTrace(double t0_fs, double dt_fs, std::vector<std::complex<double>> values)
    : t0_(t0_fs), dt_(dt_fs), values_(std::move(values)) {
  require_uniform_step(dt_);
  if (values_.empty()) throw Error(ErrorKind::EmptyAxis, "trace has no samples");
}

TimeTrace ComplexTrace::envelope() const {
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), [](auto z) { return std::abs(z); });
  return TimeTrace(t0_, dt_, std::move(out));
}

TimeTrace ComplexTrace::real_part() const {
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), [](auto z) { return z.real(); });
  return TimeTrace(t0_, dt_, std::move(out));
}

// ------------------------------------------------------------- SpectralCube

SpectralCube::SpectralCube(double t0_fs, double dt_fs, std::size_t n_population, std::vector<double> excitation_nm,
                           std::vector<double> detection_nm, std::vector<double> values, std::string label)
    : t0_(t0_fs),
      dt_(dt_fs),
      n_population_(n_population),
      excitation_nm_(std::move(excitation_nm)),
      detection_nm_(std::move(detection_nm)),
      values_(std::move(values)),
      label_(std::move(label)) {
  if (n_population_ == 0) throw Error(ErrorKind::EmptyAxis, "population axis is empty");
  require_uniform_step(dt_);
  if (!std::isfinite(t0_)) throw Error(ErrorKind::NonFiniteValue, "t0 is not finite");
  require_ascending(excitation_nm_, "excitation");
  require_ascending(detection_nm_, "detection");
  const std::size_t expected = n_population_ * excitation_nm_.size() * detection_nm_.size();
  if (values_.size() != expected) {
    throw Error(ErrorKind::SizeMismatch,
                "cube holds " + std::to_string(values_.size()) + " values, axes need " + std::to_string(expected));
  }
  require_finite(values_, "cube");
}

std::vector<double> SpectralCube::population_times() const {
  std::vector<double> t(n_population_);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = population_time(i);
  return t;
}

std::vector<double> SpectralCube::pixel_series(std::size_t e, std::size_t d) const {
  std::vector<double> out(n_population_);
  for (std::size_t t = 0; t < n_population_; ++t) out[t] = at(t, e, d);
  return out;
}

SnappedPixel SpectralCube::snap(const PixelCoord& p) const {
  SnappedPixel s;
  s.excitation_index = snap_axis(excitation_nm_, p.excitation_nm, "excitation");
  s.detection_index = snap_axis(detection_nm_, p.detection_nm, "detection");
  s.coord = {excitation_nm_[s.excitation_index], detection_nm_[s.detection_index]};
  return s;
}

// ------------------------------------------------------------------ archive

void save_archive(const SpectralCube& cube, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoFailure, "cannot create " + dir.string() + ": " + ec.message());

  std::string label = cube.label();
  std::replace(label.begin(), label.end(), '\n', ' ');
  std::replace(label.begin(), label.end(), '\r', ' ');

  std::ostringstream m;
  m << "format_version=1\n"
    << "n_population=" << cube.n_population() << '\n'
    << "n_excitation=" << cube.n_excitation() << '\n'
    << "n_detection=" << cube.n_detection() << '\n'
    << "dt_fs=" << format_double(cube.dt()) << '\n'
    << "t0_fs=" << format_double(cube.t0()) << '\n'
    << "population_fs=" << join(cube.population_times()) << '\n'
    << "excitation_nm=" << join(cube.excitation_nm()) << '\n'
    << "detection_nm=" << join(cube.detection_nm()) << '\n'
    << "label=" << label << '\n';
  detail::write_text_file(dir / kManifestName, m.str());

  std::string payload(cube.values().size() * 8, '\0');
  for (std::size_t i = 0; i < cube.values().size(); ++i) {
    const auto bits = std::bit_cast<std::uint64_t>(cube.values()[i]);
    for (int b = 0; b < 8; ++b) payload[i * 8 + b] = static_cast<char>((bits >> (8 * b)) & 0xFFu);
  }
  detail::write_text_file(dir / kPayloadName, payload);
}

SpectralCube load_archive(const std::filesystem::path& dir) {
  const auto manifest_path = dir / kManifestName;
  const auto payload_path = dir / kPayloadName;
  if (!std::filesystem::is_regular_file(manifest_path)) {
    throw Error(ErrorKind::MissingFile, manifest_path.string() + " not found");
  }
  if (!std::filesystem::is_regular_file(payload_path)) {
    throw Error(ErrorKind::MissingFile, payload_path.string() + " not found");
  }

  static const std::vector<std::string> known = {"format_version", "n_population", "n_excitation", "n_detection",
                                                 "dt_fs",          "t0_fs",        "population_fs", "excitation_nm",
                                                 "detection_nm",   "label"};
  std::map<std::string, std::string> kv;
  try {
    kv = detail::parse_key_values(detail::read_text_file(manifest_path), known);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::IoFailure) throw;
    throw Error(ErrorKind::MalformedManifest, e.what());
  }
  for (const char* key : {"format_version", "n_population", "n_excitation", "n_detection", "dt_fs", "t0_fs",
                          "excitation_nm", "detection_nm", "label"}) {
    if (!kv.contains(key)) throw Error(ErrorKind::MalformedManifest, std::string("missing key ") + key);
  }

  auto as_count = [&](const std::string& key) -> std::size_t {
    try {
      return detail::parse_count(kv.at(key));
    } catch (const Error&) {
      throw Error(ErrorKind::MalformedManifest, "bad integer for " + key);
    }
  };
  auto as_double = [&](const std::string& key) -> double {
    try {
      return detail::parse_double(kv.at(key));
    } catch (const Error&) {
      throw Error(ErrorKind::MalformedManifest, "bad number for " + key);
    }
  };
  auto as_list = [&](const std::string& key) -> std::vector<double> {
    try {
      return detail::parse_double_list(kv.at(key));
    } catch (const Error&) {
      throw Error(ErrorKind::MalformedManifest, "bad list for " + key);
    }
  };

  if (kv.at("format_version") != "1") throw Error(ErrorKind::MalformedManifest, "unsupported format_version");
  const std::size_t n_t = as_count("n_population");
  const std::size_t n_e = as_count("n_excitation");
  const std::size_t n_d = as_count("n_detection");
  const double dt = as_double("dt_fs");
  const double t0 = as_double("t0_fs");
  auto exc = as_list("excitation_nm");
  auto det = as_list("detection_nm");
  if (exc.size() != n_e) throw Error(ErrorKind::MalformedManifest, "excitation_nm count differs from n_excitation");
  if (det.size() != n_d) throw Error(ErrorKind::MalformedManifest, "detection_nm count differs from n_detection");
  require_uniform_step(dt);
  if (kv.contains("population_fs")) {
    const auto times = as_list("population_fs");
    if (times.size() != n_t) throw Error(ErrorKind::MalformedManifest, "population_fs count differs from n_population");
    for (std::size_t i = 0; i < n_t; ++i) {
      if (std::abs(times[i] - (t0 + static_cast<double>(i) * dt)) > 1e-9 * dt) {
        throw Error(ErrorKind::NonUniformTimeAxis, "population_fs is not t0_fs + i*dt_fs");
      }
    }
  }

  const std::string payload = detail::read_text_file(payload_path);
  const std::size_t expected = 8 * n_t * n_e * n_d;
  if (payload.size() != expected) {
    throw Error(ErrorKind::SizeMismatch,
                "payload has " + std::to_string(payload.size()) + " bytes, manifest needs " + std::to_string(expected));
  }
  std::vector<double> values(n_t * n_e * n_d);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(payload[i * 8 + b])) << (8 * b);
    values[i] = std::bit_cast<double>(bits);
  }
  return SpectralCube(t0, dt, n_t, std::move(exc), std::move(det), std::move(values), kv.at("label"));
}

// --------------------------------------------------------------- operations

TimeTrace extract_trace(const SpectralCube& cube, const PixelCoord& p) {
  const auto s = cube.snap(p);
  return TimeTrace(cube.t0(), cube.dt(), cube.pixel_series(s.excitation_index, s.detection_index),
                   TraceOrigin{s.coord, std::nullopt});
}

SpectralCube crop_population(const SpectralCube& cube, double t_min_fs, double t_max_fs) {
  if (!(t_min_fs < t_max_fs)) throw Error(ErrorKind::EmptySelection, "crop bounds must satisfy t_min < t_max");
  const double eps = 1e-9 * cube.dt();
  std::size_t first = cube.n_population();
  std::size_t last = 0;
  for (std::size_t i = 0; i < cube.n_population(); ++i) {
    const double t = cube.population_time(i);
    if (t >= t_min_fs - eps && t <= t_max_fs + eps) {
      first = std::min(first, i);
      last = i;
    }
  }
  if (first == cube.n_population()) {
    throw Error(ErrorKind::EmptySelection, "no population times inside [" + format_double(t_min_fs) + ", " +
                                               format_double(t_max_fs) + "] fs");
  }
  const std::size_t plane = cube.n_excitation() * cube.n_detection();
  std::vector<double> values(cube.values().begin() + first * plane, cube.values().begin() + (last + 1) * plane);
  return SpectralCube(cube.population_time(first), cube.dt(), last - first + 1, cube.excitation_nm(),
                      cube.detection_nm(), std::move(values), cube.label());
}

TimeTrace detrend(const TimeTrace& trace, int order) {
  const auto n = static_cast<Eigen::Index>(trace.size());
  if (order < 0) throw Error(ErrorKind::InvalidArgument, "detrend order must be >= 0");
  if (order + 1 >= n) {
    throw Error(ErrorKind::Underdetermined,
                "order " + std::to_string(order) + " needs more than " + std::to_string(order + 1) + " samples");
  }
  // Abscissa mapped to [-1, 1] keeps the Vandermonde matrix well conditioned.
  Eigen::MatrixXd basis(n, order + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = 2.0 * static_cast<double>(i) / static_cast<double>(n - 1) - 1.0;
    double p = 1.0;
    for (int k = 0; k <= order; ++k) {
      basis(i, k) = p;
      p *= x;
    }
  }
  const Eigen::Map<const Eigen::VectorXd> y(trace.values().data(), n);
  const Eigen::VectorXd coef = basis.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd residual = y - basis * coef;
  return TimeTrace(trace.t0(), trace.dt(), std::vector<double>(residual.data(), residual.data() + n), trace.origin());
}

SpectralCube detrend_cube(const SpectralCube& cube, int order, unsigned threads) {
  const std::size_t n_e = cube.n_excitation();
  const std::size_t n_d = cube.n_detection();
  std::vector<double> values(cube.values().size());
  detail::parallel_for(n_e * n_d, threads, [&](std::size_t, std::size_t pixel) {
    const std::size_t e = pixel / n_d;
    const std::size_t d = pixel % n_d;
    const auto r = detrend(TimeTrace(cube.t0(), cube.dt(), cube.pixel_series(e, d)), order);
    for (std::size_t t = 0; t < cube.n_population(); ++t) values[cube.index(t, e, d)] = r[t];
  });
  return SpectralCube(cube.t0(), cube.dt(), cube.n_population(), cube.excitation_nm(), cube.detection_nm(),
                      std::move(values), cube.label());
}

// ---------------------------------------------------------------------- csv

void write_trace_csv(const TimeTrace& trace, const std::filesystem::path& path) {
  std::string out = "t_fs,value\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out += format_double(trace.time(i));
    out += ',';
    out += format_double(trace[i]);
    out += '\n';
  }
  detail::write_text_file(path, out);
}

TimeTrace read_trace_csv(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw Error(ErrorKind::MissingFile, path.string() + " not found");
  const auto rows = detail::read_csv_rows(detail::read_text_file(path));
  if (rows.empty() || rows.front().size() != 2 || rows.front()[0] != "t_fs") {
    throw Error(ErrorKind::MalformedCsv, path.string() + ": expected header t_fs,value");
  }
  std::vector<double> t;
  std::vector<double> y;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 2) throw Error(ErrorKind::MalformedCsv, path.string() + ": row " + std::to_string(r) + " needs 2 fields");
    try {
      t.push_back(detail::parse_double(rows[r][0]));
      y.push_back(detail::parse_double(rows[r][1]));
    } catch (const Error&) {
      throw Error(ErrorKind::MalformedCsv, path.string() + ": bad number in row " + std::to_string(r));
    }
  }
  return TimeTrace::from_samples(t, std::move(y));
}

}  // namespace beatscope
