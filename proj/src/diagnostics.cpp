#include "beatscope/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "beatscope/error.hpp"
#include "beatscope/units.hpp"

namespace beatscope {

namespace {

struct LinearFit {
  double amplitude = 0.0;  // at the first sample
  double offset = 0.0;
  double sse = 0.0;
};

// Solves y ~ a * x + b in closed form using centred sums.
LinearFit solve_linear(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LinearFit fit;
  fit.amplitude = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.offset = my - fit.amplitude * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.amplitude * x[i] - fit.offset;
    fit.sse += r * r;
  }
  return fit;
}

LinearFit fit_at(const TimeTrace& trace, double tau, std::vector<double>& basis) {
  for (std::size_t i = 0; i < trace.size(); ++i) basis[i] = std::exp(-static_cast<double>(i) * trace.dt() / tau);
  return solve_linear(basis, trace.values());
}

double interpolate(const TimeTrace& trace, double t) {
  const double span = trace.back_time() - trace.t0();
  const double eps = 1e-9 * trace.dt();
  if (t < trace.t0() - eps || t > trace.back_time() + eps) {
    throw Error(ErrorKind::OutOfRange, "t = " + format_double(t) + " fs lies outside the trace");
  }
  const double x = std::clamp((t - trace.t0()) / trace.dt(), 0.0, span / trace.dt());
  const auto i = std::min(static_cast<std::size_t>(std::floor(x)), trace.size() - 1);
  if (i + 1 >= trace.size()) return trace[i];
  const double frac = x - static_cast<double>(i);
  if (frac == 0.0) return trace[i];
  return trace[i] + frac * (trace[i + 1] - trace[i]);
}

std::string optional_number(const std::optional<double>& x) {
  return x ? format_double(*x) : std::string("none");
}

std::string join_matches(const std::vector<CandidateMatch>& matches) {
  std::string out;
  for (std::size_t i = 0; i < matches.size(); ++i) {
    if (i) out += ';';
    out += format_double(matches[i].candidate_cm) + ':' + format_double(matches[i].detected_cm) + ':' +
           format_double(matches[i].difference_cm);
  }
  return out;
}

}  // namespace

std::vector<double> envelope_maxima(const TimeTrace& trace) {
  std::vector<double> maxima;
  const std::size_t n = trace.size();
  if (n < 5) return maxima;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double a = trace[k - 1];
    const double b = trace[k];
    const double c = trace[k + 1];
    if (!(b > a && b > c)) continue;
    const double curvature = a - 2.0 * b + c;
    const double offset = curvature < 0.0 ? std::clamp(0.5 * (a - c) / curvature, -0.5, 0.5) : 0.0;
    maxima.push_back(trace.time(k) + offset * trace.dt());
  }
  return maxima;
}

std::optional<double> beat_period(const TimeTrace& trace) {
  const auto maxima = envelope_maxima(trace);
  if (maxima.size() < 2) return std::nullopt;
  return (maxima.back() - maxima.front()) / static_cast<double>(maxima.size() - 1);
}

FrequencyPair interfering_frequencies(double nu0_cm, double period_fs) {
  if (!(nu0_cm > 0.0) || !std::isfinite(nu0_cm)) {
    throw Error(ErrorKind::NonPositiveInput, "nu0 must be positive, got " + format_double(nu0_cm));
  }
  if (!(period_fs > 0.0)) {
    throw Error(ErrorKind::NonPositiveInput, "period must be positive, got " + format_double(period_fs));
  }
  FrequencyPair pair;
  pair.spacing_cm = std::isinf(period_fs) ? 0.0 : period_to_wavenumber(period_fs);
  pair.lower_cm = nu0_cm - pair.spacing_cm;
  pair.upper_cm = nu0_cm + pair.spacing_cm;
  pair.lower_nonpositive = pair.lower_cm <= 0.0;
  return pair;
}

std::vector<CandidateMatch> match_candidates(std::span<const double> candidates, std::span<const double> detected,
                                             double tol_cm) {
  if (!(tol_cm > 0.0)) throw Error(ErrorKind::InvalidArgument, "matching tolerance must be positive");
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    for (std::size_t j = 0; j < detected.size(); ++j) {
      const double diff = std::abs(candidates[i] - detected[j]);
      if (diff <= tol_cm) pairs.emplace_back(diff, i, j);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<bool> used_c(candidates.size(), false);
  std::vector<bool> used_d(detected.size(), false);
  std::vector<std::optional<CandidateMatch>> chosen(candidates.size());
  for (const auto& [diff, i, j] : pairs) {
    if (used_c[i] || used_d[j]) continue;
    used_c[i] = used_d[j] = true;
    chosen[i] = CandidateMatch{candidates[i], detected[j], diff};
  }
  std::vector<CandidateMatch> out;
  for (const auto& m : chosen) {
    if (m) out.push_back(*m);
  }
  return out;
}

BeatReport beat_report(const TimeTrace& trace, double nu0_cm, std::span<const double> detected, double tol_cm) {
  BeatReport report;
  report.nu0_cm = nu0_cm;
  report.maxima_fs = envelope_maxima(trace);
  report.period_fs = beat_period(trace);
  if (report.period_fs) {
    report.candidates = interfering_frequencies(nu0_cm, *report.period_fs);
    const double cands[] = {report.candidates->lower_cm, report.candidates->upper_cm};
    report.matches = match_candidates(cands, detected, tol_cm);
  }
  return report;
}

DecayFit fit_exp_decay(const TimeTrace& trace) {
  const std::size_t n = trace.size();
  if (n < 6) throw Error(ErrorKind::TooShort, "decay fit needs at least 6 samples, got " + std::to_string(n));
  double scale = 0.0;
  for (double v : trace.values()) scale = std::max(scale, std::abs(v));
  if (!(scale > 0.0)) throw Error(ErrorKind::DegenerateFit, "trace is identically zero");

  const double span = trace.back_time() - trace.t0();
  const double log_lo = std::log(trace.dt());
  const double log_hi = std::log(20.0 * span);
  constexpr int kGrid = 50;
  std::vector<double> basis(n);

  auto sse_at = [&](double log_tau) { return fit_at(trace, std::exp(log_tau), basis).sse; };

  int best = 0;
  double best_sse = std::numeric_limits<double>::infinity();
  std::vector<double> grid(kGrid);
  for (int i = 0; i < kGrid; ++i) {
    grid[i] = log_lo + (log_hi - log_lo) * i / (kGrid - 1);
    const double s = sse_at(grid[i]);
    if (s < best_sse) {
      best_sse = s;
      best = i;
    }
  }

  // Golden-section search on the bracket around the best grid node.
  double a = grid[std::max(best - 1, 0)];
  double b = grid[std::min(best + 1, kGrid - 1)];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = sse_at(x1);
  double f2 = sse_at(x2);
  for (int iter = 0; iter < 200 && (b - a) > 1e-12; ++iter) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = sse_at(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = sse_at(x2);
    }
  }
  double log_tau = 0.5 * (a + b);
  if (std::min(f1, f2) > best_sse) log_tau = grid[best];

  const double tau = std::exp(log_tau);
  const auto lin = fit_at(trace, tau, basis);
  if (std::abs(lin.amplitude) < 1e-12 * scale) {
    throw Error(ErrorKind::DegenerateFit, "no exponential component above the noise floor");
  }
  DecayFit fit;
  fit.time_constant_fs = tau;
  fit.amplitude = lin.amplitude * std::exp(trace.t0() / tau);
  fit.offset = lin.offset;
  fit.rms_residual = std::sqrt(lin.sse / static_cast<double>(n));
  // A e^{-t/tau} excess over c0 falls by 1/e after exactly tau, from any starting time.
  fit.one_over_e_fs = tau;
  return fit;
}

double fold_decay(const TimeTrace& trace, double t_a_fs, double t_b_fs) {
  const double num = interpolate(trace, t_a_fs);
  const double den = interpolate(trace, t_b_fs);
  double top = 0.0;
  for (double v : trace.values()) top = std::max(top, std::abs(v));
  if (!(std::abs(den) > 1e-12 * top)) {
    throw Error(ErrorKind::DivisionByNegligible, "trace at " + format_double(t_b_fs) + " fs is negligible");
  }
  return num / den;
}

TimeTrace trim_edges(const TimeTrace& trace, std::size_t margin) {
  if (2 * margin >= trace.size()) {
    throw Error(ErrorKind::EmptySelection, "edge margin of " + std::to_string(margin) + " samples leaves nothing");
  }
  return trace.slice(margin, trace.size() - 2 * margin);
}

std::string to_key_values(const BeatReport& report) {
  std::string out;
  out += "nu0_cm=" + format_double(report.nu0_cm) + '\n';
  out += "period_fs=" + optional_number(report.period_fs) + '\n';
  std::string maxima;
  for (std::size_t i = 0; i < report.maxima_fs.size(); ++i) maxima += (i ? "," : "") + format_double(report.maxima_fs[i]);
  out += "maxima_fs=" + maxima + '\n';
  if (report.candidates) {
    out += "delta_nu_cm=" + format_double(report.candidates->spacing_cm) + '\n';
    out += "candidates_cm=" + format_double(report.candidates->lower_cm) + ',' +
           format_double(report.candidates->upper_cm) + '\n';
    out += std::string("lower_nonpositive=") + (report.candidates->lower_nonpositive ? "true" : "false") + '\n';
  } else {
    out += "delta_nu_cm=none\ncandidates_cm=none\nlower_nonpositive=false\n";
  }
  out += "matches=" + join_matches(report.matches) + '\n';
  return out;
}

std::string to_key_values(const DecayFit& fit) {
  std::string out;
  out += "amplitude=" + format_double(fit.amplitude) + '\n';
  out += "time_constant_fs=" + format_double(fit.time_constant_fs) + '\n';
  out += "offset=" + format_double(fit.offset) + '\n';
  out += "rms_residual=" + format_double(fit.rms_residual) + '\n';
  out += "one_over_e_fs=" + format_double(fit.one_over_e_fs) + '\n';
  return out;
}

std::string beat_report_csv_header() {
  return "nu0_cm,period_fs,delta_nu_cm,lower_cm,upper_cm,lower_nonpositive,matches";
}

std::string to_csv_row(const BeatReport& report) {
  std::string row = format_double(report.nu0_cm) + ',' + optional_number(report.period_fs) + ',';
  if (report.candidates) {
    row += format_double(report.candidates->spacing_cm) + ',' + format_double(report.candidates->lower_cm) + ',' +
           format_double(report.candidates->upper_cm) + ',' + (report.candidates->lower_nonpositive ? "true" : "false");
  } else {
    row += "none,none,none,false";
  }
  return row + ',' + join_matches(report.matches);
}

std::string decay_fit_csv_header() { return "amplitude,time_constant_fs,offset,rms_residual,one_over_e_fs"; }

std::string to_csv_row(const DecayFit& fit) {
  return format_double(fit.amplitude) + ',' + format_double(fit.time_constant_fs) + ',' + format_double(fit.offset) +
         ',' + format_double(fit.rms_residual) + ',' + format_double(fit.one_over_e_fs);
}

}  // namespace beatscope
