#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "beatscope/spectral_cube.hpp"

namespace beatscope {

/// Default candidate matching tolerance in cm^-1.
inline constexpr double kDefaultMatchTolerance = 30.0;

struct FrequencyPair {
  double lower_cm = 0.0;
  double upper_cm = 0.0;
  double spacing_cm = 0.0;
  bool lower_nonpositive = false;
};

struct CandidateMatch {
  double candidate_cm = 0.0;
  double detected_cm = 0.0;
  double difference_cm = 0.0;
};

struct BeatReport {
  double nu0_cm = 0.0;
  std::optional<double> period_fs;
  std::vector<double> maxima_fs;
  std::optional<FrequencyPair> candidates;  // set when a period was found
  std::vector<CandidateMatch> matches;
};

struct DecayFit {
  double amplitude = 0.0;        // A in A exp(-t/tau) + c0, t in absolute fs
  double time_constant_fs = 0.0;
  double offset = 0.0;
  double rms_residual = 0.0;
  double one_over_e_fs = 0.0;    // elapsed time for the fitted excess over c0 to drop by 1/e
};

/// Strict interior local maxima refined by a 3-point parabola. Empty below 5 samples.
std::vector<double> envelope_maxima(const TimeTrace& trace);

/// Mean spacing of consecutive envelope maxima, or nothing with fewer than two.
std::optional<double> beat_period(const TimeTrace& trace);

/// (nu0 - dnu, nu0 + dnu) with dnu = 1 / (c * period). An infinite period gives zero spacing.
FrequencyPair interfering_frequencies(double nu0_cm, double period_fs);

/// One-to-one matching, greedy by ascending |difference|; pairs beyond `tol_cm` are dropped.
/// Output follows the order of `candidates`.
std::vector<CandidateMatch> match_candidates(std::span<const double> candidates, std::span<const double> detected,
                                             double tol_cm = kDefaultMatchTolerance);

BeatReport beat_report(const TimeTrace& trace, double nu0_cm, std::span<const double> detected,
                       double tol_cm = kDefaultMatchTolerance);

/// Least squares A exp(-t/tau) + c0: 50-point log grid of tau over [dt, 20 * span],
/// then golden-section refinement in log tau.
DecayFit fit_exp_decay(const TimeTrace& trace);

/// Linearly interpolated trace(t_a) / trace(t_b) on raw values (no baseline removed).
double fold_decay(const TimeTrace& trace, double t_a_fs, double t_b_fs);

/// Drops `margin` samples from each end, e.g. a wavelet cone of influence.
TimeTrace trim_edges(const TimeTrace& trace, std::size_t margin);

std::string to_key_values(const BeatReport& report);
std::string to_key_values(const DecayFit& fit);

std::string beat_report_csv_header();
std::string to_csv_row(const BeatReport& report);
std::string decay_fit_csv_header();
std::string to_csv_row(const DecayFit& fit);

}  // namespace beatscope
