#include <doctest.h>

#include <algorithm>
#include <complex>

#include "beatscope/diagnostics.hpp"
#include "beatscope/error.hpp"
#include "beatscope/wavelet.hpp"
#include "support.hpp"

using namespace beatscope;
using namespace test_support;
using cplx = std::complex<double>;

namespace {

// Independent Morlet with a selectable carrier sign.
cplx psi(double T, double fb, double fc, double sign = -1.0) {
  return std::pow(kPi * fb, -0.5) * std::exp(-T * T / fb) * std::polar(1.0, sign * 2 * kPi * fc * T);
}

// Full untruncated sum over the record.
cplx oracle(std::span<const double> y, double s, std::size_t u, double fb = 2, double fc = 1, double sign = -1.0) {
  cplx acc{};
  for (std::size_t n = 0; n < y.size(); ++n) {
    acc += y[n] * std::conj(psi((static_cast<double>(n) - static_cast<double>(u)) / s, fb, fc, sign) / std::sqrt(s));
  }
  return acc;
}

std::vector<double> random_values(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n01;
  std::vector<double> y(n);
  for (auto& v : y) v = n01(rng);
  return y;
}

ScaleSet scales(std::initializer_list<double> nus, double dt = 20) {
  std::vector<double> v(nus);
  return scales_for_frequencies(v, dt);
}

}  // namespace

TEST_CASE("morlet evaluation") {
  const auto z0 = morlet(0.0);
  CHECK(z0.real() == doctest::Approx(0.398942).epsilon(1e-6));
  CHECK(z0.imag() == 0.0);
  CHECK(std::abs(morlet(1.0)) == doctest::Approx(0.241971).epsilon(1e-6));
  for (double T : {0.3, 1.7, -2.2, 4.0}) {
    const auto a = morlet(T);
    const auto b = std::conj(morlet(-T));
    CHECK(std::abs(a - b) < 1e-15);
    CHECK(std::abs(a - psi(T, 2, 1)) < 1e-15);
  }
  const MorletParams wide{10.0, 1.5};
  CHECK(std::abs(morlet(0.8, wide) - psi(0.8, 10.0, 1.5)) < 1e-15);
}

TEST_CASE("scale and pseudofrequency mapping") {
  const auto set = scales({340, 120});
  CHECK(set.scales[0] == doctest::Approx(4.9054).epsilon(1e-4));
  CHECK(set.scales[1] == doctest::Approx(13.898).epsilon(1e-4));
  const double unit_nu = 1.0 / (kC * 20);
  CHECK(scales({unit_nu}).scales[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(pseudofrequency(4.9054, 20) == doctest::Approx(340).epsilon(0.01 / 340));
  for (double nu = 30; nu < 900; nu += 13.7) {
    const double s = scales({nu}).scales[0];
    CHECK(std::abs(pseudofrequency(s, 20) - nu) <= 1e-12 * nu);
  }
  CHECK_THROWS_AS(scales({340, 0}), Error);
  try {
    scales({-5});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonPositiveFrequency);
  }
  try {
    pseudofrequency(0, 20);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonPositiveScale);
  }
}

TEST_CASE("cone of influence") {
  CHECK(cone_of_influence(4.9054) == 10);
  CHECK(cone_of_influence(13.898) == 28);
  CHECK(cone_of_influence(1e-6) == 1);
  const auto sc = cwt(tones({340}), scales({340}));
  CHECK(sc.coi_margin[0] == 10);
  CHECK(sc.in_coi(0, 9));
  CHECK_FALSE(sc.in_coi(0, 10));
  CHECK_FALSE(sc.in_coi(0, 36));
  CHECK(sc.in_coi(0, 37));
}

TEST_CASE("cwt matches the direct sum oracle") {
  const auto set = scales({60, 120, 190, 265, 340, 440, 600});
  for (unsigned seed = 0; seed < 5; ++seed) {
    const auto y = random_values(47, seed);
    const auto sc = cwt(TimeTrace(80, 20, y), set);
    for (std::size_t s = 0; s < set.scales.size(); ++s) {
      double top = 0;
      for (std::size_t u = 0; u < y.size(); ++u) top = std::max(top, std::abs(oracle(y, set.scales[s], u)));
      for (std::size_t u = 0; u < y.size(); ++u) {
        CHECK(std::abs(sc.at(s, u) - oracle(y, set.scales[s], u)) <= 1e-10 * top);
      }
    }
  }
}

TEST_CASE("cwt of zero and impulse signals") {
  const auto set = scales({340, 190});
  const auto zero = cwt(TimeTrace(0, 20, std::vector<double>(40, 0.0)), set);
  for (const auto& c : zero.coeffs) CHECK(c == cplx{});

  std::vector<double> y(60, 0.0);
  const std::size_t n0 = 27;
  y[n0] = 1.0;
  const auto sc = cwt(TimeTrace(0, 20, y), set);
  for (std::size_t s = 0; s < set.scales.size(); ++s) {
    const double sv = set.scales[s];
    std::size_t best = 0;
    for (std::size_t u = 0; u < y.size(); ++u) {
      const double x = (static_cast<double>(u) - n0) / sv;
      const double expected = std::pow(2 * kPi, -0.5) * std::exp(-x * x / 2) / std::sqrt(sv);
      CHECK(std::abs(std::abs(sc.at(s, u)) - expected) < 1e-15);
      if (std::abs(sc.at(s, u)) > std::abs(sc.at(s, best))) best = u;
    }
    CHECK(best == n0);
  }
}

TEST_CASE("cwt linearity, homogeneity and shift covariance") {
  const auto set = scales({120, 340});
  const auto x = random_values(64, 21);
  const auto y = random_values(64, 22);
  std::vector<double> mix(64);
  for (std::size_t i = 0; i < 64; ++i) mix[i] = 1.5 * x[i] - 2.0 * y[i];
  const auto cx = cwt(TimeTrace(0, 20, x), set);
  const auto cy = cwt(TimeTrace(0, 20, y), set);
  const auto cm = cwt(TimeTrace(0, 20, mix), set);
  for (std::size_t i = 0; i < cm.coeffs.size(); ++i) {
    CHECK(std::abs(cm.coeffs[i] - (1.5 * cx.coeffs[i] - 2.0 * cy.coeffs[i])) <= 1e-10 * (1 + std::abs(cm.coeffs[i])));
  }

  std::vector<double> scaled(x);
  for (auto& v : scaled) v *= 3.25;
  const auto cs = cwt(TimeTrace(0, 20, scaled), set);
  for (std::size_t i = 0; i < cs.coeffs.size(); ++i) {
    CHECK(std::abs(std::abs(cs.coeffs[i]) - 3.25 * std::abs(cx.coeffs[i])) <= 1e-12 * (1 + std::abs(cs.coeffs[i])));
  }

  // Shift by k samples: the record is padded with zeros on the left.
  const std::size_t k = 5;
  std::vector<double> shifted(64 + k, 0.0);
  std::copy(x.begin(), x.end(), shifted.begin() + k);
  const auto ck = cwt(TimeTrace(0, 20, shifted), set);
  for (std::size_t s = 0; s < set.scales.size(); ++s) {
    const std::size_t m = cx.coi_margin[s];
    for (std::size_t u = m; u + m < 64; ++u) {
      CHECK(std::abs(ck.at(s, u + k) - cx.at(s, u)) <= 1e-8 * (1 + std::abs(cx.at(s, u))));
    }
  }
}

TEST_CASE("carrier sign does not change magnitudes") {
  const auto y = random_values(47, 4);
  const auto set = scales({190, 340});
  const auto sc = cwt(TimeTrace(80, 20, y), set);
  // For real input, flipping the carrier sign conjugates every coefficient.
  for (std::size_t s = 0; s < set.scales.size(); ++s) {
    for (std::size_t u = 0; u < y.size(); ++u) {
      CHECK(std::abs(std::abs(sc.at(s, u)) - std::abs(oracle(y, set.scales[s], u, 2, 1, +1.0))) < 1e-10);
    }
  }
}

TEST_CASE("pure tone: flat inside the COI and peaked at its scale") {
  const auto tr = tones({340});
  const auto sc = cwt(tr, scales({340}));
  double lo = 1e300, hi = 0;
  for (std::size_t u = 0; u < tr.size(); ++u) {
    if (sc.in_coi(0, u)) continue;
    lo = std::min(lo, std::abs(sc.at(0, u)));
    hi = std::max(hi, std::abs(sc.at(0, u)));
  }
  CHECK(hi / lo < 1.1);

  std::vector<double> nus;
  for (int i = 0; i < 50; ++i) nus.push_back(150 + i * 10.0);
  const auto set = scales_for_frequencies(nus, 20);
  const auto full = cwt(tr, set);
  std::size_t best = 0;
  double best_mean = 0;
  for (std::size_t s = 0; s < set.scales.size(); ++s) {
    double mean = 0;
    std::size_t count = 0;
    for (std::size_t u = 0; u < tr.size(); ++u) {
      if (full.in_coi(s, u)) continue;
      mean += std::abs(full.at(s, u));
      ++count;
    }
    mean /= static_cast<double>(std::max<std::size_t>(count, 1));
    if (mean > best_mean) {
      best_mean = mean;
      best = s;
    }
  }
  CHECK(std::abs(nus[best] - 340) <= 10);
}

TEST_CASE("cwt argument checks") {
  CHECK_THROWS_AS(cwt(TimeTrace(0, 20, std::vector<double>(7, 1.0)), scales({340})), Error);
  CHECK_THROWS_AS(cwt(tones({340}), scales({340}, 10)), Error);
  CHECK_THROWS_AS(cwt(tones({340}), scales({340}), MorletParams{0, 1}), Error);
}

TEST_CASE("time-resolved maps are local and match per-pixel transforms") {
  const auto t = grid(80, 1000, 20);
  const std::vector<double> exc = {670, 671, 672};
  const std::vector<double> det = {680, 681, 682, 683};
  std::vector<double> v(t.size() * exc.size() * det.size(), 0.0);
  for (std::size_t i = 0; i < t.size(); ++i) v[(i * exc.size() + 1) * det.size() + 2] = std::cos(2 * kPi * kC * 340 * t[i]);
  const SpectralCube cube(80, 20, t.size(), exc, det, v);
  const auto map = time_resolved_frequency_map(cube, 340, {}, 2);
  CHECK(map.scale == doctest::Approx(4.9054).epsilon(1e-4));
  CHECK(map.coi_margin == 10);
  CHECK(map.u_fs == t);
  double top = 0;
  for (double a : map.amplitude) top = std::max(top, a);
  for (std::size_t u = 0; u < t.size(); ++u) {
    for (std::size_t e = 0; e < exc.size(); ++e) {
      for (std::size_t d = 0; d < det.size(); ++d) {
        if (e == 1 && d == 2) continue;
        CHECK(map.at(u, e, d) <= 1e-6 * top);
      }
    }
  }

  std::mt19937 rng(2);
  std::normal_distribution<double> n01;
  for (auto& x : v) x = n01(rng);
  const SpectralCube noisy(80, 20, t.size(), exc, det, v);
  const auto nmap = time_resolved_frequency_map(noisy, 190, {}, 3);
  const double s = scales({190}).scales[0];
  const auto slice = nmap.slice_at(500);
  const std::size_t u500 = 21;
  CHECK(slice.quantity == "abs_cwt");
  for (std::size_t e = 0; e < exc.size(); ++e) {
    for (std::size_t d = 0; d < det.size(); ++d) {
      const double o = std::abs(oracle(noisy.pixel_series(e, d), s, u500));
      CHECK(std::abs(slice.at(e, d) - o) <= 1e-10 * o);
    }
  }
  CHECK(time_resolved_frequency_map(noisy, 190, {}, 1).amplitude == nmap.amplitude);
  CHECK_THROWS_AS(nmap.slice_at(2000), Error);
}

TEST_CASE("wavelet traces") {
  const auto t = grid(80, 1000, 20);
  const std::vector<double> exc = {675, 677};
  const std::vector<double> det = {681, 683};
  auto cube_with = [&](auto&& fn) {
    std::vector<double> v(t.size() * 4, 0.0);
    for (std::size_t i = 0; i < t.size(); ++i) v[i * 4 + 1] = fn(t[i]);
    return SpectralCube(80, 20, t.size(), exc, det, v);
  };

  SUBCASE("origin tag") {
    const auto cube = cube_with([](double ti) { return std::cos(2 * kPi * kC * 340 * ti); });
    const auto wt = wavelet_trace(cube, {675.2, 682.9}, 340);
    REQUIRE(wt.origin());
    CHECK(wt.origin()->pixel.excitation_nm == 675);
    CHECK(wt.origin()->pixel.detection_nm == 683);
    CHECK(*wt.origin()->wavenumber_cm == 340);
    // Single tone: flat inside the cone of influence.
    const auto inner = trim_edges(wt, 10);
    const auto [lo, hi] = std::minmax_element(inner.values().begin(), inner.values().end());
    CHECK(*hi / *lo < 1.1);
    CHECK_THROWS_AS(wavelet_trace(cube, {700, 681}, 340), Error);
  }
  SUBCASE("305 + 375 cm^-1 beat has minima 476 fs apart") {
    const auto cube = cube_with([](double ti) {
      return std::cos(2 * kPi * kC * 305 * ti) + std::cos(2 * kPi * kC * 375 * ti);
    });
    const auto wt = wavelet_trace(cube, {675, 683}, 340);
    std::vector<double> minima;
    for (std::size_t i = 1; i + 1 < wt.size(); ++i) {
      if (wt[i] < wt[i - 1] && wt[i] < wt[i + 1]) minima.push_back(wt.time(i));
    }
    REQUIRE(minima.size() >= 2);
    CHECK(std::abs(minima[1] - minima[0] - 1 / (kC * 70)) <= 25);
  }
  SUBCASE("damped tone decays with its own 1/e time") {
    const auto cube = cube_with([](double ti) { return 3.0 * std::exp(-ti / 520) * std::cos(2 * kPi * kC * 340 * ti); });
    const auto wt = wavelet_trace(cube, {675, 683}, 340);
    // Inside the cone the envelope follows exp(-t/520) up to a constant within 3%.
    const auto inner = trim_edges(wt, cone_of_influence(scales({340}).scales[0]));
    std::vector<double> ratio;
    for (std::size_t i = 0; i < inner.size(); ++i) ratio.push_back(inner[i] / std::exp(-inner.time(i) / 520));
    const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
    CHECK(*hi / *lo < 1.03);
    // The residual edge bias matters on a one-tau window with a free offset, so the fit uses a long record.
    const auto long_tone = TimeTrace(80, 20, [] {
      std::vector<double> y;
      for (double ti : grid(80, 3000, 20)) y.push_back(3.0 * std::exp(-ti / 520) * std::cos(2 * kPi * kC * 340 * ti));
      return y;
    }());
    const auto sc = cwt(long_tone, scales({340}));
    std::vector<double> env;
    for (std::size_t u = 0; u < long_tone.size(); ++u) env.push_back(std::abs(sc.at(0, u)));
    const auto fit = fit_exp_decay(trim_edges(TimeTrace(80, 20, env), sc.coi_margin[0]));
    CHECK(std::abs(fit.one_over_e_fs - 520) <= 26);
  }
}

TEST_CASE("scalogram CSV has one row per scale") {
  std::vector<double> nus;
  for (int v = 100; v <= 500; v += 20) nus.push_back(v);
  const auto sc = cwt(tones({340}), scales_for_frequencies(nus, 20));
  const auto dir = scratch("scalogram");
  write_scalogram_csv(sc, dir / "s.csv");
  std::istringstream in(slurp(dir / "s.csv"));
  std::string line;
  std::size_t data_rows = 0;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      CHECK(std::count(line.begin(), line.end(), ',') == static_cast<long>(3 + sc.n_times() - 1));
      continue;
    }
    ++data_rows;
  }
  CHECK(data_rows == nus.size());
}
