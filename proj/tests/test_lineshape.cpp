#include <doctest.h>

#include <algorithm>
#include <array>
#include <complex>

#include "beatscope/diagnostics.hpp"
#include "beatscope/error.hpp"
#include "beatscope/fourier.hpp"
#include "beatscope/lineshape.hpp"
#include "beatscope/spectral_cube.hpp"
#include "beatscope/units.hpp"
#include "lineshape_oracle.hpp"
#include "support.hpp"

using namespace beatscope;
using namespace test_support;
using cplx = std::complex<double>;

namespace {

LineShapeModel single_mode(double w, double s, double lambda) {
  LineShapeModel m;
  m.modes = {{w, s}};
  m.bath.reorganization_cm = lambda;
  return m;
}

double peak_near(const AmplitudeSpectrum& spec, double center, double half_width) {
  double best = -1e300;
  for (std::size_t k = 0; k < spec.wavenumber_cm.size(); ++k) {
    if (std::abs(spec.wavenumber_cm[k] - center) <= half_width) best = std::max(best, spec.amplitude[k]);
  }
  return best;
}

double first_moment(const AmplitudeSpectrum& spec) {
  double num = 0, den = 0;
  for (std::size_t k = 0; k < spec.wavenumber_cm.size(); ++k) {
    num += spec.wavenumber_cm[k] * spec.amplitude[k];
    den += spec.amplitude[k];
  }
  return num / den;
}

std::vector<double> range(double a, double b, double step) {
  std::vector<double> v;
  for (int i = 0; a + i * step <= b + 1e-9; ++i) v.push_back(a + i * step);
  return v;
}

}  // namespace

TEST_CASE("vibrational line shape") {
  const VibrationalMode m{340, 0.1};
  CHECK(g_vibrational(0, m, 80) == cplx{});
  const double coth = 1 / std::tanh(340 / (2 * 80 * kKb));
  CHECK(coth == doctest::Approx(1.00443).epsilon(1e-5));
  const double period = 1 / (kC * 340);
  const auto half = g_vibrational(period / 2, m, 80);
  CHECK(half.real() == doctest::Approx(0.2009).epsilon(1e-3));
  CHECK(half.real() == doctest::Approx(2 * 0.1 * coth).epsilon(1e-12));
  const auto full = g_vibrational(period, m, 80);
  CHECK(std::abs(full.real()) < 1e-12);
  CHECK(full.imag() == doctest::Approx(-0.6283).epsilon(1e-4));
}

TEST_CASE("Brownian line shape") {
  const BrownianBath b{50, 0.01};
  CHECK(g_brownian(0, b, 80) == cplx{});
  const double lam = angular(50);
  const double theta = angular(kKb * 80);
  const double t_short = 1e-3 / b.inverse_correlation_fs;
  CHECK(g_brownian(t_short, b, 80).real() == doctest::Approx(lam * theta * t_short * t_short).epsilon(1e-3));
  const double t_long = 50 / b.inverse_correlation_fs;
  const double h = 1.0;
  const double slope = (g_brownian(t_long + h, b, 80).real() - g_brownian(t_long - h, b, 80).real()) / (2 * h);
  CHECK(slope == doctest::Approx(2 * lam * theta / b.inverse_correlation_fs).epsilon(1e-6));
}

TEST_CASE("total line shape") {
  LineShapeModel empty;
  empty.bath.reorganization_cm = 0;
  for (double t : {0.0, 13.0, 250.0}) CHECK(g_total(t, empty) == cplx{});

  auto a = single_mode(190, 0.2, 0);
  auto b = single_mode(440, 0.05, 0);
  auto ab = a;
  ab.modes.push_back(b.modes[0]);
  for (double t : {7.0, 100.0, 333.0}) CHECK(std::abs(g_total(t, a) + g_total(t, b) - g_total(t, ab)) < 1e-14);

  // Term-wise oracle for the default five-mode model.
  const auto five_mode = LineShapeModel::five_mode_default();
  const double t = 100;
  cplx expected{};
  for (double w : {120.0, 190.0, 265.0, 340.0, 440.0}) {
    const double wr = angular(w);
    const double coth = 1 / std::tanh(w / (2 * kKb * 80));
    expected += 0.1 * cplx(coth * (1 - std::cos(wr * t)), std::sin(wr * t) - wr * t);
  }
  const double lam = angular(50), theta = angular(kKb * 80), L = 0.01;
  const double x = std::exp(-L * t) + L * t - 1;
  expected += cplx(2 * lam * theta / (L * L) * x, -lam / L * x);
  CHECK(std::abs(g_total(t, five_mode) - expected) < 1e-12);

  for (double tt = 0; tt < 3000; tt += 7.3) {
    CHECK(g_brownian(tt, five_mode.bath, 80).real() >= 0);
    for (const auto& m : five_mode.modes) CHECK(g_vibrational(tt, m, 80).real() >= 0);
  }
}

TEST_CASE("pathway factors cancel at t1 = t3 = 0") {
  const auto five_mode = LineShapeModel::five_mode_default();
  for (double t2 = 0; t2 <= 2000; t2 += 20) {
    const auto f = rephasing_pathways(0, t2, 0, five_mode);
    CHECK(std::abs(f.stimulated_emission - 1.0) < 1e-12);
    CHECK(std::abs(f.ground_state_bleach - 1.0) < 1e-12);
    CHECK(std::abs(rephasing_response(0, t2, 0, five_mode) - 2.0) < 1e-12);
  }
}

TEST_CASE("classical limit equals the brute-force cumulant integral") {
  const auto five_mode = LineShapeModel::five_mode_default();
  for (double t1 : {0.0, 20.0, 60.0, 120.0}) {
    for (double t2 : {0.0, 40.0, 200.0}) {
      for (double t3 : {10.0, 60.0, 140.0}) {
        const auto f = rephasing_pathways(t1, t2, t3, five_mode, true);
        const double oracle = brute_force_factor(t1, t2, t3, five_mode);
        CAPTURE(t1);
        CAPTURE(t2);
        CAPTURE(t3);
        CHECK(std::abs(f.stimulated_emission.imag()) < 1e-15);
        CHECK(std::abs(f.stimulated_emission.real() - oracle) <= 1e-6 * oracle);
        CHECK(std::abs(f.ground_state_bleach.real() - oracle) <= 1e-6 * oracle);
      }
    }
  }
}

TEST_CASE("classical factors never exceed one") {
  const auto five_mode = LineShapeModel::five_mode_default();
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(0, 800);
  for (int i = 0; i < 500; ++i) {
    const auto f = rephasing_pathways(u(rng), u(rng), u(rng), five_mode, true);
    CHECK(std::abs(f.stimulated_emission) <= 1 + 1e-12);
    CHECK(std::abs(f.ground_state_bleach) <= 1 + 1e-12);
  }
}

TEST_CASE("single mode response beats at the mode frequency along t2") {
  const auto model = single_mode(340, 0.1, 0);
  std::vector<double> y;
  for (double t2 = 0; t2 <= 4000; t2 += 10) y.push_back(std::abs(rephasing_response(50, t2, 50, model)));
  double mean = 0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  for (auto& v : y) v -= mean;
  const auto spec = ft_spectrum(TimeTrace(0, 10, y), 4);
  const auto k = static_cast<std::size_t>(std::max_element(spec.amplitude.begin(), spec.amplitude.end()) -
                                          spec.amplitude.begin());
  CHECK(std::abs(spec.wavenumber_cm[k] - 340) <= 10);
}

TEST_CASE("linear absorption") {
  SUBCASE("free oscillator gives one line at the gap") {
    LineShapeModel bare;
    bare.bath.reorganization_cm = 0;
    LinearSpectrumOptions opt;
    opt.damping_cm = 1;
    const auto grid = range(bare.electronic_gap_cm - 50, bare.electronic_gap_cm + 50, 0.5);
    const auto spec = linear_absorption(bare, grid, opt);
    const auto k = std::max_element(spec.amplitude.begin(), spec.amplitude.end()) - spec.amplitude.begin();
    CHECK(std::abs(spec.wavenumber_cm[k] - bare.electronic_gap_cm) <= 0.5);
  }
  SUBCASE("Franck-Condon sideband ratio") {
    const auto model = single_mode(340, 0.1, 5);
    const double origin = model.electronic_gap_cm - model.total_reorganization_cm();
    const auto grid = range(origin - 300, origin + 800, 0.5);
    const auto spec = linear_absorption(model, grid);
    const double i0 = peak_near(spec, origin, 15);
    const double i1 = peak_near(spec, origin + 340, 15);
    CHECK(i0 == doctest::Approx(1.0));
    CHECK(std::abs(i1 / i0 - 0.10) <= 0.02);
    double lowest = 0;
    for (double a : spec.amplitude) lowest = std::min(lowest, a);
    CHECK(lowest >= -1e-3);
  }
  SUBCASE("Stokes shift of the bath-only model") {
    LineShapeModel bath;
    bath.bath.reorganization_cm = 50;
    const auto grid = range(bath.electronic_gap_cm - 1200, bath.electronic_gap_cm + 1200, 1);
    const double abs_moment = first_moment(linear_absorption(bath, grid));
    const double em_moment = first_moment(linear_emission(bath, grid));
    CHECK(std::abs(abs_moment - em_moment - 100) <= 10);
  }
  SUBCASE("unresolved grid") {
    LinearSpectrumOptions opt;
    opt.dt_fs = 10;
    const auto five_mode = LineShapeModel::five_mode_default();
    try {
      linear_absorption(five_mode, {five_mode.electronic_gap_cm}, opt);
      FAIL("expected UnresolvedGrid");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::UnresolvedGrid);
    }
  }
}

TEST_CASE("model and grid validation") {
  auto bad = LineShapeModel::five_mode_default();
  bad.temperature_k = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = LineShapeModel::five_mode_default();
  bad.bath.inverse_correlation_fs = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = LineShapeModel::five_mode_default();
  bad.modes[0].huang_rhys = -0.1;
  CHECK_THROWS_AS(bad.validate(), Error);

  SimulationGrids g;
  CHECK(g.t1.count() == 201);
  CHECK(g.t2.count() == 51);
  g.t1.start = 10;
  CHECK_THROWS_AS(g.validate(), Error);
}

TEST_CASE("bath-only cube has a single diagonal peak that does not beat") {
  LineShapeModel bath;
  bath.modes.clear();
  SimulationGrids g;
  g.t1 = {0, 300, 3};
  g.t3 = {0, 300, 3};
  g.t2 = {0, 1000, 20};
  g.excitation_nm = {660, 700, 1};
  g.detection_nm = {660, 700, 1};
  const auto result = simulate_cube(bath, g, 2);
  const auto& cube = result.cube;
  CHECK(cube.n_population() == 51);
  // Strongest pixel over all population times sits on the diagonal near the gap.
  std::size_t best = 0;
  for (std::size_t i = 0; i < cube.values().size(); ++i) {
    if (cube.values()[i] > cube.values()[best]) best = i;
  }
  const std::size_t plane = cube.n_excitation() * cube.n_detection();
  const std::size_t e = (best % plane) / cube.n_detection();
  const std::size_t d = best % cube.n_detection();
  CHECK(std::abs(cube.excitation_nm()[e] - 680) <= 2);
  CHECK(std::abs(cube.excitation_nm()[e] - cube.detection_nm()[d]) <= 2);

  // Population dynamics are a smooth relaxation set by the bath correlation time: monotone over
  // 80-1000 fs and described by one exponential to within 1% of the level.
  const auto tr = extract_trace(crop_population(cube, 80, 1000), {cube.excitation_nm()[e], cube.detection_nm()[d]});
  for (std::size_t i = 1; i < tr.size(); ++i) CHECK(tr[i] <= tr[i - 1]);
  const auto fit = fit_exp_decay(tr);
  CHECK(fit.rms_residual <= 0.01 * tr[0]);
  CHECK(fit.time_constant_fs < 1000);
  CHECK(simulate_cube(bath, g, 1).cube.values() == cube.values());
}

TEST_CASE("single-mode cube shows a cross peak one quantum below the diagonal") {
  const auto model = single_mode(340, 0.1, 10);
  SimulationGrids g;
  g.t1 = {0, 600, 2};
  g.t3 = {0, 600, 2};
  g.t2 = {0, 0, 20};
  g.excitation_nm = {640, 720, 0.5};
  g.detection_nm = {640, 720, 0.5};
  const auto cube = simulate_cube(model, g, 2).cube;
  const double origin = model.electronic_gap_cm - model.total_reorganization_cm();
  // Look for the strongest |value| with detection around origin - 340, excitation near origin.
  double diag = 0;
  double cross = 0;
  double cross_det = 0;
  for (std::size_t e = 0; e < cube.n_excitation(); ++e) {
    const double ne = nm_to_wavenumber(cube.excitation_nm()[e]);
    if (std::abs(ne - origin) > 40) continue;
    for (std::size_t d = 0; d < cube.n_detection(); ++d) {
      const double nd = nm_to_wavenumber(cube.detection_nm()[d]);
      const double v = std::abs(cube.at(0, e, d));
      if (std::abs(nd - origin) <= 40) diag = std::max(diag, v);
      if (std::abs(nd - (origin - 340)) <= 60 && v > cross) {
        cross = v;
        cross_det = nd;
      }
    }
  }
  CHECK(cross > 0.02 * diag);
  CHECK(std::abs(origin - cross_det - 340) <= 30);
}
