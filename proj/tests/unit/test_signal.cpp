#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "ovsim/error.hpp"
#include "ovsim/signal.hpp"

using namespace ovsim;

namespace {

Waveform model(double I_AC, double phi, double a, double b, double c, double f, double duration, double rate) {
  Waveform w;
  w.sample_rate = rate;
  const long n = std::lround(duration * rate);
  for (long i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    w.time.push_back(t);
    w.intensity.push_back(I_AC * std::cos(2 * kPi * f * t + phi) + a * t * t + b * t + c);
  }
  return w;
}

}  // namespace

TEST_CASE("drift fit recovers randomized parameters") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double I_AC = 0.01 + 0.4 * u(rng);
    const double phi = kPi * (2 * u(rng) - 1) * 0.999;
    const double a = 2e-2 * (2 * u(rng) - 1);
    const double b = 1e-2 * (2 * u(rng) - 1);
    const double c = 0.4 + 0.2 * u(rng);
    const double f = 40 + 20 * u(rng);
    const Waveform w = model(I_AC, phi, a, b, c, f, 0.2, 10e3);
    const DriftFit fit = fit_drift(w, f);
    CHECK(std::abs(fit.I_AC - I_AC) <= 1e-6);
    CHECK(std::abs(fit.phi - phi) <= 1e-6);
    CHECK(std::abs(fit.a - a) <= 1e-6);
    CHECK(std::abs(fit.b - b) <= 1e-6);
    CHECK(std::abs(fit.c - c) <= 1e-6);
    CHECK(fit.residual_rms <= 1e-9);
  }
}

TEST_CASE("fit error is the window mean of the drift part") {
  const Waveform w = model(0.3, 0.2, 0.0, 0.0, 0.5003, 50, 0.16, 100e3);
  CHECK(fit_drift(w, 50).error == doctest::Approx(3e-4).epsilon(1e-8));
}

TEST_CASE("short windows and degenerate designs are rejected") {
  const Waveform w = model(0.3, 0.2, 0.0, 0.0, 0.5, 50, 0.06, 10e3);  // three periods
  CHECK_THROWS_WITH_AS(fit_drift(w, 50), doctest::Contains("rank-deficient"), SolverError);
  Waveform tiny;
  tiny.time = {0, 1, 2};
  tiny.intensity = {0, 0, 0};
  CHECK_THROWS_AS(fit_drift(tiny, 50), SolverError);
}

TEST_CASE("synthesized trace without stress is the ideal modulator") {
  Drive d;
  d.amplitude = 2000.0;
  const double hwv = 47e3;
  const Waveform w = synthesize({}, d, hwv);
  REQUIRE(w.time.size() == 16000);
  for (std::size_t i = 0; i < w.time.size(); i += 97) {
    const double v = d.amplitude * std::cos(2 * kPi * d.frequency * w.time[i]);
    CHECK(std::abs(w.intensity[i] - 0.5 * (1 + std::sin(kPi * v / hwv))) <= 1e-12);
  }
  const DriftFit fit = fit_drift(w, d.frequency);
  CHECK(std::abs(fit.error) < 1e-9);
  CHECK(fit.I_AC == doctest::Approx(0.5 * std::sin(kPi * d.amplitude / hwv)).epsilon(1e-3));
}

TEST_CASE("static stress shifts the fitted work point") {
  SectionBirefringence s;
  s.axis = kPi / 4;
  s.delta = 1e-3;
  const std::vector<SectionBirefringence> secs{s};
  Drive d;
  d.amplitude = 500.0;
  const DriftFit fit = fit_drift(synthesize(secs, d, 47e3), d.frequency);
  CHECK(fit.error == doctest::Approx(0.5 * std::sin(1e-3)).epsilon(1e-3));
}

TEST_CASE("bias instability is linear in tau") {
  const double B = 3.2e-4;
  for (double tau : {1.0, 7.5, 60.0, 1234.5}) {
    CHECK(sigma_bi(B, 2 * tau) == 2 * sigma_bi(B, tau));
    CHECK(sigma_bi(B, 0.25 * tau) == 0.25 * sigma_bi(B, tau));
    CHECK(sigma_bi(B, 3 * tau) == doctest::Approx(3 * sigma_bi(B, tau)).epsilon(1e-15));
  }
  CHECK(sigma_bi(B, 0.0) == 0.0);
}

TEST_CASE("bias correction round-trips") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = (2 * u(rng) - 1) * 1e-3;
    // Power-of-two durations: every product and quotient is exact.
    const double tau = std::ldexp(1.0, static_cast<int>(12 * u(rng)) - 2);
    CHECK(bias_correct(bias_correct(x, tau, 64.0), 64.0, tau) == x);
    // Arbitrary durations: within two units in the last place.
    const double t2 = 1 + 200 * u(rng), r2 = 1 + 200 * u(rng);
    const double back = bias_correct(bias_correct(x, t2, r2), r2, t2);
    CHECK(std::abs(back - x) <= 2 * std::numeric_limits<double>::epsilon() * std::abs(x));
  }
  CHECK(bias_correct(2e-4, 60, 60) == 2e-4);
  CHECK(bias_correct(2e-4, 30, 60) == doctest::Approx(4e-4).epsilon(1e-15));
  CHECK_THROWS_AS(bias_correct(1e-4, 0.0, 60), std::invalid_argument);
  CHECK_THROWS_AS(bias_correct(1e-4, 60, -1), std::invalid_argument);
  const BiasStats st = bias_stats(1e-3, 2e-4, 30, 60);
  CHECK(st.corrected_error == bias_correct(2e-4, 30, 60));
  CHECK(st.sigma_BI == sigma_bi(1e-3, 30));
}
