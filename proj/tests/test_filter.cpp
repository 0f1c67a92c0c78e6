#include <doctest.h>

#include "oracles.hpp"
#include "pdeeg/error.hpp"
#include "pdeeg/filter.hpp"
#include "pdeeg/preprocess.hpp"
#include "pdeeg/spectral.hpp"
#include "pdeeg/synth.hpp"

#include <cmath>
#include <random>

using namespace pdeeg;

namespace {

Eigen::VectorXd tone(double f, double rate, Eigen::Index n, double amp = 1.0, double phase = 0.0) {
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i)
    x[i] = amp * std::sin(2.0 * std::numbers::pi * f * static_cast<double>(i) / rate + phase);
  return x;
}

double rms(const Eigen::VectorXd& x) { return std::sqrt(x.squaredNorm() / static_cast<double>(x.size())); }

}  // namespace

TEST_CASE("tap count follows the hamming length rule") {
  CHECK(hamming_tap_count(250.0, 0.5) == 1651);
  CHECK(hamming_tap_count(250.0, 1.0) == 825);
  CHECK(hamming_tap_count(100.0, 1.0) == 331);
  const auto f = design_fir_bandpass(0.5, 4.5, 250.0, 0.5);
  CHECK(f.size() == 1651);
  CHECK(f.group_delay() == 825);
  CHECK(f.window_name == "hamming");
}

TEST_CASE("taps agree with a reference windowed-sinc design") {
  const auto alpha = design_fir_bandpass(8.5, 11.5, 250.0);
  CHECK(alpha.taps[825] == doctest::Approx(0.023999999999999994).epsilon(1e-13));
  CHECK(alpha.taps[800] == doctest::Approx(0.020558537513026953).epsilon(1e-12));
  CHECK(alpha.taps[0] == doctest::Approx(-1.9076492471921524e-05).epsilon(1e-10));
  CHECK(alpha.taps.sum() == doctest::Approx(5.3462013467301748e-05).epsilon(1e-8));
  const auto delta = design_fir_bandpass(0.5, 4.5, 250.0);
  CHECK(delta.taps[825] == doctest::Approx(0.032).epsilon(1e-13));
  CHECK(std::abs(delta.taps[700]) < 1e-15);
}

TEST_CASE("taps are symmetric") {
  for (const auto& b : default_bands()) {
    const auto f = design_fir_bandpass(b.range.low_hz, b.range.high_hz, 250.0);
    REQUIRE(f.size() % 2 == 1);
    for (Eigen::Index i = 0; i < f.size(); ++i)
      CHECK(std::abs(f.taps[i] - f.taps[f.size() - 1 - i]) <= 1e-12);
  }
}

TEST_CASE("frequency response meets ripple and stopband bounds") {
  Eigen::VectorXd grid(4096);
  for (Eigen::Index i = 0; i < grid.size(); ++i) grid[i] = 125.0 * static_cast<double>(i) / 4096.0;
  for (const auto& b : default_bands()) {
    CAPTURE(b.name);
    const auto f = design_fir_bandpass(b.range.low_hz, b.range.high_hz, 250.0);
    const auto h = magnitude_response(f, grid);
    double ripple = 0.0, stop = 0.0;
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      if (grid[i] >= b.range.low_hz + 0.5 && grid[i] <= b.range.high_hz - 0.5)
        ripple = std::max(ripple, std::abs(h[i] - 1.0));
      if (grid[i] <= b.range.low_hz - 0.5 || grid[i] >= b.range.high_hz + 0.5) stop = std::max(stop, h[i]);
    }
    CHECK(ripple <= 0.0194);
    CHECK(20.0 * std::log10(stop) <= -53.0);
    const double centre = std::sqrt(b.range.low_hz * b.range.high_hz);
    CHECK(std::abs(oracle::fir_magnitude(f.taps, centre, 250.0) - 1.0) <= 0.0194);
    CHECK(oracle::fir_magnitude(f.taps, 0.0, 250.0) < std::pow(10.0, -53.0 / 20.0));
    // Band edges sit near -6 dB.
    CHECK(oracle::fir_magnitude(f.taps, b.range.low_hz, 250.0) == doctest::Approx(0.5).epsilon(0.02));
  }
}

TEST_CASE("magnitude response agrees with a direct sum") {
  const auto f = design_fir_bandpass(15.5, 30.0, 250.0);
  Eigen::VectorXd freqs(5);
  freqs << 0.0, 10.0, 20.0, 31.3, 100.0;
  const auto h = magnitude_response(f, freqs);
  for (Eigen::Index i = 0; i < freqs.size(); ++i)
    CHECK(h[i] == doctest::Approx(oracle::fir_magnitude(f.taps, freqs[i], 250.0)).epsilon(1e-9));
}

TEST_CASE("invalid bands") {
  CHECK_THROWS_AS(design_fir_bandpass(0.0, 4.0, 250.0), Error);
  CHECK_THROWS_AS(design_fir_bandpass(5.0, 4.0, 250.0), Error);
  CHECK_THROWS_AS(design_fir_bandpass(30.0, 125.0, 250.0), Error);
}

TEST_CASE("zero phase filtering keeps impulses in place") {
  const auto f = design_fir_bandpass(8.5, 11.5, 250.0);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(5000);
  x[2500] = 1.0;
  const auto y = apply_zero_phase(f, x);
  CHECK(y.size() == x.size());
  Eigen::Index at = 0;
  y.cwiseAbs().maxCoeff(&at);
  CHECK(at == 2500);
}

TEST_CASE("in-band tone keeps amplitude and phase") {
  const auto f = design_fir_bandpass(8.5, 11.5, 250.0);
  const auto x = tone(10.0, 250.0, 10000, 3.0, 0.4);
  const auto y = apply_zero_phase(f, x);
  const auto xi = x.segment(2000, 6000), yi = y.segment(2000, 6000);
  CHECK(rms(yi) / rms(xi) == doctest::Approx(1.0).epsilon(0.0194));
  // Cross-correlation lag oracle.
  int best = 0;
  double best_c = -INFINITY;
  for (int lag = -20; lag <= 20; ++lag) {
    const double c = xi.dot(y.segment(2000 + lag, 6000));
    if (c > best_c) {
      best_c = c;
      best = lag;
    }
  }
  CHECK(best == 0);
}

TEST_CASE("out-of-band tone is suppressed") {
  const auto f = design_fir_bandpass(8.5, 11.5, 250.0);
  const auto x = tone(60.0, 250.0, 10000);
  const auto y = apply_zero_phase(f, x);
  CHECK(20.0 * std::log10(rms(y.segment(2000, 6000)) / rms(x)) <= -53.0);
}

TEST_CASE("filtering is linear") {
  const auto f = design_fir_bandpass(4.5, 8.5, 250.0);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n01;
  Eigen::VectorXd x(4000), y(4000);
  for (auto& v : x) v = n01(rng);
  for (auto& v : y) v = n01(rng);
  const auto lhs = apply_zero_phase(f, 2.5 * x - 0.75 * y);
  const auto rhs = 2.5 * apply_zero_phase(f, x) - 0.75 * apply_zero_phase(f, y);
  CHECK((lhs - rhs).norm() <= 1e-9 * rhs.norm());
}

TEST_CASE("short signals are rejected") {
  const auto f = design_fir_bandpass(8.5, 11.5, 250.0);
  try {
    apply_zero_phase(f, Eigen::VectorXd::Ones(1651));
    FAIL("expected SignalTooShort");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SignalTooShort);
  }
}

TEST_CASE("resampling ratio and length") {
  const auto r = resample_ratio(512.0, 250.0);
  CHECK(r.up == 125);
  CHECK(r.down == 256);
  CHECK(resample(Eigen::VectorXd::Zero(2048), 512.0, 250.0).size() == 1000);
  CHECK(resample(Eigen::VectorXd::Zero(2049), 512.0, 250.0).size() == 1001);
  CHECK(resample(Eigen::VectorXd::Zero(92160), 512.0, 250.0).size() == 45000);
}

TEST_CASE("resampling keeps constants and tone frequency") {
  const auto c = resample(Eigen::VectorXd::Constant(8192, 3.25), 512.0, 250.0);
  CHECK((c.segment(200, c.size() - 400).array() - 3.25).abs().maxCoeff() < 1e-3);

  const auto y = resample(tone(10.0, 512.0, 8192), 512.0, 250.0);
  const auto p = periodogram(y, 250.0, Window::Hann);
  Eigen::Index at = 0;
  p.power.maxCoeff(&at);
  CHECK(p.freqs_hz[at] == doctest::Approx(10.0).epsilon(0.01));
}

TEST_CASE("upsampling is unsupported") {
  try {
    resample(Eigen::VectorXd::Zero(100), 250.0, 512.0);
    FAIL("expected UpsampleUnsupported");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UpsampleUnsupported);
  }
}
