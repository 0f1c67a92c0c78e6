#include <doctest.h>

#include "pdeeg/bdf.hpp"
#include "pdeeg/error.hpp"
#include "pdeeg/features.hpp"
#include "pdeeg/spectral.hpp"
#include "pdeeg/synth.hpp"

#include <cmath>

using namespace pdeeg;

TEST_CASE("tone mixture") {
  const auto rec = synth::sinusoid({.rate_hz = 250.0, .duration_s = 5.0, .components = {{10.0, 1.0, 0.0}}});
  REQUIRE(rec.channels.size() == 1);
  CHECK(rec.channels[0].label == "SYN");
  const auto& x = rec.channels[0].samples;
  CHECK(x.size() == 1250);
  const double var = (x.array() - x.mean()).square().mean();
  CHECK(var == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("empty mixture is silent") {
  const auto rec = synth::sinusoid({.rate_hz = 250.0, .duration_s = 2.0});
  CHECK(rec.channels[0].samples.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("noise is reproducible from its seed") {
  synth::SynthSpec spec{.rate_hz = 250.0, .duration_s = 2.0, .components = {{7.0, 2.0, 0.3}},
                        .noise_std_uv = 1.5, .seed = 17};
  const auto a = synth::sinusoid(spec).channels[0].samples;
  const auto b = synth::sinusoid(spec).channels[0].samples;
  CHECK((a.array() == b.array()).all());
  spec.seed = 18;
  const auto c = synth::sinusoid(spec).channels[0].samples;
  CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("tones at or above Nyquist are rejected") {
  try {
    synth::sinusoid({.rate_hz = 250.0, .duration_s = 1.0, .components = {{125.0, 1.0, 0.0}}});
    FAIL("expected NyquistViolation");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NyquistViolation);
  }
  CHECK_THROWS_AS(synth::sinusoid({.rate_hz = 0.0}), Error);
}

TEST_CASE("pink noise has the requested spread and a 1/f slope") {
  const auto x = synth::pink_noise(1 << 15, 4.0, 3);
  CHECK(std::abs(x.mean()) < 1e-9);
  CHECK(std::sqrt(x.squaredNorm() / static_cast<double>(x.size())) == doctest::Approx(4.0).epsilon(1e-9));

  const auto psd = welch_psd(x, {.segment_len = 1024, .overlap_len = 512, .window = Window::Hann, .rate_hz = 250.0});
  // Least-squares slope of log power against log frequency over 1-100 Hz.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (Eigen::Index k = 0; k < psd.freqs_hz.size(); ++k) {
    const double f = psd.freqs_hz[k];
    if (f < 1.0 || f > 100.0) continue;
    const double lx = std::log(f), ly = std::log(psd.power[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope == doctest::Approx(-1.0).epsilon(0.15));
}

TEST_CASE("cohort layout") {
  const auto c = synth::cohort(2, 3, 1.0, 9, {.duration_s = 2.0});
  REQUIRE(c.size() == 5);
  CHECK(c[0].subject.id == "hc01");
  CHECK(c[1].subject.group == Group::HC);
  CHECK(c[2].subject.id == "pd01");
  CHECK(c[4].subject.group == Group::PD);
  for (const auto& r : c) {
    r.validate();
    CHECK(r.rate_hz == 512.0);
    CHECK(r.length() == 1024);
    REQUIRE(r.channels.size() == 40);
    CHECK(r.channels[31].kind == ChannelKind::Eeg);
    CHECK(r.channels[32].label == "EXG1");
    CHECK(r.channels[32].kind == ChannelKind::Auxiliary);
  }
}

TEST_CASE("two-subject cohort has both labels") {
  const auto c = synth::cohort(1, 1, 0.0, 1, {.duration_s = 1.0});
  REQUIRE(c.size() == 2);
  CHECK(c[0].subject.group != c[1].subject.group);
}

TEST_CASE("cohorts are deterministic and seed sensitive") {
  const synth::CohortOptions o{.duration_s = 2.0};
  const auto a = synth::cohort(1, 1, 1.0, 5, o);
  const auto b = synth::cohort(1, 1, 1.0, 5, o);
  const auto c = synth::cohort(1, 1, 1.0, 6, o);
  for (std::size_t s = 0; s < a.size(); ++s)
    CHECK(bdf::write_bdf(a[s]) == bdf::write_bdf(b[s]));
  CHECK(bdf::write_bdf(a[0]) != bdf::write_bdf(c[0]));
}

TEST_CASE("contrast raises alpha power of PD subjects") {
  const auto c = synth::cohort(4, 4, 4.0, 21, {.duration_s = 20.0});
  double hc = 0, pd = 0;
  for (const auto& r : c) {
    const auto psd = welch_psd(r.channels[0].samples,
                               {.segment_len = 2048, .overlap_len = 1024, .window = Window::Hamming, .rate_hz = 512.0});
    const double p = band_power(psd, {8.5, 11.5});
    (r.subject.group == Group::PD ? pd : hc) += p / 4.0;
  }
  CHECK(pd > hc);
}

TEST_CASE("invalid cohort requests") {
  CHECK_THROWS_AS(synth::cohort(0, 1, 1.0, 1), Error);
  CHECK_THROWS_AS(synth::cohort(1, 1, -1.0, 1), Error);
}

TEST_CASE("derived seeds differ per index") {
  CHECK(synth::derive_seed(1, 0) != synth::derive_seed(1, 1));
  CHECK(synth::derive_seed(1, 0) != synth::derive_seed(2, 0));
  CHECK(synth::derive_seed(7, 3) == synth::derive_seed(7, 3));
}
