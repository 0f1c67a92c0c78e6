#include <doctest.h>

#include "oracles.hpp"
#include "pdeeg/error.hpp"
#include "pdeeg/wavelet.hpp"

#include <cmath>
#include <random>

using namespace pdeeg;

namespace {

Eigen::VectorXd reference_input() {
  Eigen::VectorXd x(16);
  for (int i = 0; i < 16; ++i) x[i] = std::sin(0.37 * i) + 0.1 * i * i / 16.0;
  return x;
}

Eigen::VectorXd white(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  Eigen::VectorXd x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

void check_close(const Eigen::VectorXd& got, std::initializer_list<double> want, double sign = 1.0) {
  REQUIRE(got.size() == static_cast<Eigen::Index>(want.size()));
  Eigen::Index i = 0;
  for (double w : want) CHECK(std::abs(got[i++] - sign * w) < 1e-12);
}

}  // namespace

TEST_CASE("db4 filter identities") {
  const auto& f = db4();
  double sh = 0, sg = 0, norm = 0;
  for (int k = 0; k < 8; ++k) {
    sh += f.lowpass[k];
    sg += f.highpass[k];
    norm += f.lowpass[k] * f.lowpass[k];
    CHECK(f.highpass[k] == ((k % 2) ? -1.0 : 1.0) * f.lowpass[7 - k]);
  }
  CHECK(std::abs(sh - std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(sg) < 1e-12);
  CHECK(std::abs(norm - 1.0) < 1e-12);
  // Orthogonality to even shifts.
  for (int s = 2; s < 8; s += 2) {
    double acc = 0;
    for (int k = 0; k + s < 8; ++k) acc += f.lowpass[k] * f.lowpass[k + s];
    CHECK(std::abs(acc) < 1e-12);
  }
  // Four vanishing moments of the high-pass filter.
  for (int p = 0; p < 4; ++p) {
    double acc = 0;
    for (int k = 0; k < 8; ++k) acc += std::pow(k, p) * f.highpass[k];
    CHECK(std::abs(acc) < 1e-9);
  }
}

TEST_CASE("symmetric analysis matches the reference transform") {
  const auto d = dwt_db4(reference_input(), BoundaryMode::Symmetric);
  CHECK(dwt_length(16, BoundaryMode::Symmetric) == 11);
  check_close(d.approx, {1.5491350226171439, 0.9755226363656369, -0.00278499858683268, 0.5317868653148606,
                         1.3519460294873813, 1.5774222221193095, 1.1643492152443728, 0.43984829695765415,
                         -0.07008092768544197, 0.0931981870645059, 1.043253709157485});
  // The detail stream uses the opposite sign convention for the high-pass filter.
  check_close(d.detail, {0.01722957438184756, 0.02675908564817296, -0.02929595463315449, -0.00919283011657782,
                         -0.00674594568491038, -0.00077050745782961, 0.00560795462116289, 0.00905310379085143,
                         -0.0140673741593167, -0.02538254589466352, 0.0415806498694172},
              -1.0);
}

TEST_CASE("periodic analysis matches the reference transform") {
  const auto d = dwt_db4(reference_input(), BoundaryMode::Periodic);
  check_close(d.approx, {0.6890546457279245, 0.26397389051376924, 0.9981709817225602, 1.5512245933776039,
                         1.4377727466927017, 0.8097229564821316, 0.1383270305187883, -0.15933256045299912});
  check_close(d.detail, {-0.01227581876327832, -0.02016995353252942, -0.0085478431350352, -0.00403101613299458,
                         0.00259428578713881, 0.00786261310531648, 0.2957802623223125, 0.14783233001416693},
              -1.0);
}

TEST_CASE("stream lengths") {
  for (Eigen::Index n : {8, 9, 16, 1250, 1251}) {
    CHECK(dwt_length(n, BoundaryMode::Symmetric) == (n + 7) / 2);
    CHECK(dwt_length(n, BoundaryMode::Periodic) == (n + 1) / 2);
    const auto d = dwt_db4(white(n, static_cast<std::uint64_t>(n)));
    CHECK(d.approx.size() == dwt_length(n, BoundaryMode::Symmetric));
    CHECK(d.detail.size() == d.approx.size());
  }
  CHECK(dwt_db4(white(1250, 1)).approx.size() == 628);
  CHECK_THROWS_AS(dwt_db4(Eigen::VectorXd::Zero(7)), Error);
}

TEST_CASE("constant and cubic inputs have vanishing detail") {
  const auto c = dwt_db4(Eigen::VectorXd::Constant(64, 5.0));
  CHECK(c.detail.cwiseAbs().maxCoeff() < 1e-10 * 5.0);
  const auto cp = dwt_db4(Eigen::VectorXd::Constant(64, 5.0), BoundaryMode::Periodic);
  CHECK(cp.detail.cwiseAbs().maxCoeff() < 1e-10 * 5.0);

  Eigen::VectorXd x(200);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double t = static_cast<double>(i) / 200.0;
    x[i] = 2.0 - t + 3.0 * t * t - 4.0 * t * t * t;
  }
  const auto d = dwt_db4(x);
  // Interior coefficients only: the first and last three touch the extension.
  CHECK(d.detail.segment(4, d.detail.size() - 8).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("round trip over random lengths") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 8 + static_cast<Eigen::Index>(rng() % 1993);
    const auto x = white(n, rng());
    for (auto mode : {BoundaryMode::Symmetric, BoundaryMode::Periodic}) {
      const auto d = dwt_db4(x, mode);
      CHECK((idwt_db4(d, n) - x).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("periodic mode conserves energy") {
  for (Eigen::Index n : {16, 1250, 2000}) {
    const auto x = white(n, static_cast<std::uint64_t>(n) + 1);
    const auto d = dwt_db4(x, BoundaryMode::Periodic);
    CHECK(std::abs(wavelet_energy(d) - x.squaredNorm()) <= 1e-9 * x.squaredNorm());
    // Approximation-only reconstruction leaves exactly the detail energy behind.
    auto low = d;
    low.detail.setZero();
    const auto approx = idwt_db4(low, n);
    CHECK(std::abs((x - approx).squaredNorm() - d.detail.squaredNorm()) <= 1e-9 * x.squaredNorm());
  }
}

TEST_CASE("energy homogeneity and zero input") {
  const auto x = white(300, 4);
  const auto e1 = wavelet_energy(dwt_db4(x));
  const auto e3 = wavelet_energy(dwt_db4(3.0 * x));
  CHECK(e3 == doctest::Approx(9.0 * e1).epsilon(1e-12));
  CHECK(wavelet_energy(dwt_db4(Eigen::VectorXd::Zero(50))) == 0.0);
  WaveletDecomposition zero{Eigen::VectorXd::Zero(28), Eigen::VectorXd::Zero(28), BoundaryMode::Symmetric, 50};
  CHECK(idwt_db4(zero, 50).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(idwt_db4(zero, 80), Error);
}

TEST_CASE("approximate entropy agrees with the brute force count") {
  Eigen::VectorXd alternating(200);
  for (Eigen::Index i = 0; i < 200; ++i) alternating[i] = i % 2;
  const double periodic = approximate_entropy(alternating);
  CHECK(periodic == doctest::Approx(oracle::apen(alternating, 2, 0.2)).epsilon(1e-12));
  CHECK(periodic < 0.2);

  const auto noise = white(623, 77);
  const double random = approximate_entropy(noise);
  CHECK(random == doctest::Approx(oracle::apen(noise, 2, 0.2)).epsilon(1e-12));
  CHECK(random > periodic);

  CHECK(approximate_entropy(Eigen::VectorXd::Constant(100, 2.5)) == 0.0);
  CHECK(approximate_entropy(Eigen::VectorXd::Zero(100)) == 0.0);

  const auto small = white(150, 5);
  for (int m : {1, 2, 3})
    CHECK(approximate_entropy(small, m, 0.25) == doctest::Approx(oracle::apen(small, m, 0.25)).epsilon(1e-12));
  CHECK_THROWS_AS(approximate_entropy(Eigen::VectorXd::Zero(3)), Error);
}

TEST_CASE("approximate entropy is translation and scale invariant") {
  const auto x = white(400, 9);
  const double base = approximate_entropy(x);
  CHECK(approximate_entropy((x.array() + 0.5).matrix()) == doctest::Approx(base).epsilon(1e-12));
  CHECK(std::abs(approximate_entropy(4.0 * x) - base) <= 1e-9);
}
