#pragma once

#include <Eigen/Dense>

#include <array>

namespace pdeeg {

/// Orthogonal analysis pair. highpass[k] = (-1)^k * lowpass[L-1-k].
struct WaveletFilterPair {
  std::array<double, 8> lowpass;
  std::array<double, 8> highpass;
};

/// Daubechies 4 (8 taps).
const WaveletFilterPair& db4();

enum class BoundaryMode {
  /// Half-sample symmetric extension; floor((n + 7) / 2) coefficients per stream.
  Symmetric,
  /// Circular extension (odd n padded with its last sample); orthogonal, so
  /// energy is conserved exactly for even n.
  Periodic,
};

struct WaveletDecomposition {
  Eigen::VectorXd approx;  // cA
  Eigen::VectorXd detail;  // cD
  BoundaryMode mode = BoundaryMode::Symmetric;
  Eigen::Index original_len = 0;
};

/// Coefficients per stream for an n-sample input.
Eigen::Index dwt_length(Eigen::Index n, BoundaryMode mode);

/// Single-level analysis: convolve with each filter and keep every second
/// output. Errors: SignalTooShort (fewer than 8 samples).
WaveletDecomposition dwt_db4(const Eigen::Ref<const Eigen::VectorXd>& x,
                             BoundaryMode mode = BoundaryMode::Symmetric);

/// Synthesis; exact inverse of dwt_db4 for the same mode.
/// Errors: LengthMismatch.
Eigen::VectorXd idwt_db4(const WaveletDecomposition& dec, Eigen::Index original_len);

/// sum(cA^2) + sum(cD^2).
double wavelet_energy(const WaveletDecomposition& dec);

/// Pincus approximate entropy Phi_m(r) - Phi_{m+1}(r), Chebyshev distance,
/// self-matches counted, r = r_factor * population std. A constant series
/// returns 0. Errors: SeriesTooShort (length <= m + 1).
double approximate_entropy(const Eigen::Ref<const Eigen::VectorXd>& series, int m = 2,
                           double r_factor = 0.2);

}  // namespace pdeeg
