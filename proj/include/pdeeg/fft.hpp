#pragma once

#include <Eigen/Dense>

namespace pdeeg {

/// One-sided DFT of a real series: bins 0..n/2, unscaled, exact length
/// (no padding).
Eigen::VectorXcd rfft(const Eigen::Ref<const Eigen::VectorXd>& x);

/// Inverse of rfft for an output of length n (the half spectrum must hold
/// n/2 + 1 bins). Includes the 1/n factor.
Eigen::VectorXd irfft(const Eigen::Ref<const Eigen::VectorXcd>& half, Eigen::Index n);

}  // namespace pdeeg
