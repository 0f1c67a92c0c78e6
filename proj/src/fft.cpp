#include "pdeeg/fft.hpp"

#include <unsupported/Eigen/FFT>

#include <complex>
#include <vector>

namespace pdeeg {

namespace {
// Eigen::FFT caches twiddle plans per length; one engine per thread.
Eigen::FFT<double>& engine() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}
}  // namespace

Eigen::VectorXcd rfft(const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Eigen::Index n = x.size();
  std::vector<std::complex<double>> in(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) in[static_cast<std::size_t>(i)] = x[i];
  std::vector<std::complex<double>> out;
  engine().fwd(out, in);
  Eigen::VectorXcd half(n / 2 + 1);
  for (Eigen::Index k = 0; k <= n / 2; ++k) half[k] = out[static_cast<std::size_t>(k)];
  return half;
}

Eigen::VectorXd irfft(const Eigen::Ref<const Eigen::VectorXcd>& half, Eigen::Index n) {
  std::vector<std::complex<double>> full(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k <= n / 2 && k < half.size(); ++k) {
    full[static_cast<std::size_t>(k)] = half[k];
    if (k > 0 && k < n - k) full[static_cast<std::size_t>(n - k)] = std::conj(half[k]);
  }
  if (n % 2 == 0) full[static_cast<std::size_t>(n / 2)] = half[n / 2].real();
  full[0] = half[0].real();
  std::vector<std::complex<double>> out;
  engine().inv(out, full);
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = out[static_cast<std::size_t>(i)].real();
  return x;
}

}  // namespace pdeeg
