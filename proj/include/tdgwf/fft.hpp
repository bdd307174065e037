#pragma once

#include <unsupported/Eigen/FFT>

#include <complex>
#include <vector>

namespace tdgwf::detail {

// Thin wrapper over Eigen's FFT. Forward is unscaled, inverse scales by 1/n.
class Fft {
 public:
  std::vector<std::complex<double>> forward_real(const std::vector<double>& x) {
    std::vector<std::complex<double>> out;
    engine_.fwd(out, x);
    return out;
  }

  std::vector<std::complex<double>> forward(const std::vector<std::complex<double>>& x) {
    std::vector<std::complex<double>> out;
    engine_.fwd(out, x);
    return out;
  }

  std::vector<std::complex<double>> inverse(const std::vector<std::complex<double>>& x) {
    std::vector<std::complex<double>> out;
    engine_.inv(out, x);
    return out;
  }

 private:
  Eigen::FFT<double> engine_;
};

inline long next_pow2(long n) {
  long p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// Full linear convolution via zero-padded FFT.
inline std::vector<double> fft_convolve(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) return {};
  const long out_len = static_cast<long>(a.size() + b.size()) - 1;
  const long n = next_pow2(out_len);
  std::vector<double> pa(static_cast<size_t>(n), 0.0), pb(static_cast<size_t>(n), 0.0);
  std::copy(a.begin(), a.end(), pa.begin());
  std::copy(b.begin(), b.end(), pb.begin());
  Fft fft;
  auto fa = fft.forward_real(pa);
  const auto fb = fft.forward_real(pb);
  for (size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  const auto y = fft.inverse(fa);
  std::vector<double> out(static_cast<size_t>(out_len));
  for (long i = 0; i < out_len; ++i) out[static_cast<size_t>(i)] = y[static_cast<size_t>(i)].real();
  return out;
}

}  // namespace tdgwf::detail
