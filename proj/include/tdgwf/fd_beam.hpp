#pragma once

// Frequency-domain baselines: STFT/iSTFT, the multichannel Wiener filter
// and the parameterized multichannel Wiener filter.

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "tdgwf/error.hpp"
#include "tdgwf/fft.hpp"
#include "tdgwf/signal.hpp"

namespace tdgwf {

/// One-sided spectrogram: per channel an F x T complex matrix, F = fft_size/2 + 1.
/// Frame t starts at sample t * hop - pad of the original signal.
struct Spectrogram {
  std::vector<Eigen::MatrixXcd> channels;
  long fft_size = 0;
  long hop = 0;
  long pad = 0;
  long signal_len = 0;
  double sample_rate = kDefaultSampleRate;

  long num_channels() const { return static_cast<long>(channels.size()); }
  long num_bins() const { return channels.empty() ? 0 : channels.front().rows(); }
  long num_frames() const { return channels.empty() ? 0 : channels.front().cols(); }
};

/// h(f) for every bin, stored as row f of an F x M matrix.
struct FreqFilterBank {
  Eigen::MatrixXcd weights;
};

struct PmwfConfig {
  double beta = 0.0;
  long reference_channel = 0;
};

/// Hann-windowed one-sided STFT. An empty window selects periodic Hann;
/// hop 0 selects fft_size / 4. The signal is padded with fft_size - hop
/// zeros on both sides so every sample sees the full window overlap.
inline Spectrogram stft(const MultiChannelWaveform& w, long fft_size, long hop = 0,
                        std::span<const double> window = {}) {
  detail::require(fft_size >= 2 && fft_size % 2 == 0, "stft: fft_size must be even and >= 2");
  w.validate("stft");
  const Eigen::VectorXd default_win = window.empty() ? hann(fft_size) : Eigen::VectorXd();
  if (window.empty()) window = std::span<const double>(default_win.data(), static_cast<size_t>(fft_size));
  if (hop <= 0) hop = default_hop(fft_size);
  const long pad = fft_size - hop;
  MultiChannelWaveform padded(Eigen::MatrixXd::Zero(w.channels(), w.length() + 2 * pad), w.sample_rate);
  padded.samples.middleCols(pad, w.length()) = w.samples;
  const FrameStack frames = frame(padded, fft_size, hop, window);

  Spectrogram spec;
  spec.fft_size = fft_size;
  spec.hop = hop;
  spec.pad = pad;
  spec.signal_len = w.length();
  spec.sample_rate = w.sample_rate;
  const long bins = fft_size / 2 + 1;
  detail::Fft fft;
  std::vector<double> buf(static_cast<size_t>(fft_size));
  for (const auto& ch : frames.channels) {
    Eigen::MatrixXcd s(bins, ch.cols());
    for (long t = 0; t < ch.cols(); ++t) {
      for (long n = 0; n < fft_size; ++n) buf[static_cast<size_t>(n)] = ch(n, t);
      const auto full = fft.forward_real(buf);
      for (long f = 0; f < bins; ++f) s(f, t) = full[static_cast<size_t>(f)];
    }
    spec.channels.push_back(std::move(s));
  }
  return spec;
}

/// Inverse FFT of each frame (conjugate-symmetric completion) followed by
/// windowed overlap-add with window-energy normalization.
inline MultiChannelWaveform istft(const Spectrogram& spec, long out_len,
                                  std::span<const double> window = {}) {
  const long p = spec.fft_size;
  detail::require(spec.num_channels() >= 1, "istft: empty spectrogram");
  detail::require(spec.num_bins() == p / 2 + 1, "istft: bin count does not match fft_size");
  const Eigen::VectorXd default_win = window.empty() ? hann(p) : Eigen::VectorXd();
  if (window.empty()) window = std::span<const double>(default_win.data(), static_cast<size_t>(p));
  detail::require(static_cast<long>(window.size()) == p, "istft: window length must equal fft_size");

  const long num = spec.num_frames();
  const long span_len = (num - 1) * spec.hop + p;
  detail::require(out_len >= 1 && spec.pad + out_len <= span_len,
                  "istft: out_len " + std::to_string(out_len) + " exceeds the spectrogram span");
  Eigen::VectorXd norm = Eigen::VectorXd::Zero(span_len);
  for (long t = 0; t < num; ++t)
    for (long n = 0; n < p; ++n) norm[t * spec.hop + n] += window[static_cast<size_t>(n)] * window[static_cast<size_t>(n)];
  for (long n = spec.pad; n < spec.pad + out_len; ++n) {
    if (norm[n] < 1e-8) {
      throw InvalidArgument("istft: window/hop pair violates overlap-add coverage at sample " +
                            std::to_string(n - spec.pad));
    }
  }

  FrameStack frames;
  frames.hop = spec.hop;
  frames.window_len = p;
  frames.signal_len = spec.signal_len;
  frames.sample_rate = spec.sample_rate;
  detail::Fft fft;
  std::vector<std::complex<double>> full(static_cast<size_t>(p));
  for (const auto& s : spec.channels) {
    Eigen::MatrixXd f(p, num);
    for (long t = 0; t < num; ++t) {
      for (long k = 0; k <= p / 2; ++k) full[static_cast<size_t>(k)] = s(k, t);
      full[0] = full[0].real();
      full[static_cast<size_t>(p / 2)] = full[static_cast<size_t>(p / 2)].real();
      for (long k = p / 2 + 1; k < p; ++k) full[static_cast<size_t>(k)] = std::conj(s(p - k, t));
      const auto x = fft.inverse(full);
      for (long n = 0; n < p; ++n) f(n, t) = x[static_cast<size_t>(n)].real();
    }
    frames.channels.push_back(std::move(f));
  }
  MultiChannelWaveform full_out = overlap_add(frames, window, spec.pad + out_len);
  return MultiChannelWaveform(full_out.samples.rightCols(out_len), spec.sample_rate);
}

namespace detail {

// Hermitian solve (R + eps * tr(R)/M * I) h = r for one bin.
inline Eigen::VectorXcd solve_bin(Eigen::MatrixXcd cov, const Eigen::VectorXcd& rhs,
                                  double eps, long bin) {
  const long m = cov.rows();
  const double load = eps * cov.trace().real() / static_cast<double>(m);
  cov.diagonal().array() += load;
  Eigen::LDLT<Eigen::MatrixXcd> ldlt(cov);
  const Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
  if (ldlt.info() != Eigen::Success || !(d.minCoeff() > 1e-14 * d.maxCoeff()) ||
      !(ldlt.rcond() > 1e-14)) {
    throw SingularSystemError("singular spatial covariance at frequency bin " +
                                  std::to_string(bin) + " (eps=" + std::to_string(eps) + ")",
                              bin);
  }
  return ldlt.solve(rhs);
}

inline void check_aligned(const Spectrogram& a, const Spectrogram& b, const char* who) {
  require(a.num_bins() == b.num_bins() && a.num_frames() == b.num_frames(),
          std::string(who) + ": spectrogram shapes differ (" + std::to_string(a.num_bins()) +
              "x" + std::to_string(a.num_frames()) + " vs " + std::to_string(b.num_bins()) +
              "x" + std::to_string(b.num_frames()) + ")");
}

}  // namespace detail

/// h(f) = (sum_t S S^H + eps D)^{-1} sum_t S conj(z) per bin, with
/// S the M-channel observation and z the single-channel target.
inline FreqFilterBank fd_mcwf(const Spectrogram& spec, const Spectrogram& target, double eps) {
  detail::require(spec.num_channels() >= 1, "fd_mcwf: empty observation");
  detail::require(target.num_channels() == 1, "fd_mcwf: target must have one channel");
  detail::check_aligned(spec, target, "fd_mcwf");
  const long m = spec.num_channels();
  const long bins = spec.num_bins();
  const long frames = spec.num_frames();
  FreqFilterBank bank;
  bank.weights.resize(bins, m);
  Eigen::VectorXcd s(m);
  for (long f = 0; f < bins; ++f) {
    Eigen::MatrixXcd cov = Eigen::MatrixXcd::Zero(m, m);
    Eigen::VectorXcd cross = Eigen::VectorXcd::Zero(m);
    for (long t = 0; t < frames; ++t) {
      for (long c = 0; c < m; ++c) s[c] = spec.channels[static_cast<size_t>(c)](f, t);
      cov.noalias() += s * s.adjoint();
      cross += s * std::conj(target.channels[0](f, t));
    }
    bank.weights.row(f) = detail::solve_bin(std::move(cov), cross, eps, f).transpose();
  }
  return bank;
}

/// h(f) = (sum_t Z Z^H + beta sum_t N N^H + eps D)^{-1} sum_t Z conj(z_ref).
inline FreqFilterBank fd_pmwf(const Spectrogram& soi, const Spectrogram& interference,
                              const PmwfConfig& cfg, double eps) {
  detail::require(cfg.beta >= 0.0, "fd_pmwf: beta must be >= 0");
  detail::require(soi.num_channels() >= 1 &&
                      soi.num_channels() == interference.num_channels(),
                  "fd_pmwf: SOI and interference channel counts differ");
  detail::require(cfg.reference_channel >= 0 && cfg.reference_channel < soi.num_channels(),
                  "fd_pmwf: reference channel out of range");
  detail::check_aligned(soi, interference, "fd_pmwf");
  const long m = soi.num_channels();
  const long bins = soi.num_bins();
  const long frames = soi.num_frames();
  FreqFilterBank bank;
  bank.weights.resize(bins, m);
  Eigen::VectorXcd z(m), n(m);
  for (long f = 0; f < bins; ++f) {
    Eigen::MatrixXcd cov = Eigen::MatrixXcd::Zero(m, m);
    Eigen::MatrixXcd cov_n = Eigen::MatrixXcd::Zero(m, m);
    Eigen::VectorXcd cross = Eigen::VectorXcd::Zero(m);
    for (long t = 0; t < frames; ++t) {
      for (long c = 0; c < m; ++c) {
        z[c] = soi.channels[static_cast<size_t>(c)](f, t);
        n[c] = interference.channels[static_cast<size_t>(c)](f, t);
      }
      cov.noalias() += z * z.adjoint();
      cov_n.noalias() += n * n.adjoint();
      cross += z * std::conj(z[cfg.reference_channel]);
    }
    cov += cfg.beta * cov_n;
    bank.weights.row(f) = detail::solve_bin(std::move(cov), cross, eps, f).transpose();
  }
  return bank;
}

/// z(f, t) = h(f)^H S(f, t).
inline Spectrogram apply_freq_filter(const Spectrogram& spec, const FreqFilterBank& bank) {
  detail::require(bank.weights.rows() == spec.num_bins() &&
                      bank.weights.cols() == spec.num_channels(),
                  "apply_freq_filter: filter bank is " + std::to_string(bank.weights.rows()) +
                      "x" + std::to_string(bank.weights.cols()) + " but spectrogram has " +
                      std::to_string(spec.num_bins()) + " bins and " +
                      std::to_string(spec.num_channels()) + " channels");
  Spectrogram out;
  out.fft_size = spec.fft_size;
  out.hop = spec.hop;
  out.pad = spec.pad;
  out.signal_len = spec.signal_len;
  out.sample_rate = spec.sample_rate;
  Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(spec.num_bins(), spec.num_frames());
  for (long c = 0; c < spec.num_channels(); ++c) {
    z += bank.weights.col(c).conjugate().asDiagonal() * spec.channels[static_cast<size_t>(c)];
  }
  out.channels.push_back(std::move(z));
  return out;
}

/// Waveform-level FD-MCWF: each row of `targets` is beamformed independently.
inline MultiChannelWaveform fd_mcwf_beamform(const MultiChannelWaveform& mix,
                                             const MultiChannelWaveform& targets,
                                             long fft_size, double eps) {
  detail::require(mix.length() == targets.length(),
                  "fd_mcwf: mixture has " + std::to_string(mix.length()) +
                      " samples, estimate has " + std::to_string(targets.length()));
  const Spectrogram s = stft(mix, fft_size);
  MultiChannelWaveform out(Eigen::MatrixXd(targets.channels(), mix.length()), mix.sample_rate);
  for (long c = 0; c < targets.channels(); ++c) {
    const Spectrogram z = stft(MultiChannelWaveform::mono(targets.channel(c), targets.sample_rate), fft_size);
    const Spectrogram y = apply_freq_filter(s, fd_mcwf(s, z, eps));
    out.samples.row(c) = istft(y, mix.length()).samples.row(0);
  }
  return out;
}

/// Waveform-level FD-PMWF on the mixture, statistics from the multichannel
/// SOI image and interference image.
inline MultiChannelWaveform fd_pmwf_beamform(const MultiChannelWaveform& mix,
                                             const MultiChannelWaveform& soi_image,
                                             const MultiChannelWaveform& interference,
                                             const PmwfConfig& cfg, long fft_size, double eps) {
  const Spectrogram s = stft(mix, fft_size);
  const FreqFilterBank h = fd_pmwf(stft(soi_image, fft_size), stft(interference, fft_size), cfg, eps);
  return istft(apply_freq_filter(s, h), mix.length());
}

}  // namespace tdgwf
