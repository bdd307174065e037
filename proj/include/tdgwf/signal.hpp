#pragma once

// Waveform containers, framing, windows and overlap-add.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "tdgwf/error.hpp"

namespace tdgwf {

inline constexpr double kDefaultSampleRate = 16000.0;

/// M channels by L samples of real audio. Row m holds channel m.
struct MultiChannelWaveform {
  Eigen::MatrixXd samples;
  double sample_rate = kDefaultSampleRate;

  MultiChannelWaveform() = default;
  MultiChannelWaveform(Eigen::MatrixXd s, double fs = kDefaultSampleRate)
      : samples(std::move(s)), sample_rate(fs) {}

  static MultiChannelWaveform mono(const Eigen::VectorXd& x,
                                   double fs = kDefaultSampleRate) {
    return MultiChannelWaveform(Eigen::MatrixXd(x.transpose()), fs);
  }

  long channels() const { return static_cast<long>(samples.rows()); }
  long length() const { return static_cast<long>(samples.cols()); }

  Eigen::VectorXd channel(long m) const { return samples.row(m).transpose(); }

  // Throws InvalidArgument unless M >= 1, L >= 1 and every sample is finite.
  void validate(const std::string& what = "waveform") const {
    detail::require(channels() >= 1, what + ": needs at least one channel");
    detail::require(length() >= 1, what + ": needs at least one sample");
    detail::require(samples.allFinite(), what + ": non-finite sample");
    detail::require(sample_rate > 0.0, what + ": sample rate must be positive");
  }
};

/// Framed view of a multichannel signal. Each channel is a P x T matrix
/// whose column t is the frame starting at sample t*hop.
struct FrameStack {
  std::vector<Eigen::MatrixXd> channels;
  long hop = 0;
  long window_len = 0;
  long signal_len = 0;
  double sample_rate = kDefaultSampleRate;

  long num_channels() const { return static_cast<long>(channels.size()); }
  long num_frames() const {
    return channels.empty() ? 0 : static_cast<long>(channels.front().cols());
  }
};

/// Number of frames needed to cover `len` samples when the tail is
/// zero-padded so the final frame is complete.
inline long frame_count(long len, long window_len, long hop) {
  if (len <= window_len) return 1;
  return (len - window_len + hop - 1) / hop + 1;
}

/// Periodic Hann window, w[n] = 0.5 (1 - cos(2 pi n / P)).
inline Eigen::VectorXd hann(long window_len) {
  detail::require(window_len >= 2, "hann: window length must be >= 2");
  Eigen::VectorXd w(window_len);
  for (long n = 0; n < window_len; ++n) {
    w[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                 static_cast<double>(window_len)));
  }
  return w;
}

inline long default_hop(long window_len) { return std::max(1L, window_len / 4); }

/// Split every channel into frames of `window_len` samples spaced `hop` apart.
/// An empty `analysis_window` means no windowing.
inline FrameStack frame(const MultiChannelWaveform& w, long window_len, long hop,
                        std::span<const double> analysis_window = {}) {
  w.validate("frame");
  detail::require(window_len >= 2, "frame: window length must be >= 2");
  detail::require(hop >= 1 && hop <= window_len, "frame: hop must lie in [1, P]");
  detail::require(window_len % hop == 0, "frame: hop must divide the window length");
  detail::require(analysis_window.empty() ||
                      static_cast<long>(analysis_window.size()) == window_len,
                  "frame: analysis window length must equal P");
  detail::require(window_len <= w.length(),
                  "frame: window length " + std::to_string(window_len) +
                      " exceeds signal length " + std::to_string(w.length()));

  const long len = w.length();
  const long num = frame_count(len, window_len, hop);
  FrameStack out;
  out.hop = hop;
  out.window_len = window_len;
  out.signal_len = len;
  out.sample_rate = w.sample_rate;
  out.channels.reserve(static_cast<size_t>(w.channels()));
  for (long m = 0; m < w.channels(); ++m) {
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(window_len, num);
    for (long t = 0; t < num; ++t) {
      const long start = t * hop;
      const long avail = std::min(window_len, len - start);
      for (long n = 0; n < avail; ++n) f(n, t) = w.samples(m, start + n);
      if (!analysis_window.empty()) {
        for (long n = 0; n < window_len; ++n) f(n, t) *= analysis_window[static_cast<size_t>(n)];
      }
    }
    out.channels.push_back(std::move(f));
  }
  return out;
}

/// Overlap-add with window-energy normalization:
/// out[n] = sum_t f_t[n - t hop] win[n - t hop] / sum_t win^2[n - t hop].
/// Samples whose normalizer falls below 1e-8 are set to zero.
inline MultiChannelWaveform overlap_add(const FrameStack& frames,
                                        std::span<const double> synthesis_window,
                                        long out_len) {
  detail::require(frames.num_channels() >= 1, "overlap_add: empty frame stack");
  const long p = frames.window_len;
  const long hop = frames.hop;
  const long num = frames.num_frames();
  detail::require(hop >= 1 && p >= 1, "overlap_add: invalid hop or window length");
  detail::require(synthesis_window.empty() || static_cast<long>(synthesis_window.size()) == p,
                  "overlap_add: synthesis window length must equal P");
  for (const auto& ch : frames.channels) {
    detail::require(ch.rows() == p && ch.cols() == num,
                    "overlap_add: inconsistent frame shapes");
  }
  const long span_len = (num - 1) * hop + p;
  detail::require(out_len >= 1 && out_len <= span_len,
                  "overlap_add: out_len " + std::to_string(out_len) +
                      " exceeds reconstructable span " + std::to_string(span_len));

  auto win = [&](long n) {
    return synthesis_window.empty() ? 1.0 : synthesis_window[static_cast<size_t>(n)];
  };

  Eigen::VectorXd norm = Eigen::VectorXd::Zero(span_len);
  for (long t = 0; t < num; ++t) {
    for (long n = 0; n < p; ++n) norm[t * hop + n] += win(n) * win(n);
  }

  MultiChannelWaveform out(Eigen::MatrixXd::Zero(frames.num_channels(), out_len),
                           frames.sample_rate);
  Eigen::VectorXd acc(span_len);
  for (long m = 0; m < frames.num_channels(); ++m) {
    acc.setZero();
    const auto& f = frames.channels[static_cast<size_t>(m)];
    for (long t = 0; t < num; ++t) {
      for (long n = 0; n < p; ++n) acc[t * hop + n] += f(n, t) * win(n);
    }
    for (long n = 0; n < out_len; ++n) {
      out.samples(m, n) = norm[n] < 1e-8 ? 0.0 : acc[n] / norm[n];
    }
  }
  return out;
}

}  // namespace tdgwf
