#pragma once

// Seeded synthetic source material: harmonic, syllable-gated "speech" and
// colored noise with chirps. Used where no recorded corpus is supplied.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "tdgwf/error.hpp"

namespace tdgwf {

namespace detail {

// Two-pole resonator with unit gain at its center frequency.
struct Resonator {
  double y1 = 0.0, y2 = 0.0;
  double step(double x, double freq, double bw, double fs) {
    const double r = std::exp(-std::numbers::pi * bw / fs);
    const double a1 = 2.0 * r * std::cos(2.0 * std::numbers::pi * freq / fs);
    const double a2 = -r * r;
    const double y = (1.0 - r) * x + a1 * y1 + a2 * y2;
    y2 = y1;
    y1 = y;
    return y;
  }
};

}  // namespace detail

/// Source-filter speech surrogate: a jittered glottal pulse train with a
/// wandering pitch contour (or white noise for unvoiced syllables) driven
/// through three moving formant resonators, gated into syllables and pauses.
inline Eigen::VectorXd synthetic_speech(long len, double fs, uint64_t seed) {
  detail::require(len >= 1 && fs > 0.0, "synthetic_speech: bad length or sample rate");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  const double f0_base = 90.0 + 160.0 * uni(rng);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(len);
  detail::Resonator res[3];
  double fmt[3] = {500.0, 1500.0, 2500.0};
  const double bw[3] = {80.0, 120.0, 180.0};
  double tilt1 = 0.0, tilt2 = 0.0, prev_exc = 0.0;
  double intonation = 0.0;
  double phase = 0.0;
  long pos = static_cast<long>(uni(rng) * 0.05 * fs);
  while (pos < len) {
    const long syl = static_cast<long>((0.08 + 0.22 * uni(rng)) * fs);
    const long gap = static_cast<long>((0.02 + 0.13 * uni(rng)) * fs);
    const bool voiced = uni(rng) < 0.75;
    const double gain = 0.3 + 0.7 * uni(rng);
    const double target[3] = {300.0 + 600.0 * uni(rng), 900.0 + 1600.0 * uni(rng),
                              2300.0 + 1000.0 * uni(rng)};
    const double start[3] = {fmt[0], fmt[1], fmt[2]};
    const double glide = (uni(rng) - 0.5) * 0.4;
    const long end = std::min(len, pos + syl);
    double period_scale = 1.0;
    for (long n = pos; n < end; ++n) {
      const double u = static_cast<double>(n - pos) / static_cast<double>(syl);
      const double env = gain * std::sin(std::numbers::pi * u);
      for (int k = 0; k < 3; ++k) fmt[k] = start[k] + (target[k] - start[k]) * std::min(1.0, 3.0 * u);
      double exc = 0.0;
      if (voiced) {
        intonation = 0.9995 * intonation + 0.002 * normal(rng);
        const double f0 = f0_base * (1.0 + glide * u) * (1.0 + intonation);
        phase += f0 / fs * period_scale;
        if (phase >= 1.0) {
          phase -= 1.0;
          exc = 1.0 + 0.1 * normal(rng);
          period_scale = 1.0 + 0.02 * normal(rng);
        }
        exc += 0.02 * normal(rng);
      } else {
        exc = 0.15 * normal(rng);
      }
      tilt1 = 0.9 * tilt1 + exc;
      tilt2 = 0.9 * tilt2 + tilt1;
      double x = voiced ? (tilt2 - prev_exc) : exc;
      prev_exc = tilt2;
      double y = 0.0;
      for (int k = 0; k < 3; ++k) y += res[k].step(x, fmt[k], bw[k], fs) / (k + 1.0);
      out[n] = env * y;
    }
    pos = end + gap;
  }
  return out;
}

/// First-order lowpass-colored noise plus a few linear chirps.
inline Eigen::VectorXd synthetic_noise(long len, double fs, uint64_t seed) {
  detail::require(len >= 1 && fs > 0.0, "synthetic_noise: bad length or sample rate");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd out(len);
  double state = 0.0;
  for (long n = 0; n < len; ++n) {
    state = 0.9 * state + normal(rng);
    out[n] = 0.1 * state;
  }
  const int chirps = 2 + static_cast<int>(uni(rng) * 3);
  for (int c = 0; c < chirps; ++c) {
    const long start = static_cast<long>(uni(rng) * len);
    const long dur = static_cast<long>((0.2 + 0.6 * uni(rng)) * fs);
    const double f_lo = 200.0 + 800.0 * uni(rng);
    const double f_hi = f_lo + 500.0 + 3000.0 * uni(rng);
    double phase = 0.0;
    for (long n = start; n < std::min(len, start + dur); ++n) {
      const double u = static_cast<double>(n - start) / static_cast<double>(dur);
      phase += 2.0 * std::numbers::pi * (f_lo + (f_hi - f_lo) * u) / fs;
      out[n] += 0.3 * std::sin(std::numbers::pi * u) * std::sin(phase);
    }
  }
  return out;
}

}  // namespace tdgwf
