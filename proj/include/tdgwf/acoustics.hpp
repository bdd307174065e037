#pragma once

// Image-method room impulse responses, random scene sampling and mixture
// synthesis for two-speaker-plus-noise recordings.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tdgwf/error.hpp"
#include "tdgwf/fft.hpp"
#include "tdgwf/signal.hpp"
#include "tdgwf/sources.hpp"

namespace tdgwf {

using Point3 = Eigen::Vector3d;

struct RoomSpec {
  double length = 6.0;
  double width = 5.0;
  double height = 3.0;
  double t60 = 0.3;
  double speed_of_sound = 343.0;

  Point3 dims() const { return {length, width, height}; }
  double volume() const { return length * width * height; }
  double surface() const { return 2.0 * (length * width + length * height + width * height); }
};

struct Rir {
  std::vector<double> taps;
  double sample_rate = kDefaultSampleRate;

  long peak_index() const {
    long best = 0;
    for (long i = 1; i < static_cast<long>(taps.size()); ++i)
      if (std::abs(taps[static_cast<size_t>(i)]) > std::abs(taps[static_cast<size_t>(best)])) best = i;
    return best;
  }
  double energy() const {
    double e = 0.0;
    for (double t : taps) e += t * t;
    return e;
  }
};

/// Uniform wall reflection coefficient from Sabine's formula,
/// alpha = 24 ln(10) V / (c S T60), beta = sqrt(1 - alpha).
/// Rooms too absorbent for the requested T60 clamp to alpha = 1.
inline double sabine_reflection(const RoomSpec& room) {
  detail::require(room.t60 > 0.0, "sabine_reflection: t60 must be positive");
  const double alpha = 24.0 * std::log(10.0) * room.volume() /
                       (room.speed_of_sound * room.surface() * room.t60);
  return std::sqrt(1.0 - std::min(1.0, alpha));
}

struct RirOptions {
  // Overrides the Sabine-derived wall reflection coefficient.
  std::optional<double> reflection;
  // Response length in seconds; by default the path length covers 1.5 x c x T60.
  std::optional<double> length_s;
};

inline constexpr long kSincHalfWidth = 40;  // 81-tap interpolator

namespace detail {

inline bool inside(const RoomSpec& room, const Point3& p) {
  return p.x() > 0.0 && p.y() > 0.0 && p.z() > 0.0 && p.x() < room.length &&
         p.y() < room.width && p.z() < room.height;
}

// Adds amp * hann-windowed sinc centred at fractional sample `delay`.
inline void add_fractional_impulse(std::vector<double>& h, double delay, double amp) {
  const long center = std::lround(delay);
  const double pi = std::numbers::pi;
  const double width = static_cast<double>(kSincHalfWidth + 1);
  // sin(pi (n - delay)) = -(-1)^n sin(pi delay)
  const double s = std::sin(pi * delay);
  const long first = center - kSincHalfWidth;
  // Window phase by rotation: cos(pi (n - delay) / width).
  const double step = pi / width;
  std::complex<double> rot(std::cos(step), std::sin(step));
  std::complex<double> cur = std::polar(1.0, pi * (static_cast<double>(first) - delay) / width);
  double sign = (first % 2 == 0) ? 1.0 : -1.0;
  const long size = static_cast<long>(h.size());
  for (long n = first; n <= center + kSincHalfWidth; ++n, cur *= rot, sign = -sign) {
    if (n < 0 || n >= size) continue;
    const double x = static_cast<double>(n) - delay;
    if (std::abs(x) >= width) continue;
    const double sinc = std::abs(x) < 1e-12 ? 1.0 : -sign * s / (pi * x);
    h[static_cast<size_t>(n)] += amp * 0.5 * (1.0 + cur.real()) * sinc;
  }
}

}  // namespace detail

/// Allen-Berkley image method with uniform wall reflection, 1/(4 pi d)
/// spreading and 81-tap Hann-windowed sinc fractional delays.
inline Rir image_method_rir(const RoomSpec& room, const Point3& src, const Point3& mic,
                            double fs = kDefaultSampleRate, const RirOptions& opt = {}) {
  detail::require(room.length > 0 && room.width > 0 && room.height > 0,
                  "image_method_rir: room dimensions must be positive");
  detail::require(fs > 0.0 && room.speed_of_sound > 0.0, "image_method_rir: bad fs or c");
  detail::require(detail::inside(room, src) && detail::inside(room, mic),
                  "image_method_rir: source and microphone must lie inside the room");
  const double direct = (src - mic).norm();
  detail::require(direct > 1e-6, "image_method_rir: source coincides with microphone");

  const double c = room.speed_of_sound;
  const double beta = opt.reflection ? *opt.reflection : sabine_reflection(room);
  detail::require(beta >= 0.0 && beta <= 1.0, "image_method_rir: reflection must lie in [0, 1]");
  double max_dist = opt.length_s ? *opt.length_s * c : 1.5 * c * room.t60;
  max_dist = std::max(max_dist, direct);
  const long len = static_cast<long>(std::ceil(max_dist / c * fs)) + kSincHalfWidth + 2;

  Rir rir;
  rir.sample_rate = fs;
  rir.taps.assign(static_cast<size_t>(len), 0.0);
  const Point3 dims = room.dims();
  const Eigen::Vector3i reach(static_cast<int>(std::ceil(max_dist / (2.0 * dims.x()))) + 1,
                              static_cast<int>(std::ceil(max_dist / (2.0 * dims.y()))) + 1,
                              static_cast<int>(std::ceil(max_dist / (2.0 * dims.z()))) + 1);
  const int max_refl = 2 * (reach.x() + reach.y() + reach.z()) + 6;
  std::vector<double> beta_pow(static_cast<size_t>(max_refl + 1));
  beta_pow[0] = 1.0;
  for (int i = 1; i <= max_refl; ++i) beta_pow[static_cast<size_t>(i)] = beta_pow[static_cast<size_t>(i - 1)] * beta;

  const double inv_four_pi = 1.0 / (4.0 * std::numbers::pi);
  for (int mx = -reach.x(); mx <= reach.x(); ++mx) {
    for (int qx = 0; qx <= 1; ++qx) {
      const double dx = (1 - 2 * qx) * src.x() + 2.0 * mx * dims.x() - mic.x();
      const int rx = std::abs(mx - qx) + std::abs(mx);
      if (std::abs(dx) > max_dist) continue;
      for (int my = -reach.y(); my <= reach.y(); ++my) {
        for (int qy = 0; qy <= 1; ++qy) {
          const double dy = (1 - 2 * qy) * src.y() + 2.0 * my * dims.y() - mic.y();
          const int ry = std::abs(my - qy) + std::abs(my);
          const double dxy2 = dx * dx + dy * dy;
          if (dxy2 > max_dist * max_dist) continue;
          for (int mz = -reach.z(); mz <= reach.z(); ++mz) {
            for (int qz = 0; qz <= 1; ++qz) {
              const double dz = (1 - 2 * qz) * src.z() + 2.0 * mz * dims.z() - mic.z();
              const double dist = std::sqrt(dxy2 + dz * dz);
              if (dist > max_dist) continue;
              const int rz = std::abs(mz - qz) + std::abs(mz);
              const double gain = beta_pow[static_cast<size_t>(rx + ry + rz)];
              if (gain == 0.0) continue;
              detail::add_fractional_impulse(rir.taps, dist / c * fs, gain * inv_four_pi / dist);
            }
          }
        }
      }
    }
  }
  return rir;
}

/// Keeps only the taps within +-6 ms of the largest-magnitude tap.
inline Rir direct_path_rir(const Rir& rir) {
  detail::require(!rir.taps.empty(), "direct_path_rir: empty response");
  const long p = rir.peak_index();
  const long half = std::lround(0.006 * rir.sample_rate);
  Rir out = rir;
  for (long i = 0; i < static_cast<long>(out.taps.size()); ++i) {
    if (i < p - half || i > p + half) out.taps[static_cast<size_t>(i)] = 0.0;
  }
  return out;
}

enum class ArrayKind { circular, adhoc };

inline std::string to_string(ArrayKind k) { return k == ArrayKind::circular ? "circular" : "adhoc"; }

inline ArrayKind parse_array_kind(const std::string& s) {
  if (s == "circular") return ArrayKind::circular;
  if (s == "adhoc") return ArrayKind::adhoc;
  throw InvalidArgument("unknown array kind: " + s);
}

struct ArrayGeometry {
  ArrayKind kind = ArrayKind::circular;
  double diameter = 0.10;  // circular only
  std::vector<Point3> positions;

  long num_mics() const { return static_cast<long>(positions.size()); }
};

/// Sampling ranges for random scenes. Defaults follow the two-speaker,
/// one-noise simulation protocol.
struct SceneConfig {
  double length_min = 3.0, length_max = 10.0;
  double width_min = 3.0, width_max = 10.0;
  double height_min = 2.5, height_max = 4.0;
  double t60_min = 0.1, t60_max = 0.5;
  double wall_margin = 0.5;
  double min_source_mic_distance = 0.2;
  ArrayKind array = ArrayKind::circular;
  long circular_mics = 6;
  double circular_diameter = 0.10;
  long adhoc_mics_min = 2, adhoc_mics_max = 6;
  double overlap_min = 0.0, overlap_max = 1.0;
  double speaker_snr_min_db = 0.0, speaker_snr_max_db = 5.0;
  double noise_snr_min_db = 10.0, noise_snr_max_db = 20.0;
  long num_speakers = 2;
  double duration_s = 4.0;
  double sample_rate = kDefaultSampleRate;
  double speed_of_sound = 343.0;
  long rejection_budget = 1000;

  void validate() const {
    auto range = [](double lo, double hi, const char* name) {
      detail::require(std::isfinite(lo) && std::isfinite(hi) && lo <= hi,
                      std::string("scene config: bad range for ") + name);
    };
    range(length_min, length_max, "length");
    range(width_min, width_max, "width");
    range(height_min, height_max, "height");
    range(t60_min, t60_max, "t60");
    range(overlap_min, overlap_max, "overlap");
    range(speaker_snr_min_db, speaker_snr_max_db, "speaker_snr");
    range(noise_snr_min_db, noise_snr_max_db, "noise_snr");
    detail::require(length_min > 2 * wall_margin && width_min > 2 * wall_margin &&
                        height_min > 2 * wall_margin,
                    "scene config: room smaller than twice the wall margin");
    detail::require(t60_min > 0.0, "scene config: t60 must be positive");
    detail::require(overlap_min >= 0.0 && overlap_max <= 1.0, "scene config: overlap outside [0, 1]");
    detail::require(num_speakers >= 1 && num_speakers <= 4, "scene config: 1..4 speakers");
    detail::require(circular_mics >= 2 && circular_diameter > 0.0, "scene config: bad circular array");
    detail::require(adhoc_mics_min >= 1 && adhoc_mics_min <= adhoc_mics_max,
                    "scene config: bad ad-hoc mic range");
    detail::require(duration_s > 0.0 && sample_rate > 0.0, "scene config: bad duration or rate");
    detail::require(rejection_budget >= 1, "scene config: rejection budget must be >= 1");
  }
};

struct SceneInstance {
  RoomSpec room;
  ArrayGeometry array;
  std::vector<Point3> source_positions;  // speakers first, noise last
  double overlap_ratio = 0.0;
  double speaker_snr_db = 0.0;
  double noise_snr_db = 0.0;
  double duration_s = 4.0;
  double sample_rate = kDefaultSampleRate;
  uint64_t seed = 0;
  std::vector<std::vector<Rir>> rirs;  // [source][mic]

  long num_speakers() const { return static_cast<long>(source_positions.size()) - 1; }
  long num_samples() const { return std::lround(duration_s * sample_rate); }
};

inline void generate_rirs(SceneInstance& scene) {
  const long sources = static_cast<long>(scene.source_positions.size());
  const long mics = scene.array.num_mics();
  scene.rirs.assign(static_cast<size_t>(sources), std::vector<Rir>(static_cast<size_t>(mics)));
#pragma omp parallel for collapse(2) schedule(dynamic)
  for (long s = 0; s < sources; ++s) {
    for (long m = 0; m < mics; ++m) {
      scene.rirs[static_cast<size_t>(s)][static_cast<size_t>(m)] =
          image_method_rir(scene.room, scene.source_positions[static_cast<size_t>(s)],
                           scene.array.positions[static_cast<size_t>(m)], scene.sample_rate);
    }
  }
}

/// Draws a room, array, source layout and mixing parameters from `cfg`,
/// deterministically for a given seed, then computes every RIR unless
/// `with_rirs` is false.
inline SceneInstance sample_scene(const SceneConfig& cfg, uint64_t seed, bool with_rirs = true) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) {
    return lo + (hi - lo) * std::generate_canonical<double, 53>(rng);
  };

  SceneInstance scene;
  scene.seed = seed;
  scene.duration_s = cfg.duration_s;
  scene.sample_rate = cfg.sample_rate;
  scene.room.length = uniform(cfg.length_min, cfg.length_max);
  scene.room.width = uniform(cfg.width_min, cfg.width_max);
  scene.room.height = uniform(cfg.height_min, cfg.height_max);
  scene.room.t60 = uniform(cfg.t60_min, cfg.t60_max);
  scene.room.speed_of_sound = cfg.speed_of_sound;

  const double mg = cfg.wall_margin;
  const RoomSpec& room = scene.room;
  auto random_point = [&](double extra) {
    return Point3(uniform(mg + extra, room.length - mg - extra),
                  uniform(mg + extra, room.width - mg - extra),
                  uniform(mg, room.height - mg));
  };

  scene.array.kind = cfg.array;
  if (cfg.array == ArrayKind::circular) {
    const double radius = cfg.circular_diameter / 2.0;
    detail::require(room.length > 2 * (mg + radius) && room.width > 2 * (mg + radius),
                    "sample_scene: array does not fit inside the wall margins");
    scene.array.diameter = cfg.circular_diameter;
    const Point3 center = random_point(radius);
    const double rot = uniform(0.0, 2.0 * std::numbers::pi);
    for (long k = 0; k < cfg.circular_mics; ++k) {
      const double ang = rot + 2.0 * std::numbers::pi * static_cast<double>(k) /
                                   static_cast<double>(cfg.circular_mics);
      scene.array.positions.emplace_back(center.x() + radius * std::cos(ang),
                                         center.y() + radius * std::sin(ang), center.z());
    }
  } else {
    scene.array.diameter = 0.0;
    const long count = cfg.adhoc_mics_min +
                       static_cast<long>(std::floor(uniform(0.0, 1.0) *
                                                    static_cast<double>(cfg.adhoc_mics_max - cfg.adhoc_mics_min + 1)));
    const long m = std::min(count, cfg.adhoc_mics_max);
    for (long k = 0; k < m; ++k) scene.array.positions.push_back(random_point(0.0));
  }

  const long sources = cfg.num_speakers + 1;
  long attempts = 0;
  while (static_cast<long>(scene.source_positions.size()) < sources) {
    if (attempts++ >= cfg.rejection_budget) {
      throw Error("sample_scene: rejection budget of " + std::to_string(cfg.rejection_budget) +
                  " draws exhausted while placing sources (seed " + std::to_string(seed) + ")");
    }
    const Point3 p = random_point(0.0);
    bool ok = true;
    for (const auto& mic : scene.array.positions)
      if ((p - mic).norm() < cfg.min_source_mic_distance) ok = false;
    if (ok) scene.source_positions.push_back(p);
  }

  scene.overlap_ratio = uniform(cfg.overlap_min, cfg.overlap_max);
  scene.speaker_snr_db = uniform(cfg.speaker_snr_min_db, cfg.speaker_snr_max_db);
  scene.noise_snr_db = uniform(cfg.noise_snr_min_db, cfg.noise_snr_max_db);
  if (with_rirs) generate_rirs(scene);
  return scene;
}

/// Result of mixing one scene. Targets are indexed [speaker].
struct SceneSignals {
  MultiChannelWaveform mixture;
  std::vector<MultiChannelWaveform> reverberant;
  std::vector<MultiChannelWaveform> direct;
  MultiChannelWaveform noise_image;
  std::vector<Eigen::VectorXd> dry;  // shifted and scaled sources, speakers then noise
  std::vector<long> onsets;          // speaker onset in samples
  double speaker_gain_db = 0.0;      // applied to speakers 1.. relative to speaker 0
  double noise_gain = 0.0;
};

/// Active length of each speaker and their onsets for a given overlap
/// ratio: speaker c starts c * (1 - overlap) * active samples in, and the
/// last one ends exactly at the clip end.
inline std::vector<long> speaker_onsets(long total, long speakers, double overlap, long* active) {
  const double denom = 1.0 + static_cast<double>(speakers - 1) * (1.0 - overlap);
  const long act = std::max(1L, static_cast<long>(std::floor(static_cast<double>(total) / denom)));
  std::vector<long> onsets;
  for (long c = 0; c < speakers; ++c)
    onsets.push_back(std::lround(static_cast<double>(c) * (1.0 - overlap) * static_cast<double>(act)));
  if (active) *active = act;
  return onsets;
}

namespace detail {

// FFT-domain convolver that transforms the source once and reuses it.
class SourceConvolver {
 public:
  SourceConvolver(const Eigen::VectorXd& x, long max_filter_len) : len_(x.size()) {
    n_ = next_pow2(len_ + max_filter_len - 1);
    std::vector<double> buf(static_cast<size_t>(n_), 0.0);
    for (long i = 0; i < len_; ++i) buf[static_cast<size_t>(i)] = x[i];
    spectrum_ = fft_.forward_real(buf);
  }

  // First len_ samples of x * h.
  Eigen::VectorXd apply(const std::vector<double>& h) {
    require(static_cast<long>(h.size()) <= n_ - len_ + 1, "convolver: filter too long");
    std::vector<double> buf(static_cast<size_t>(n_), 0.0);
    std::copy(h.begin(), h.end(), buf.begin());
    auto hf = fft_.forward_real(buf);
    for (size_t k = 0; k < hf.size(); ++k) hf[k] *= spectrum_[k];
    const auto y = fft_.inverse(hf);
    Eigen::VectorXd out(len_);
    for (long i = 0; i < len_; ++i) out[i] = y[static_cast<size_t>(i)].real();
    return out;
  }

 private:
  long len_;
  long n_ = 0;
  Fft fft_;
  std::vector<std::complex<double>> spectrum_;
};

}  // namespace detail

/// Convolves already-placed sources with the scene RIRs (source s with RIR
/// set s; trailing RIR sets may go unused). Entry s of the
/// result is the M-channel image of source s, truncated to the source length.
/// With `direct_only` the direct-path part of every RIR is used instead.
inline std::vector<MultiChannelWaveform> render_images(const SceneInstance& scene,
                                                       std::span<const Eigen::VectorXd> placed,
                                                       bool direct_only = false) {
  detail::require(placed.size() <= scene.rirs.size(),
                  "render_images: " + std::to_string(placed.size()) + " sources for " +
                      std::to_string(scene.rirs.size()) + " RIR sets");
  std::vector<MultiChannelWaveform> out;
  for (size_t s = 0; s < placed.size(); ++s) {
    long max_len = 1;
    for (const auto& r : scene.rirs[s]) max_len = std::max<long>(max_len, static_cast<long>(r.taps.size()));
    detail::SourceConvolver conv(placed[s], max_len);
    MultiChannelWaveform img(Eigen::MatrixXd(scene.array.num_mics(), placed[s].size()), scene.sample_rate);
    for (long m = 0; m < scene.array.num_mics(); ++m) {
      const Rir& r = scene.rirs[s][static_cast<size_t>(m)];
      img.samples.row(m) = conv.apply(direct_only ? direct_path_rir(r).taps : r.taps).transpose();
    }
    out.push_back(std::move(img));
  }
  return out;
}

/// Places the speakers according to the overlap ratio, rescales them to the
/// sampled relative SNR (speaker 0 as reference) and the noise to the sampled
/// speech-to-noise ratio, then renders every image. Sources are truncated or
/// zero-padded to the scene duration. A silent noise source is allowed and
/// yields a noise-free mixture; a silent speaker is rejected.
inline SceneSignals synthesize_mixture(const SceneInstance& scene,
                                       std::span<const Eigen::VectorXd> sources) {
  const long speakers = scene.num_speakers();
  detail::require(speakers >= 1, "synthesize_mixture: scene has no speakers");
  detail::require(static_cast<long>(sources.size()) == speakers + 1,
                  "synthesize_mixture: expected " + std::to_string(speakers + 1) +
                      " sources (speakers then noise), got " + std::to_string(sources.size()));
  detail::require(scene.rirs.size() == sources.size(), "synthesize_mixture: scene has no RIRs");
  const long total = scene.num_samples();

  SceneSignals sig;
  long active = 0;
  sig.onsets = speaker_onsets(total, speakers, scene.overlap_ratio, &active);
  for (long c = 0; c < speakers; ++c) {
    const Eigen::VectorXd& src = sources[static_cast<size_t>(c)];
    detail::require(src.allFinite(), "synthesize_mixture: non-finite source");
    Eigen::VectorXd placed = Eigen::VectorXd::Zero(total);
    const long onset = sig.onsets[static_cast<size_t>(c)];
    const long n = std::min({active, static_cast<long>(src.size()), total - onset});
    if (n > 0) placed.segment(onset, n) = src.head(n);
    if (placed.squaredNorm() == 0.0) {
      throw InvalidArgument("synthesize_mixture: speaker " + std::to_string(c) +
                            " is silent; relative SNR undefined");
    }
    sig.dry.push_back(std::move(placed));
  }

  // Speaker 0 is normalized to an RMS of 0.1; the others sit snr_db below it.
  const double e0 = sig.dry[0].squaredNorm() / static_cast<double>(total);
  sig.dry[0] *= 0.1 / std::sqrt(e0);
  const double ref_energy = sig.dry[0].squaredNorm();
  sig.speaker_gain_db = -scene.speaker_snr_db;
  for (long c = 1; c < speakers; ++c) {
    const double target = ref_energy * std::pow(10.0, -scene.speaker_snr_db / 10.0);
    sig.dry[static_cast<size_t>(c)] *= std::sqrt(target / sig.dry[static_cast<size_t>(c)].squaredNorm());
  }

  Eigen::VectorXd speech = Eigen::VectorXd::Zero(total);
  for (const auto& d : sig.dry) speech += d;
  const Eigen::VectorXd& raw_noise = sources[static_cast<size_t>(speakers)];
  detail::require(raw_noise.allFinite(), "synthesize_mixture: non-finite noise source");
  Eigen::VectorXd noise = Eigen::VectorXd::Zero(total);
  const long nn = std::min<long>(total, raw_noise.size());
  if (nn > 0) noise.head(nn) = raw_noise.head(nn);
  const double noise_energy = noise.squaredNorm();
  sig.noise_gain = noise_energy > 0.0
                       ? std::sqrt(speech.squaredNorm() /
                                   (noise_energy * std::pow(10.0, scene.noise_snr_db / 10.0)))
                       : 0.0;
  sig.dry.push_back(noise * sig.noise_gain);

  auto images = render_images(scene, sig.dry);
  std::vector<Eigen::VectorXd> speakers_only(sig.dry.begin(), sig.dry.end() - 1);
  std::vector<MultiChannelWaveform> direct = render_images(scene, speakers_only, true);

  sig.mixture = MultiChannelWaveform(Eigen::MatrixXd::Zero(scene.array.num_mics(), total), scene.sample_rate);
  for (long c = 0; c < speakers; ++c) {
    sig.mixture.samples += images[static_cast<size_t>(c)].samples;
    sig.reverberant.push_back(std::move(images[static_cast<size_t>(c)]));
  }
  sig.noise_image = std::move(images.back());
  sig.mixture.samples += sig.noise_image.samples;
  sig.direct = std::move(direct);
  return sig;
}

inline uint64_t derive_seed(uint64_t seed, uint64_t stream) {
  // splitmix64 finalizer
  uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seeded synthetic sources for a scene: one speech-like signal per speaker
/// and a noise signal, each covering the full scene duration.
inline std::vector<Eigen::VectorXd> synthetic_scene_sources(const SceneInstance& scene) {
  const long len = scene.num_samples();
  std::vector<Eigen::VectorXd> out;
  for (long c = 0; c < scene.num_speakers(); ++c)
    out.push_back(synthetic_speech(len, scene.sample_rate, derive_seed(scene.seed, 100 + c)));
  out.push_back(synthetic_noise(len, scene.sample_rate, derive_seed(scene.seed, 200)));
  return out;
}

}  // namespace tdgwf
