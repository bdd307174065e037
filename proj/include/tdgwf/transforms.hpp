#pragma once

// Analysis/synthesis matrix pairs for the time-domain filter and the
// complex DFT pair used on the frequency-domain side.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tdgwf/error.hpp"
#include "tdgwf/signal.hpp"

namespace tdgwf {

enum class TransformKind { identity, householder, unconstrained };

inline std::string to_string(TransformKind k) {
  switch (k) {
    case TransformKind::identity: return "identity";
    case TransformKind::householder: return "householder";
    case TransformKind::unconstrained: return "unconstrained";
  }
  return "unknown";
}

inline TransformKind parse_transform_kind(const std::string& s) {
  if (s == "identity") return TransformKind::identity;
  if (s == "householder") return TransformKind::householder;
  if (s == "unconstrained") return TransformKind::unconstrained;
  throw InvalidArgument("unknown transform kind: " + s);
}

/// Real encoder B (P x N) and decoder D (N x P).
/// Features of a row frame y are y * B; frames are recovered as X * D.
struct TransformPair {
  Eigen::MatrixXd analysis;   // B
  Eigen::MatrixXd synthesis;  // D
  TransformKind kind = TransformKind::identity;

  long window_len() const { return static_cast<long>(analysis.rows()); }
  long feature_dim() const { return static_cast<long>(analysis.cols()); }
};

/// Reflection vectors v_1..v_K, each of length P.
struct HouseholderParams {
  std::vector<Eigen::VectorXd> vectors;
};

struct ComplexTransform {
  Eigen::MatrixXcd forward;
  Eigen::MatrixXcd inverse;
};

/// Per-channel N x T features; column t belongs to frame t.
struct FeatureTensor {
  std::vector<Eigen::MatrixXd> channels;
  long hop = 0;
  long signal_len = 0;
  double sample_rate = kDefaultSampleRate;

  long num_channels() const { return static_cast<long>(channels.size()); }
  long feature_dim() const { return channels.empty() ? 0 : channels.front().rows(); }
  long num_frames() const { return channels.empty() ? 0 : channels.front().cols(); }
};

inline TransformPair identity_transform(long window_len) {
  detail::require(window_len >= 1, "identity_transform: P must be >= 1");
  return {Eigen::MatrixXd::Identity(window_len, window_len),
          Eigen::MatrixXd::Identity(window_len, window_len), TransformKind::identity};
}

/// B = V_1 V_2 ... V_K with V_k = I - 2 u_k u_k^T, u_k = v_k / |v_k|; D = B^T.
inline TransformPair householder_transform(const HouseholderParams& params) {
  detail::require(!params.vectors.empty(), "householder_transform: need K >= 1 vectors");
  const long p = params.vectors.front().size();
  detail::require(p >= 1, "householder_transform: empty reflection vector");
  Eigen::MatrixXd b = Eigen::MatrixXd::Identity(p, p);
  for (size_t k = 0; k < params.vectors.size(); ++k) {
    const auto& v = params.vectors[k];
    detail::require(v.size() == p, "householder_transform: vectors differ in length");
    detail::require(v.allFinite(), "householder_transform: non-finite vector");
    const double nrm = v.norm();
    detail::require(nrm > 0.0, "householder_transform: vector " + std::to_string(k) + " is zero");
    const Eigen::VectorXd u = v / nrm;
    const Eigen::VectorXd bu = b * u;
    b.noalias() -= 2.0 * bu * u.transpose();
  }
  Eigen::MatrixXd d = b.transpose();
  return {std::move(b), std::move(d), TransformKind::householder};
}

/// Standard-normal reflection vectors from a seeded generator.
inline HouseholderParams random_householder_params(long window_len, long count,
                                                   uint64_t seed) {
  detail::require(window_len >= 1 && count >= 1,
                  "random_householder_params: need P >= 1 and K >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  HouseholderParams params;
  for (long k = 0; k < count; ++k) {
    Eigen::VectorXd v(window_len);
    do {
      for (long i = 0; i < window_len; ++i) v[i] = normal(rng);
    } while (v.norm() == 0.0);
    params.vectors.push_back(std::move(v));
  }
  return params;
}

/// B and D drawn i.i.d. from N(0, 1) / sqrt(P). No reconstruction guarantee.
inline TransformPair unconstrained_transform(long window_len, long feature_dim,
                                             uint64_t seed) {
  detail::require(window_len >= 1 && feature_dim >= 1,
                  "unconstrained_transform: need P >= 1 and N >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(window_len));
  Eigen::MatrixXd b(window_len, feature_dim);
  Eigen::MatrixXd d(feature_dim, window_len);
  for (long j = 0; j < b.cols(); ++j)
    for (long i = 0; i < b.rows(); ++i) b(i, j) = normal(rng) * scale;
  for (long j = 0; j < d.cols(); ++j)
    for (long i = 0; i < d.rows(); ++i) d(i, j) = normal(rng) * scale;
  return {std::move(b), std::move(d), TransformKind::unconstrained};
}

/// forward(n, f) = exp(-2 pi i n f / P); inverse = forward^H / P.
inline ComplexTransform dft_transform(long window_len) {
  detail::require(window_len >= 2, "dft_transform: P must be >= 2");
  ComplexTransform t;
  t.forward.resize(window_len, window_len);
  for (long n = 0; n < window_len; ++n) {
    for (long f = 0; f < window_len; ++f) {
      // Reduce n*f mod P first so the phase stays accurate for large P.
      const long k = (n * f) % window_len;
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) /
                         static_cast<double>(window_len);
      t.forward(n, f) = std::polar(1.0, ang);
    }
  }
  t.inverse = t.forward.adjoint() / static_cast<double>(window_len);
  return t;
}

/// Features per channel: B^T * frames (N x T), i.e. row frame times B.
inline FeatureTensor encode(const FrameStack& frames, const TransformPair& t) {
  detail::require(frames.window_len == t.window_len(),
                  "encode: frame length " + std::to_string(frames.window_len) +
                      " does not match transform P " + std::to_string(t.window_len()));
  FeatureTensor out;
  out.hop = frames.hop;
  out.signal_len = frames.signal_len;
  out.sample_rate = frames.sample_rate;
  out.channels.reserve(frames.channels.size());
  for (const auto& f : frames.channels) {
    detail::require(f.rows() == t.window_len(), "encode: inconsistent frame shape");
    out.channels.emplace_back(t.analysis.transpose() * f);
  }
  return out;
}

/// Frames per channel: D^T * features (P x T). Follow with overlap_add.
inline FrameStack decode(const FeatureTensor& feat, const TransformPair& t) {
  FrameStack out;
  out.hop = feat.hop;
  out.window_len = t.window_len();
  out.signal_len = feat.signal_len;
  out.sample_rate = feat.sample_rate;
  out.channels.reserve(feat.channels.size());
  for (const auto& x : feat.channels) {
    detail::require(x.rows() == t.feature_dim(),
                    "decode: feature dim " + std::to_string(x.rows()) +
                        " does not match transform N " + std::to_string(t.feature_dim()));
    out.channels.emplace_back(t.synthesis.transpose() * x);
  }
  return out;
}

// Text matrix file: header line "<kind> <P> <N>", then the P rows of B,
// then the N rows of D, row-major, 17 significant digits.
inline void save_transform(const std::filesystem::path& path, const TransformPair& t) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open transform file for writing: " + path.string());
  out << to_string(t.kind) << ' ' << t.window_len() << ' ' << t.feature_dim() << '\n';
  out << std::setprecision(17);
  auto dump = [&](const Eigen::MatrixXd& m) {
    for (long i = 0; i < m.rows(); ++i) {
      for (long j = 0; j < m.cols(); ++j) out << (j ? " " : "") << m(i, j);
      out << '\n';
    }
  };
  dump(t.analysis);
  dump(t.synthesis);
  if (!out) throw IoError("failed writing transform file: " + path.string());
}

inline TransformPair load_transform(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open transform file: " + path.string());
  std::string kind;
  long p = 0, n = 0;
  if (!(in >> kind >> p >> n) || p < 1 || n < 1) {
    throw IoError("bad transform header in " + path.string());
  }
  TransformPair t;
  t.kind = parse_transform_kind(kind);
  t.analysis.resize(p, n);
  t.synthesis.resize(n, p);
  auto fill = [&](Eigen::MatrixXd& m) {
    for (long i = 0; i < m.rows(); ++i)
      for (long j = 0; j < m.cols(); ++j)
        if (!(in >> m(i, j))) throw IoError("truncated transform file: " + path.string());
  };
  fill(t.analysis);
  fill(t.synthesis);
  return t;
}

}  // namespace tdgwf
