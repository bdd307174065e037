#pragma once

// Time-domain generalized Wiener filter: group splitting, per-group
// closed-form MMSE solve, filter application and the full
// frame -> encode -> filter -> decode -> overlap-add chain.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "tdgwf/error.hpp"
#include "tdgwf/signal.hpp"
#include "tdgwf/transforms.hpp"

namespace tdgwf {

/// V groups, each (M * N/V) x T. Within a group the rows of channel 0 come
/// first, then channel 1, and so on.
struct GroupedFeatures {
  std::vector<Eigen::MatrixXd> groups;
  long num_channels = 0;
  long group_dim = 0;  // N / V
  long hop = 0;
  long signal_len = 0;
  double sample_rate = kDefaultSampleRate;

  long num_groups() const { return static_cast<long>(groups.size()); }
  long feature_dim() const { return group_dim * num_groups(); }
};

/// One W_v of shape (M * N/V) x (N/V) per group.
struct WienerFilterBank {
  std::vector<Eigen::MatrixXd> filters;
  double regularization = 0.0;

  long coefficient_count() const {
    long n = 0;
    for (const auto& w : filters) n += static_cast<long>(w.size());
    return n;
  }
};

/// M * N^2 / V.
inline long filter_coefficient_count(long channels, long feature_dim, long groups) {
  detail::require(channels >= 1 && feature_dim >= 1 && groups >= 1,
                  "filter_coefficient_count: sizes must be positive");
  detail::require(feature_dim % groups == 0, "filter_coefficient_count: V must divide N");
  const long g = feature_dim / groups;
  return groups * (channels * g) * g;
}

inline GroupedFeatures group_split(const FeatureTensor& features, long groups) {
  detail::require(features.num_channels() >= 1, "group_split: no channels");
  const long n = features.feature_dim();
  const long t = features.num_frames();
  detail::require(groups >= 1 && n % groups == 0,
                  "group_split: V=" + std::to_string(groups) + " does not divide N=" +
                      std::to_string(n));
  for (const auto& ch : features.channels) {
    detail::require(ch.rows() == n && ch.cols() == t, "group_split: ragged feature tensor");
  }
  const long m = features.num_channels();
  const long g = n / groups;
  GroupedFeatures out;
  out.num_channels = m;
  out.group_dim = g;
  out.hop = features.hop;
  out.signal_len = features.signal_len;
  out.sample_rate = features.sample_rate;
  out.groups.reserve(static_cast<size_t>(groups));
  for (long v = 0; v < groups; ++v) {
    Eigen::MatrixXd y(m * g, t);
    for (long c = 0; c < m; ++c) {
      y.middleRows(c * g, g) = features.channels[static_cast<size_t>(c)].middleRows(v * g, g);
    }
    out.groups.push_back(std::move(y));
  }
  return out;
}

/// Stack (N/V) x T group outputs back into one N x T matrix.
inline Eigen::MatrixXd group_concat(std::span<const Eigen::MatrixXd> groups) {
  detail::require(!groups.empty(), "group_concat: no groups");
  const long g = groups.front().rows();
  const long t = groups.front().cols();
  Eigen::MatrixXd out(g * static_cast<long>(groups.size()), t);
  for (size_t v = 0; v < groups.size(); ++v) {
    detail::require(groups[v].rows() == g && groups[v].cols() == t,
                    "group_concat: groups differ in shape");
    out.middleRows(static_cast<long>(v) * g, g) = groups[v];
  }
  return out;
}

inline constexpr double kDefaultLoading = 1e-6;

/// Solves (Y Y^H + eps * tr(Y Y^H)/d * I) W = Y X^H for W (d x rows(X)),
/// d = rows(Y), through a Cholesky factorization. Rows of X may stack
/// several targets; each yields its own block of columns in W.
/// Works for real and complex scalars.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> solve_group_wiener(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& y,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& x, double eps,
    long group_index = 0) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  detail::require(y.cols() == x.cols(),
                  "solve_group_wiener: Y has " + std::to_string(y.cols()) +
                      " frames but X has " + std::to_string(x.cols()));
  detail::require(y.rows() >= 1, "solve_group_wiener: empty Y");
  detail::require(eps >= 0.0, "solve_group_wiener: eps must be >= 0");
  detail::require(y.allFinite() && x.allFinite(), "solve_group_wiener: non-finite input");

  const long d = y.rows();
  Mat cov = Mat::Zero(d, d);
  cov.template selfadjointView<Eigen::Lower>().rankUpdate(y);
  const double load = eps * std::real(cov.trace()) / static_cast<double>(d);
  cov.diagonal().array() += Scalar(load);
  const Mat rhs = y * x.adjoint();

  Eigen::LLT<Mat, Eigen::Lower> llt(cov);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-14)) {
    throw SingularSystemError("solve_group_wiener: singular normal equations in group " +
                                  std::to_string(group_index) + " (eps=" +
                                  std::to_string(eps) + ")",
                              group_index);
  }
  return llt.solve(rhs);
}

/// Solves every group. `targets` holds the grouped single-channel target
/// features; a target with k stacked channels produces k filter blocks.
inline WienerFilterBank solve_filter_bank(const GroupedFeatures& mix,
                                          const GroupedFeatures& targets, double eps) {
  detail::require(mix.num_groups() == targets.num_groups() && mix.num_groups() >= 1,
                  "solve_filter_bank: group counts differ");
  WienerFilterBank bank;
  bank.regularization = eps;
  bank.filters.resize(mix.groups.size());
  const long v_count = mix.num_groups();
#if defined(_OPENMP)
  std::vector<std::string> errors(static_cast<size_t>(v_count));
  std::vector<long> failed(static_cast<size_t>(v_count), -1);
#pragma omp parallel for schedule(static) if (v_count > 1)
  for (long v = 0; v < v_count; ++v) {
    try {
      bank.filters[static_cast<size_t>(v)] = solve_group_wiener<double>(
          mix.groups[static_cast<size_t>(v)], targets.groups[static_cast<size_t>(v)], eps, v);
    } catch (const SingularSystemError& e) {
      errors[static_cast<size_t>(v)] = e.what();
      failed[static_cast<size_t>(v)] = v;
    } catch (const Error& e) {
      errors[static_cast<size_t>(v)] = e.what();
    }
  }
  for (long v = 0; v < v_count; ++v) {
    if (failed[static_cast<size_t>(v)] >= 0) throw SingularSystemError(errors[static_cast<size_t>(v)], v);
    if (!errors[static_cast<size_t>(v)].empty()) throw InvalidArgument(errors[static_cast<size_t>(v)]);
  }
#else
  for (long v = 0; v < v_count; ++v) {
    bank.filters[static_cast<size_t>(v)] = solve_group_wiener<double>(
        mix.groups[static_cast<size_t>(v)], targets.groups[static_cast<size_t>(v)], eps, v);
  }
#endif
  return bank;
}

/// Per group X_v = W_v^T Y_v, concatenated over groups. A bank whose filters
/// carry k * N/V columns yields k output channels.
inline FeatureTensor apply_filter_bank(const GroupedFeatures& groups,
                                       const WienerFilterBank& bank) {
  detail::require(groups.num_groups() == static_cast<long>(bank.filters.size()) &&
                      groups.num_groups() >= 1,
                  "apply_filter_bank: bank has " + std::to_string(bank.filters.size()) +
                      " filters for " + std::to_string(groups.num_groups()) + " groups");
  const long g = groups.group_dim;
  const long cols = bank.filters.front().cols();
  detail::require(g >= 1 && cols % g == 0, "apply_filter_bank: filter width must be k * N/V");
  const long outputs = cols / g;
  std::vector<std::vector<Eigen::MatrixXd>> per_output(static_cast<size_t>(outputs));
  for (long v = 0; v < groups.num_groups(); ++v) {
    const auto& w = bank.filters[static_cast<size_t>(v)];
    const auto& y = groups.groups[static_cast<size_t>(v)];
    detail::require(w.rows() == y.rows() && w.cols() == cols,
                    "apply_filter_bank: filter " + std::to_string(v) + " is " +
                        std::to_string(w.rows()) + "x" + std::to_string(w.cols()) +
                        ", group rows " + std::to_string(y.rows()));
    const Eigen::MatrixXd out = w.transpose() * y;
    for (long k = 0; k < outputs; ++k) per_output[static_cast<size_t>(k)].push_back(out.middleRows(k * g, g));
  }
  FeatureTensor result;
  result.hop = groups.hop;
  result.signal_len = groups.signal_len;
  result.sample_rate = groups.sample_rate;
  for (const auto& parts : per_output) result.channels.push_back(group_concat(parts));
  return result;
}

struct TdGwfConfig {
  TransformPair transform;
  long groups = 1;
  double eps = kDefaultLoading;
  long hop = 0;  // 0 selects P/4
};

struct TdGwfResult {
  MultiChannelWaveform output;
  WienerFilterBank bank;
};

/// Full time-domain chain. Each row of `estimates` is an independent target;
/// all of them share the mixture statistics and one factorization per group.
/// Output row c is the beamformed estimate for target c, same length as `mix`.
inline TdGwfResult td_gwf_detailed(const MultiChannelWaveform& mix,
                                   const MultiChannelWaveform& estimates,
                                   const TdGwfConfig& cfg) {
  mix.validate("td_gwf mixture");
  estimates.validate("td_gwf estimate");
  detail::require(mix.length() == estimates.length(),
                  "td_gwf: mixture has " + std::to_string(mix.length()) +
                      " samples, estimate has " + std::to_string(estimates.length()));
  detail::require(mix.sample_rate == estimates.sample_rate,
                  "td_gwf: sample rates differ");
  const long p = cfg.transform.window_len();
  const long hop = cfg.hop > 0 ? cfg.hop : default_hop(p);

  const FrameStack mix_frames = frame(mix, p, hop);
  const FrameStack est_frames = frame(estimates, p, hop);
  const GroupedFeatures y = group_split(encode(mix_frames, cfg.transform), cfg.groups);

  // Stack the targets' group slices so one solve covers every target.
  const FeatureTensor est_feat = encode(est_frames, cfg.transform);
  GroupedFeatures x;
  {
    const long c_count = est_feat.num_channels();
    const long g = y.group_dim;
    x.num_channels = c_count;
    x.group_dim = g;
    for (long v = 0; v < y.num_groups(); ++v) {
      Eigen::MatrixXd stacked(c_count * g, est_feat.num_frames());
      for (long c = 0; c < c_count; ++c)
        stacked.middleRows(c * g, g) = est_feat.channels[static_cast<size_t>(c)].middleRows(v * g, g);
      x.groups.push_back(std::move(stacked));
    }
  }

  TdGwfResult res;
  res.bank = solve_filter_bank(y, x, cfg.eps);
  const FeatureTensor filtered = apply_filter_bank(y, res.bank);
  res.output = overlap_add(decode(filtered, cfg.transform), {}, mix.length());
  return res;
}

inline MultiChannelWaveform td_gwf(const MultiChannelWaveform& mix,
                                   const MultiChannelWaveform& estimates,
                                   const TdGwfConfig& cfg) {
  return td_gwf_detailed(mix, estimates, cfg).output;
}

// Binary filter-bank dump, little-endian:
//   "TGWFBANK" | u32 version=1 | u64 V | f64 eps | V x (u64 rows, u64 cols, rows*cols f64 row-major)
inline void save_filter_bank(const std::filesystem::path& path, const WienerFilterBank& bank) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open filter bank file for writing: " + path.string());
  auto put = [&](const auto& v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); };
  out.write("TGWFBANK", 8);
  put(uint32_t{1});
  put(static_cast<uint64_t>(bank.filters.size()));
  put(bank.regularization);
  for (const auto& w : bank.filters) {
    put(static_cast<uint64_t>(w.rows()));
    put(static_cast<uint64_t>(w.cols()));
    for (long i = 0; i < w.rows(); ++i)
      for (long j = 0; j < w.cols(); ++j) put(w(i, j));
  }
  if (!out) throw IoError("failed writing filter bank: " + path.string());
}

inline WienerFilterBank load_filter_bank(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open filter bank file: " + path.string());
  auto get = [&](auto& v) {
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
      throw IoError("truncated filter bank file: " + path.string());
  };
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, "TGWFBANK", 8) != 0)
    throw IoError("not a filter bank file: " + path.string());
  uint32_t version = 0;
  uint64_t count = 0;
  WienerFilterBank bank;
  get(version);
  if (version != 1) throw IoError("unsupported filter bank version in " + path.string());
  get(count);
  get(bank.regularization);
  for (uint64_t v = 0; v < count; ++v) {
    uint64_t rows = 0, cols = 0;
    get(rows);
    get(cols);
    Eigen::MatrixXd w(static_cast<long>(rows), static_cast<long>(cols));
    for (long i = 0; i < w.rows(); ++i)
      for (long j = 0; j < w.cols(); ++j) get(w(i, j));
    bank.filters.push_back(std::move(w));
  }
  return bank;
}

}  // namespace tdgwf
