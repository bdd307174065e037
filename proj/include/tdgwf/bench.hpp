#pragma once

// Oracle beamforming benchmark: every beamformer is driven by the true
// reverberant source images and scored against them at the reference mic.

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "tdgwf/acoustics.hpp"
#include "tdgwf/fd_beam.hpp"
#include "tdgwf/gwf.hpp"
#include "tdgwf/metrics.hpp"
#include "tdgwf/transforms.hpp"

namespace tdgwf {

struct BenchConfig {
  SceneConfig scene;
  long scenes = 20;
  uint64_t seed = 1;
  std::vector<double> fd_windows_ms{32, 64, 128, 256, 512};
  std::vector<double> pmwf_betas{0, 1, 5, 10};
  double pmwf_window_ms = 512;
  std::vector<double> td_windows_ms{2, 4, 8, 16};
  std::vector<long> groups{1, 2, 4};
  double eps = kDefaultLoading;
  TransformKind transform = TransformKind::identity;
  long householder_reflections = 2;
  long reference_channel = 0;
};

inline long window_samples(double window_ms, double fs) {
  const long p = std::lround(window_ms * fs / 1000.0);
  detail::require(p >= 4, "window of " + std::to_string(window_ms) + " ms is too short");
  return p;
}

/// Transform for a TD-GWF window; seeded kinds derive their seed from P.
inline TransformPair make_transform(TransformKind kind, long window_len, uint64_t seed,
                                    long reflections = 2) {
  switch (kind) {
    case TransformKind::identity: return identity_transform(window_len);
    case TransformKind::householder:
      return householder_transform(random_householder_params(
          window_len, reflections, derive_seed(seed, static_cast<uint64_t>(window_len))));
    case TransformKind::unconstrained:
      return unconstrained_transform(window_len, window_len,
                                     derive_seed(seed, static_cast<uint64_t>(window_len)));
  }
  throw InvalidArgument("make_transform: unknown kind");
}

struct BenchRow {
  std::string method;  // mixture | fd_mcwf | fd_pmwf | td_gwf
  double window_ms = 0.0;
  long groups = 0;
  double beta = -1.0;  // fd_pmwf only
  std::vector<double> si_sdr;  // one entry per (scene, speaker)
  std::vector<double> snr;

  std::string key() const {
    std::ostringstream os;
    os << method << '|' << window_ms << '|' << groups << '|' << beta;
    return os.str();
  }
};

struct SceneScores {
  uint64_t scene_seed = 0;
  std::vector<BenchRow> rows;
};

/// Runs every configured beamformer on one scene.
inline SceneScores bench_scene(const BenchConfig& cfg, const SceneInstance& scene,
                               const SceneSignals& sig) {
  const long ref = cfg.reference_channel;
  const long speakers = static_cast<long>(sig.reverberant.size());
  const double fs = scene.sample_rate;
  detail::require(ref >= 0 && ref < sig.mixture.channels(), "bench: reference channel out of range");

  MultiChannelWaveform targets(Eigen::MatrixXd(speakers, sig.mixture.length()), fs);
  for (long c = 0; c < speakers; ++c)
    targets.samples.row(c) = sig.reverberant[static_cast<size_t>(c)].samples.row(ref);

  SceneScores out;
  out.scene_seed = scene.seed;
  auto add_row = [&](BenchRow row, const MultiChannelWaveform& est) {
    for (long c = 0; c < speakers; ++c) {
      const Eigen::VectorXd e = est.channel(c);
      const Eigen::VectorXd r = targets.channel(c);
      row.si_sdr.push_back(si_sdr(e, r));
      row.snr.push_back(snr(e, r));
    }
    out.rows.push_back(std::move(row));
  };

  {
    MultiChannelWaveform mix_ref(Eigen::MatrixXd(speakers, sig.mixture.length()), fs);
    for (long c = 0; c < speakers; ++c) mix_ref.samples.row(c) = sig.mixture.samples.row(ref);
    add_row({"mixture", 0, 0, -1, {}, {}}, mix_ref);
  }
  for (double w : cfg.fd_windows_ms) {
    add_row({"fd_mcwf", w, 0, -1, {}, {}},
            fd_mcwf_beamform(sig.mixture, targets, window_samples(w, fs), cfg.eps));
  }
  for (double beta : cfg.pmwf_betas) {
    const long p = window_samples(cfg.pmwf_window_ms, fs);
    MultiChannelWaveform est(Eigen::MatrixXd(speakers, sig.mixture.length()), fs);
    for (long c = 0; c < speakers; ++c) {
      const MultiChannelWaveform& soi = sig.reverberant[static_cast<size_t>(c)];
      MultiChannelWaveform interference(sig.mixture.samples - soi.samples, fs);
      est.samples.row(c) =
          fd_pmwf_beamform(sig.mixture, soi, interference, {beta, ref}, p, cfg.eps).samples.row(0);
    }
    add_row({"fd_pmwf", cfg.pmwf_window_ms, 0, beta, {}, {}}, est);
  }
  for (double w : cfg.td_windows_ms) {
    const long p = window_samples(w, fs);
    const TransformPair t = make_transform(cfg.transform, p, cfg.seed, cfg.householder_reflections);
    for (long v : cfg.groups) {
      if (p % v != 0) continue;
      TdGwfConfig td{t, v, cfg.eps, 0};
      add_row({"td_gwf", w, v, -1, {}, {}}, td_gwf(sig.mixture, targets, td));
    }
  }
  return out;
}

struct BenchSummaryRow {
  std::string method;
  double window_ms = 0.0;
  long groups = 0;
  double beta = -1.0;
  long count = 0;
  double si_sdr_mean = 0.0, si_sdr_std = 0.0;
  double snr_mean = 0.0, snr_std = 0.0;
};

struct BenchResult {
  std::vector<SceneScores> scenes;
  std::vector<BenchSummaryRow> summary;
};

namespace detail {

inline std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return {m, std::sqrt(s / static_cast<double>(v.size()))};
}

}  // namespace detail

inline std::vector<BenchSummaryRow> summarize(const std::vector<SceneScores>& scenes) {
  std::vector<BenchSummaryRow> out;
  if (scenes.empty()) return out;
  const auto& layout = scenes.front().rows;
  for (size_t i = 0; i < layout.size(); ++i) {
    std::vector<double> si, sn;
    for (const auto& s : scenes) {
      detail::require(s.rows.size() == layout.size() && s.rows[i].key() == layout[i].key(),
                      "summarize: scenes disagree on row layout");
      si.insert(si.end(), s.rows[i].si_sdr.begin(), s.rows[i].si_sdr.end());
      sn.insert(sn.end(), s.rows[i].snr.begin(), s.rows[i].snr.end());
    }
    BenchSummaryRow r;
    r.method = layout[i].method;
    r.window_ms = layout[i].window_ms;
    r.groups = layout[i].groups;
    r.beta = layout[i].beta;
    r.count = static_cast<long>(si.size());
    std::tie(r.si_sdr_mean, r.si_sdr_std) = detail::mean_std(si);
    std::tie(r.snr_mean, r.snr_std) = detail::mean_std(sn);
    out.push_back(r);
  }
  return out;
}

using SceneCallback = std::function<void(long index, const SceneInstance&, const SceneSignals&)>;

/// Samples `cfg.scenes` scenes (scene i uses derive_seed(cfg.seed, i)),
/// mixes synthetic sources and runs every beamformer. Results are ordered
/// by scene index.
inline BenchResult run_oracle_bench(const BenchConfig& cfg, const SceneCallback& on_scene = {}) {
  detail::require(cfg.scenes >= 1, "oracle bench: need at least one scene");
  BenchResult res;
  res.scenes.resize(static_cast<size_t>(cfg.scenes));
  for (long i = 0; i < cfg.scenes; ++i) {
    const SceneInstance scene = sample_scene(cfg.scene, derive_seed(cfg.seed, static_cast<uint64_t>(i)));
    const SceneSignals sig = synthesize_mixture(scene, synthetic_scene_sources(scene));
    if (on_scene) on_scene(i, scene, sig);
    res.scenes[static_cast<size_t>(i)] = bench_scene(cfg, scene, sig);
  }
  res.summary = summarize(res.scenes);
  return res;
}

inline const BenchSummaryRow* find_row(const std::vector<BenchSummaryRow>& rows,
                                       const std::string& method, double window_ms = 0.0,
                                       long groups = 0, double beta = -1.0) {
  for (const auto& r : rows) {
    if (r.method == method && (method == "mixture" || r.window_ms == window_ms) &&
        r.groups == groups && r.beta == beta)
      return &r;
  }
  return nullptr;
}

namespace detail {

inline std::string fmt_num(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

inline std::string fmt_opt(double v, bool present) { return present ? fmt_num(v, 3) : ""; }

}  // namespace detail

/// RFC 4180 CSV, one line per summary row.
inline std::string bench_csv(const std::vector<BenchSummaryRow>& rows) {
  std::string out = "method,window_ms,groups,beta,count,si_sdr_mean,si_sdr_std,snr_mean,snr_std\r\n";
  for (const auto& r : rows) {
    out += r.method + ',' + detail::fmt_opt(r.window_ms, r.method != "mixture") + ',' +
           (r.groups > 0 ? std::to_string(r.groups) : std::string()) + ',' +
           detail::fmt_opt(r.beta, r.beta >= 0.0) + ',' + std::to_string(r.count) + ',' +
           detail::fmt_num(r.si_sdr_mean) + ',' + detail::fmt_num(r.si_sdr_std) + ',' +
           detail::fmt_num(r.snr_mean) + ',' + detail::fmt_num(r.snr_std) + "\r\n";
  }
  return out;
}

/// Markdown table laid out as method x window x group.
inline std::string bench_markdown(const std::vector<BenchSummaryRow>& rows) {
  std::string out =
      "| Method | Window | Group | SNR (dB) | SI-SDR (dB) |\n|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    std::string method = r.method == "mixture"   ? "Mixture"
                         : r.method == "fd_mcwf" ? "FD-MCWF"
                         : r.method == "fd_pmwf" ? "FD-PMWF (beta=" + detail::fmt_num(r.beta, 0) + ")"
                                                 : "TD-GWF";
    const std::string window =
        r.method == "mixture" ? "--" : detail::fmt_num(r.window_ms, 0) + " ms";
    const std::string group = r.groups > 0 ? std::to_string(r.groups) : "--";
    out += "| " + method + " | " + window + " | " + group + " | " +
           detail::fmt_num(r.snr_mean, 2) + " +- " + detail::fmt_num(r.snr_std, 2) + " | " +
           detail::fmt_num(r.si_sdr_mean, 2) + " +- " + detail::fmt_num(r.si_sdr_std, 2) + " |\n";
  }
  return out;
}

struct TrendCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Orderings expected from the oracle experiment. Missing rows fail the
/// corresponding check.
inline std::vector<TrendCheck> check_trends(const std::vector<BenchSummaryRow>& rows) {
  std::vector<TrendCheck> out;
  auto mean = [&](const std::string& m, double w, long g = 0, double b = -1.0) -> std::optional<double> {
    const auto* r = find_row(rows, m, w, g, b);
    if (!r) return std::nullopt;
    return r->si_sdr_mean;
  };
  auto increasing = [&](const std::string& name, const std::string& label,
                        const std::vector<std::optional<double>>& vals,
                        const std::vector<std::string>& names) {
    TrendCheck c{name, true, label + ":"};
    for (size_t i = 0; i < vals.size(); ++i) {
      if (!vals[i]) {
        c.passed = false;
        c.detail += " missing " + names[i];
        continue;
      }
      c.detail += " " + names[i] + "=" + detail::fmt_num(*vals[i], 2);
      if (i > 0 && vals[i - 1] && !(*vals[i] > *vals[i - 1])) {
        c.passed = false;
        c.detail += " (violates " + names[i - 1] + " < " + names[i] + ")";
      }
    }
    out.push_back(c);
  };

  {
    TrendCheck c{"mixture_below_1db", false, ""};
    if (auto m = mean("mixture", 0)) {
      c.passed = *m < 1.0;
      c.detail = "mixture SI-SDR " + detail::fmt_num(*m, 2) + " dB (must be < 1 dB)";
    } else {
      c.detail = "missing mixture row";
    }
    out.push_back(c);
  }
  increasing("fd_mcwf_window_trend", "FD-MCWF SI-SDR",
             {mean("fd_mcwf", 32), mean("fd_mcwf", 128), mean("fd_mcwf", 512)},
             {"32ms", "128ms", "512ms"});
  increasing("td_gwf_window_trend", "TD-GWF V=1 SI-SDR",
             {mean("td_gwf", 2, 1), mean("td_gwf", 4, 1), mean("td_gwf", 8, 1), mean("td_gwf", 16, 1)},
             {"2ms", "4ms", "8ms", "16ms"});
  {
    // Decreasing in V is increasing in reverse order.
    increasing("td_gwf_group_trend", "TD-GWF 8ms SI-SDR",
               {mean("td_gwf", 8, 4), mean("td_gwf", 8, 2), mean("td_gwf", 8, 1)},
               {"V=4", "V=2", "V=1"});
  }
  {
    TrendCheck c{"td_gwf_matches_fd_mcwf", false, ""};
    const auto td = mean("td_gwf", 8, 1);
    const auto fd = mean("fd_mcwf", 512);
    if (td && fd) {
      c.passed = std::abs(*td - *fd) <= 3.0;
      c.detail = "TD-GWF 8ms V=1 " + detail::fmt_num(*td, 2) + " dB vs FD-MCWF 512ms " +
                 detail::fmt_num(*fd, 2) + " dB (|diff| must be <= 3 dB)";
    } else {
      c.detail = "missing TD-GWF 8ms V=1 or FD-MCWF 512ms row";
    }
    out.push_back(c);
  }
  {
    TrendCheck c{"fd_pmwf_below_fd_mcwf", true, ""};
    const auto fd = mean("fd_mcwf", 512);
    if (!fd) {
      c.passed = false;
      c.detail = "missing FD-MCWF 512ms row";
    } else {
      c.detail = "FD-MCWF 512ms " + detail::fmt_num(*fd, 2) + " dB;";
      for (double b : {0.0, 1.0, 5.0, 10.0}) {
        const auto p = mean("fd_pmwf", 512, 0, b);
        if (!p) {
          c.passed = false;
          c.detail += " missing beta=" + detail::fmt_num(b, 0);
          continue;
        }
        c.detail += " beta=" + detail::fmt_num(b, 0) + ":" + detail::fmt_num(*p, 2);
        if (!(*p < *fd)) {
          c.passed = false;
          c.detail += " (not below FD-MCWF)";
        }
      }
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace tdgwf
