#pragma once

// Sequential beamforming skeleton: separate, beamform, re-separate, repeat.
// The separators are oracle stand-ins driven by ground-truth references.

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tdgwf/acoustics.hpp"
#include "tdgwf/error.hpp"
#include "tdgwf/fd_beam.hpp"
#include "tdgwf/gwf.hpp"
#include "tdgwf/metrics.hpp"
#include "tdgwf/signal.hpp"

namespace tdgwf {

enum class SeparatorKind { oracle, degraded_oracle };

struct SeparatorSpec {
  SeparatorKind kind = SeparatorKind::oracle;
  double error_snr_db = 20.0;  // degraded_oracle only
  long reference_channel = 0;
  uint64_t seed = 0;
};

enum class BeamformerKind { td_gwf, fd_mcwf };

struct BeamformerSpec {
  BeamformerKind kind = BeamformerKind::td_gwf;
  TdGwfConfig td;          // td_gwf
  long fft_size = 8192;    // fd_mcwf
  double eps = kDefaultLoading;  // fd_mcwf
};

/// Beamforms every row of `estimates` against the full mixture.
inline MultiChannelWaveform beamform(const BeamformerSpec& spec, const MultiChannelWaveform& mix,
                                     const MultiChannelWaveform& estimates) {
  if (spec.kind == BeamformerKind::td_gwf) return td_gwf(mix, estimates, spec.td);
  return fd_mcwf_beamform(mix, estimates, spec.fft_size, spec.eps);
}

enum class FinalOutput { beamformed, post_separated };

struct PipelineConfig {
  long iterations = 1;
  BeamformerSpec beamformer;
  FinalOutput final_output = FinalOutput::beamformed;
};

struct PipelineInputs {
  MultiChannelWaveform mixture;
  std::vector<Eigen::VectorXd> references;  // per-source SOI at the reference mic
};

struct IterationResult {
  MultiChannelWaveform estimates;   // separator output, one row per source
  MultiChannelWaveform beamformed;  // beamformer output, one row per source
  EvalRecord estimate_score;
  EvalRecord beamformed_score;
};

struct PipelineResult {
  std::vector<IterationResult> iterations;
  EvalRecord final_score;
};

/// Stand-in separator. The oracle returns the references; the degraded
/// oracle adds seeded white noise at `error_snr_db` below each reference,
/// drawn afresh for every iteration.
inline MultiChannelWaveform run_separator(const SeparatorSpec& sep, const PipelineInputs& in,
                                          long iteration) {
  detail::require(!in.references.empty(),
                  "separator: oracle modes need ground-truth references");
  const long len = in.mixture.length();
  MultiChannelWaveform out(Eigen::MatrixXd(static_cast<long>(in.references.size()), len),
                           in.mixture.sample_rate);
  for (size_t c = 0; c < in.references.size(); ++c) {
    const Eigen::VectorXd& ref = in.references[c];
    detail::require(ref.size() == len, "separator: reference length differs from mixture");
    Eigen::VectorXd est = ref;
    if (sep.kind == SeparatorKind::degraded_oracle) {
      detail::require(std::isfinite(sep.error_snr_db), "separator: error SNR must be finite");
      std::mt19937_64 rng(derive_seed(sep.seed, static_cast<uint64_t>(iteration) * 64 + c));
      std::normal_distribution<double> normal(0.0, 1.0);
      Eigen::VectorXd noise(len);
      for (long n = 0; n < len; ++n) noise[n] = normal(rng);
      const double scale = std::sqrt(ref.squaredNorm() /
                                     (noise.squaredNorm() * std::pow(10.0, sep.error_snr_db / 10.0)));
      est += scale * noise;
    }
    out.samples.row(static_cast<long>(c)) = est.transpose();
  }
  return out;
}

inline EvalRecord score_rows(const MultiChannelWaveform& rows, std::span<const Eigen::VectorXd> refs) {
  std::vector<Eigen::VectorXd> ests;
  for (long c = 0; c < rows.channels(); ++c) ests.push_back(rows.channel(c));
  return pit_score(ests, refs, Metric::si_sdr);
}

/// Iteration 1 separates on the reference channel and beamforms every
/// estimate against the mixture; later iterations re-run the separator
/// stand-in and beamform again. Every stage is scored with PIT SI-SDR.
inline PipelineResult run_sequential(const PipelineInputs& in, const SeparatorSpec& sep,
                                     const PipelineConfig& cfg) {
  detail::require(cfg.iterations >= 1, "run_sequential: need at least one iteration");
  detail::require(!in.references.empty(),
                  "run_sequential: oracle separators require reference signals");
  detail::require(sep.reference_channel >= 0 && sep.reference_channel < in.mixture.channels(),
                  "run_sequential: reference channel out of range");
  in.mixture.validate("run_sequential mixture");

  PipelineResult res;
  for (long j = 1; j <= cfg.iterations; ++j) {
    IterationResult it;
    it.estimates = run_separator(sep, in, j);
    it.beamformed = beamform(cfg.beamformer, in.mixture, it.estimates);
    it.estimate_score = score_rows(it.estimates, in.references);
    it.beamformed_score = score_rows(it.beamformed, in.references);
    res.iterations.push_back(std::move(it));
  }
  const auto& last = res.iterations.back();
  res.final_score = cfg.final_output == FinalOutput::beamformed ? last.beamformed_score
                                                                 : last.estimate_score;
  return res;
}

}  // namespace tdgwf
