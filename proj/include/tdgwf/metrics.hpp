#pragma once

// SNR, SI-SDR and permutation-invariant scoring.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "tdgwf/error.hpp"

namespace tdgwf {

/// Returned for exact reconstructions so aggregates stay finite.
inline constexpr double kMetricCapDb = 200.0;

enum class Metric { snr, si_sdr };

inline std::string to_string(Metric m) { return m == Metric::snr ? "snr" : "si_sdr"; }

namespace detail {

inline double ratio_db(double signal, double error) {
  if (error <= signal * 1e-20) return kMetricCapDb;
  return std::min(kMetricCapDb, 10.0 * std::log10(signal / error));
}

}  // namespace detail

inline double si_sdr(const Eigen::Ref<const Eigen::VectorXd>& est,
                     const Eigen::Ref<const Eigen::VectorXd>& ref) {
  detail::require(est.size() == ref.size(), "si_sdr: length mismatch (" +
                                                std::to_string(est.size()) + " vs " +
                                                std::to_string(ref.size()) + ")");
  const double ref_energy = ref.squaredNorm();
  detail::require(ref_energy > 0.0, "si_sdr: reference is all zeros");
  const Eigen::VectorXd proj = (est.dot(ref) / ref_energy) * ref;
  const double target = proj.squaredNorm();
  const double noise = (est - proj).squaredNorm();
  if (target == 0.0) return -kMetricCapDb;
  return detail::ratio_db(target, noise);
}

inline double snr(const Eigen::Ref<const Eigen::VectorXd>& est,
                  const Eigen::Ref<const Eigen::VectorXd>& ref) {
  detail::require(est.size() == ref.size(), "snr: length mismatch (" +
                                                std::to_string(est.size()) + " vs " +
                                                std::to_string(ref.size()) + ")");
  const double ref_energy = ref.squaredNorm();
  if (ref_energy == 0.0) return -kMetricCapDb;
  return detail::ratio_db(ref_energy, (est - ref).squaredNorm());
}

inline double score(Metric m, const Eigen::Ref<const Eigen::VectorXd>& est,
                    const Eigen::Ref<const Eigen::VectorXd>& ref) {
  return m == Metric::snr ? snr(est, ref) : si_sdr(est, ref);
}

struct EvalRecord {
  Metric metric = Metric::si_sdr;
  std::vector<double> per_source_db;  // indexed by reference
  double mean_db = 0.0;
  std::vector<long> permutation;  // permutation[r] = estimate assigned to reference r
};

/// Exhaustive search over all C! assignments of estimates to references,
/// keeping the one with the highest mean score. C is capped at 4.
inline EvalRecord pit_score(std::span<const Eigen::VectorXd> ests,
                            std::span<const Eigen::VectorXd> refs, Metric metric) {
  detail::require(ests.size() == refs.size(),
                  "pit_score: " + std::to_string(ests.size()) + " estimates for " +
                      std::to_string(refs.size()) + " references");
  detail::require(!refs.empty() && refs.size() <= 4, "pit_score: need 1..4 sources");
  const size_t c = refs.size();
  // Pairwise score table, est i vs ref j.
  std::vector<double> table(c * c);
  for (size_t i = 0; i < c; ++i)
    for (size_t j = 0; j < c; ++j) table[i * c + j] = score(metric, ests[i], refs[j]);

  std::vector<long> perm(c);
  std::iota(perm.begin(), perm.end(), 0L);
  EvalRecord best;
  best.metric = metric;
  best.mean_db = -std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (size_t r = 0; r < c; ++r) total += table[static_cast<size_t>(perm[r]) * c + r];
    const double mean = total / static_cast<double>(c);
    if (mean > best.mean_db) {
      best.mean_db = mean;
      best.permutation = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  best.per_source_db.resize(c);
  for (size_t r = 0; r < c; ++r)
    best.per_source_db[r] = table[static_cast<size_t>(best.permutation[r]) * c + r];
  // Recompute the mean from the stored values so the two always agree.
  best.mean_db = std::accumulate(best.per_source_db.begin(), best.per_source_db.end(), 0.0) /
                 static_cast<double>(c);
  return best;
}

}  // namespace tdgwf
