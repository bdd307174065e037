#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "tdgwf/metrics.hpp"

using namespace tdgwf;

namespace {

Eigen::VectorXd randv(long n, std::mt19937_64& rng) { return oracle::randn(n, 1, rng).col(0); }

// Makes b exactly orthogonal to a.
Eigen::VectorXd orthogonalize(const Eigen::VectorXd& b, const Eigen::VectorXd& a) {
  return b - (b.dot(a) / a.squaredNorm()) * a;
}

}  // namespace

TEST(Metrics, PerfectEstimateIsCapped) {
  std::mt19937_64 rng(1);
  const Eigen::VectorXd s = randv(1000, rng);
  EXPECT_EQ(si_sdr(s, s), kMetricCapDb);
  EXPECT_EQ(snr(s, s), kMetricCapDb);
  EXPECT_EQ(kMetricCapDb, 200.0);
}

TEST(Metrics, SiSdrIsScaleInvariant) {
  std::mt19937_64 rng(2);
  const Eigen::VectorXd s = randv(800, rng);
  const Eigen::VectorXd e = s + 0.3 * randv(800, rng);
  const double base = si_sdr(e, s);
  for (double a : {0.01, 0.5, 3.0, 1e4}) EXPECT_NEAR(si_sdr(a * e, s), base, 1e-9);
  EXPECT_EQ(si_sdr(5.0 * s, s), kMetricCapDb);
  // snr is not scale invariant.
  EXPECT_GT(std::abs(snr(2.0 * e, s) - snr(e, s)), 1.0);
}

TEST(Metrics, EqualEnergyOrthogonalNoiseIsZeroDb) {
  std::mt19937_64 rng(3);
  const Eigen::VectorXd s = randv(2000, rng);
  Eigen::VectorXd n = orthogonalize(randv(2000, rng), s);
  n *= s.norm() / n.norm();
  EXPECT_NEAR(si_sdr(s + n, s), 0.0, 1e-10);
  EXPECT_NEAR(snr(s + n, s), 0.0, 1e-10);
  EXPECT_NEAR(si_sdr(s + 0.1 * n, s), 20.0, 1e-9);
}

TEST(Metrics, SnrWorkedValues) {
  Eigen::VectorXd s(4), e(4);
  s << 1, 0, 0, 0;
  e << 1.1, 0, 0, 0;
  EXPECT_NEAR(snr(e, s), 20.0, 1e-9);
  e << 1, 1, 0, 0;
  EXPECT_NEAR(snr(e, s), 0.0, 1e-12);
  EXPECT_NEAR(snr(Eigen::VectorXd::Zero(4), s), 0.0, 1e-12);
}

TEST(Metrics, SiSdrEqualsSnrAtOptimalScale) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd s = randv(500, rng);
    const Eigen::VectorXd e = 0.7 * s + 0.5 * randv(500, rng);
    const double alpha = e.dot(s) / s.squaredNorm();
    // si_sdr(e, s) = snr(e, alpha s), with the scale moved onto the reference.
    EXPECT_NEAR(si_sdr(e, s), snr(e, alpha * s), 1e-9);
  }
}

TEST(Metrics, RejectsBadInputs) {
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(10), o = Eigen::VectorXd::Ones(10);
  EXPECT_THROW(si_sdr(o, z), InvalidArgument);
  EXPECT_THROW(si_sdr(o, Eigen::VectorXd::Ones(9)), InvalidArgument);
  EXPECT_THROW(snr(o, Eigen::VectorXd::Ones(9)), InvalidArgument);
  EXPECT_EQ(si_sdr(z, o), -kMetricCapDb);
}

TEST(Pit, IdentityAndSwappedAssignments) {
  std::mt19937_64 rng(5);
  std::vector<Eigen::VectorXd> refs = {randv(600, rng), randv(600, rng), randv(600, rng)};
  std::vector<Eigen::VectorXd> ests;
  for (const auto& r : refs) ests.push_back(r + 0.1 * randv(600, rng));
  const auto id = pit_score(ests, refs, Metric::si_sdr);
  EXPECT_EQ(id.permutation, (std::vector<long>{0, 1, 2}));
  std::vector<Eigen::VectorXd> swapped = {ests[2], ests[0], ests[1]};
  const auto sw = pit_score(swapped, refs, Metric::si_sdr);
  EXPECT_EQ(sw.permutation, (std::vector<long>{1, 2, 0}));
  EXPECT_NEAR(sw.mean_db, id.mean_db, 1e-12);
  for (size_t r = 0; r < 3; ++r) EXPECT_NEAR(sw.per_source_db[r], si_sdr(ests[r], refs[r]), 1e-12);
}

TEST(Pit, MeanIsMaximalOverAllPermutations) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Eigen::VectorXd> refs, ests;
    for (int c = 0; c < 4; ++c) refs.push_back(randv(300, rng));
    for (int c = 0; c < 4; ++c) ests.push_back(0.5 * refs[static_cast<size_t>((c + trial) % 4)] + randv(300, rng));
    for (Metric m : {Metric::snr, Metric::si_sdr}) {
      const auto rec = pit_score(ests, refs, m);
      std::vector<long> perm = {0, 1, 2, 3};
      do {
        double mean = 0.0;
        for (size_t r = 0; r < 4; ++r) mean += score(m, ests[static_cast<size_t>(perm[r])], refs[r]) / 4.0;
        EXPECT_LE(mean, rec.mean_db + 1e-12);
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
  }
}

TEST(Pit, RejectsCountMismatch) {
  std::vector<Eigen::VectorXd> one = {Eigen::VectorXd::Ones(5)};
  std::vector<Eigen::VectorXd> two = {Eigen::VectorXd::Ones(5), Eigen::VectorXd::Ones(5)};
  EXPECT_THROW(pit_score(one, two, Metric::snr), InvalidArgument);
  std::vector<Eigen::VectorXd> five(5, Eigen::VectorXd::Ones(5));
  EXPECT_THROW(pit_score(five, five, Metric::snr), InvalidArgument);
}
