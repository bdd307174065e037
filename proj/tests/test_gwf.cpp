#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "tdgwf/gwf.hpp"
#include "tdgwf/metrics.hpp"

using namespace tdgwf;

namespace {

FeatureTensor random_features(long channels, long n, long t, uint64_t seed) {
  std::mt19937_64 rng(seed);
  FeatureTensor f;
  for (long m = 0; m < channels; ++m) f.channels.push_back(oracle::randn(n, t, rng));
  return f;
}

double loss(const Eigen::MatrixXd& w, const Eigen::MatrixXd& y, const Eigen::MatrixXd& x) {
  return (w.transpose() * y - x).squaredNorm();
}

}  // namespace

TEST(GroupSplit, SingleGroupStacksChannels) {
  const auto f = random_features(2, 4, 5, 1);
  const auto g = group_split(f, 1);
  ASSERT_EQ(g.num_groups(), 1);
  EXPECT_EQ(g.groups[0].rows(), 8);
  EXPECT_EQ(g.groups[0].cols(), 5);
  EXPECT_EQ(g.groups[0].topRows(4), f.channels[0]);
  EXPECT_EQ(g.groups[0].bottomRows(4), f.channels[1]);
}

TEST(GroupSplit, ChannelMajorWithinGroup) {
  const auto f = random_features(2, 4, 5, 2);
  const auto g = group_split(f, 2);
  ASSERT_EQ(g.num_groups(), 2);
  EXPECT_EQ(g.groups[0].rows(), 4);
  EXPECT_EQ(g.groups[0].row(0), f.channels[0].row(0));
  EXPECT_EQ(g.groups[0].row(1), f.channels[0].row(1));
  EXPECT_EQ(g.groups[0].row(2), f.channels[1].row(0));
  EXPECT_EQ(g.groups[0].row(3), f.channels[1].row(1));
  EXPECT_EQ(g.groups[1].row(0), f.channels[0].row(2));
  EXPECT_EQ(g.groups[1].row(3), f.channels[1].row(3));
}

TEST(GroupSplit, RejectsNonDivisor) {
  const auto f = random_features(1, 6, 3, 3);
  EXPECT_THROW(group_split(f, 4), InvalidArgument);
  EXPECT_THROW(group_split(f, 0), InvalidArgument);
}

TEST(GroupConcat, InvertsSingleChannelSplit) {
  const auto f = random_features(1, 12, 7, 4);
  for (long v : {1L, 2L, 3L, 4L, 6L, 12L}) {
    const auto g = group_split(f, v);
    EXPECT_EQ(group_concat(g.groups), f.channels[0]);
  }
}

TEST(FilterCount, SixMicFiveTwelveFeaturesTwoFiftySixGroups) {
  EXPECT_EQ(filter_coefficient_count(6, 512, 256), 6144);
  const auto mix = group_split(random_features(6, 512, 40, 5), 256);
  const auto tgt = group_split(random_features(1, 512, 40, 6), 256);
  const auto bank = solve_filter_bank(mix, tgt, kDefaultLoading);
  ASSERT_EQ(bank.filters.size(), 256u);
  for (const auto& w : bank.filters) {
    EXPECT_EQ(w.rows(), 12);
    EXPECT_EQ(w.cols(), 2);
  }
  EXPECT_EQ(bank.coefficient_count(), 6144);
}

TEST(FilterCount, FormulaForManyConfigs) {
  for (long m : {1L, 2L, 6L})
    for (long n : {8L, 64L, 512L})
      for (long v = 1; v <= n; v *= 2) EXPECT_EQ(filter_coefficient_count(m, n, v), m * n * n / v);
  EXPECT_THROW(filter_coefficient_count(2, 6, 4), InvalidArgument);
}

TEST(SolveGroupWiener, SelfPredictionGivesIdentity) {
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd y = oracle::randn(4, 50, rng);
  const Eigen::MatrixXd w = solve_group_wiener<double>(y, y, 0.0);
  EXPECT_LE((w - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SolveGroupWiener, ZeroTargetGivesZero) {
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd y = oracle::randn(4, 50, rng);
  EXPECT_EQ(solve_group_wiener<double>(y, Eigen::MatrixXd::Zero(2, 50), 1e-6), Eigen::MatrixXd::Zero(4, 2));
}

TEST(SolveGroupWiener, HandWorkedTwoByTwo) {
  Eigen::MatrixXd y(2, 2), x(2, 2), expected(2, 2);
  y << 1, 0, 0, 2;
  x << 1, 0, 0, 1;
  expected << 1, 0, 0, 0.5;
  const Eigen::MatrixXd w = solve_group_wiener<double>(y, x, 0.0);
  EXPECT_LE((w - expected).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((w.transpose() * y - x).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SolveGroupWiener, SingularSystemNamesGroup) {
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(3, 10);
  y.row(0).setOnes();
  try {
    solve_group_wiener<double>(y, Eigen::MatrixXd::Ones(1, 10), 0.0, 7);
    FAIL() << "expected SingularSystemError";
  } catch (const SingularSystemError& e) {
    EXPECT_EQ(e.index(), 7);
    EXPECT_NE(std::string(e.what()).find("group 7"), std::string::npos);
  }
  // Loading makes the same system solvable.
  EXPECT_NO_THROW(solve_group_wiener<double>(y, Eigen::MatrixXd::Ones(1, 10), 1e-3));
}

TEST(SolveGroupWiener, RejectsBadInput) {
  EXPECT_THROW(solve_group_wiener<double>(Eigen::MatrixXd::Ones(2, 5), Eigen::MatrixXd::Ones(1, 4), 0.0),
               InvalidArgument);
  EXPECT_THROW(solve_group_wiener<double>(Eigen::MatrixXd::Ones(2, 5), Eigen::MatrixXd::Ones(1, 5), -1.0),
               InvalidArgument);
}

TEST(SolveGroupWiener, MatchesPseudoInverseOracle) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 30; ++i) {
    const long d = 1 + i % 7, k = 1 + i % 3, t = 10 + 5 * i;
    const Eigen::MatrixXd y = oracle::randn(d, t, rng), x = oracle::randn(k, t, rng);
    for (double eps : {0.0, 1e-6, 1e-2}) {
      const Eigen::MatrixXd w = solve_group_wiener<double>(y, x, eps);
      const Eigen::MatrixXd ref = oracle::group_filter(y, x, eps);
      EXPECT_LE((w - ref).cwiseAbs().maxCoeff(), 1e-9 * (1.0 + ref.cwiseAbs().maxCoeff()));
    }
  }
}

TEST(SolveGroupWiener, NormalEquationsOptimalityAndOrthogonality) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    const long d = 2 + i % 6, t = 64;
    const Eigen::MatrixXd y = oracle::randn(d, t, rng), x = oracle::randn(2, t, rng);
    const Eigen::MatrixXd w = solve_group_wiener<double>(y, x, 0.0);
    const Eigen::MatrixXd r = y * (w.transpose() * y - x).transpose();
    EXPECT_LE(r.cwiseAbs().maxCoeff(), 1e-7);
    const double base = loss(w, y, x);
    for (int k = 0; k < 20; ++k) {
      Eigen::MatrixXd dw = oracle::randn(d, 2, rng);
      dw *= 1e-3 / dw.norm();
      EXPECT_GE(loss(w + dw, y, x), base);
    }
  }
}

TEST(FilterBank, SelectorBankReturnsReferenceFeatures) {
  const auto f = random_features(3, 8, 10, 7);
  const auto g = group_split(f, 2);
  WienerFilterBank bank;
  for (int v = 0; v < 2; ++v) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(12, 4);
    w.block(4, 0, 4, 4).setIdentity();  // channel 1 slice
    bank.filters.push_back(w);
  }
  const auto out = apply_filter_bank(g, bank);
  ASSERT_EQ(out.num_channels(), 1);
  EXPECT_EQ(out.channels[0], f.channels[1]);

  for (auto& w : bank.filters) w.setZero();
  EXPECT_EQ(apply_filter_bank(g, bank).channels[0], Eigen::MatrixXd::Zero(8, 10));
}

TEST(FilterBank, ApplyIsLinear) {
  const auto a = group_split(random_features(2, 8, 10, 1), 4);
  const auto b = group_split(random_features(2, 8, 10, 2), 4);
  auto c = a;
  for (size_t v = 0; v < c.groups.size(); ++v) c.groups[v] = 2.0 * a.groups[v] - 3.0 * b.groups[v];
  const auto bank = solve_filter_bank(a, group_split(random_features(1, 8, 10, 3), 4), 1e-3);
  const auto oa = apply_filter_bank(a, bank), ob = apply_filter_bank(b, bank), oc = apply_filter_bank(c, bank);
  EXPECT_LE((oc.channels[0] - 2.0 * oa.channels[0] + 3.0 * ob.channels[0]).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FilterBank, ShapeMismatchRejected) {
  const auto g = group_split(random_features(2, 8, 10, 1), 2);
  WienerFilterBank bank;
  bank.filters.push_back(Eigen::MatrixXd::Zero(8, 4));
  EXPECT_THROW(apply_filter_bank(g, bank), InvalidArgument);
  bank.filters.push_back(Eigen::MatrixXd::Zero(7, 4));
  EXPECT_THROW(apply_filter_bank(g, bank), InvalidArgument);
}

TEST(FilterBank, SingularGroupReportsItsIndex) {
  auto f = random_features(1, 8, 20, 5);
  f.channels[0].middleRows(4, 2).setZero();  // group 2 of 4 has no energy
  const auto g = group_split(f, 4);
  try {
    solve_filter_bank(g, g, 0.0);
    FAIL() << "expected SingularSystemError";
  } catch (const SingularSystemError& e) {
    EXPECT_EQ(e.index(), 2);
  }
}

TEST(FilterBank, ScalarWienerEquivalence) {
  // With V = N each group holds one feature dimension from every channel,
  // so W_v must be the M-tap least-squares combiner for that dimension.
  const long m = 3, n = 16, t = 200;
  const auto mix = random_features(m, n, t, 8);
  const auto tgt = random_features(1, n, t, 9);
  const auto bank = solve_filter_bank(group_split(mix, n), group_split(tgt, n), 0.0);
  for (long k = 0; k < n; ++k) {
    Eigen::MatrixXd a(t, m);
    for (long c = 0; c < m; ++c) a.col(c) = mix.channels[static_cast<size_t>(c)].row(k).transpose();
    const Eigen::VectorXd w = a.colPivHouseholderQr().solve(tgt.channels[0].row(k).transpose());
    EXPECT_LE((bank.filters[static_cast<size_t>(k)].col(0) - w).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(FilterBank, BinaryFileRoundtrip) {
  const auto dir = std::filesystem::temp_directory_path() / "tdgwf_bank_test";
  std::filesystem::create_directories(dir);
  const auto g = group_split(random_features(2, 8, 30, 1), 4);
  const auto bank = solve_filter_bank(g, group_split(random_features(1, 8, 30, 2), 4), 1e-4);
  save_filter_bank(dir / "bank.bin", bank);
  const auto r = load_filter_bank(dir / "bank.bin");
  EXPECT_EQ(r.regularization, bank.regularization);
  ASSERT_EQ(r.filters.size(), bank.filters.size());
  for (size_t v = 0; v < r.filters.size(); ++v) EXPECT_EQ(r.filters[v], bank.filters[v]);
  EXPECT_THROW(load_filter_bank(dir / "missing.bin"), IoError);
  std::filesystem::remove_all(dir);
}

TEST(TdGwf, SingleChannelSelfFilterReproducesInput) {
  std::mt19937_64 rng(1);
  MultiChannelWaveform mix(oracle::randn(1, 4000, rng));
  for (long p : {8L, 32L, 64L}) {
    const auto out = td_gwf(mix, mix, {identity_transform(p), 1, 0.0, 0});
    EXPECT_EQ(out.length(), mix.length());
    EXPECT_LE((out.samples - mix.samples).norm() / mix.samples.norm(), 1e-6);
    // Default loading shrinks the filter by roughly eps.
    const auto loaded = td_gwf(mix, mix, {identity_transform(p), 1, kDefaultLoading, 0});
    EXPECT_LE((loaded.samples - mix.samples).norm() / mix.samples.norm(), 1e-5);
  }
}

TEST(TdGwf, OrthogonalInterferenceChannelDoesNotHurt) {
  // Channel 0 = target + interference, channel 1 = interference alone, so
  // subtracting channel 1 recovers the target exactly.
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd src = oracle::randn(2, 8000, rng);
  Eigen::MatrixXd obs(2, 8000);
  obs.row(0) = src.row(0) + src.row(1);
  obs.row(1) = src.row(1);
  const MultiChannelWaveform mix(obs);
  const auto target = MultiChannelWaveform::mono(src.row(0).transpose());
  const auto out = td_gwf(mix, target, {identity_transform(16), 1, 1e-9, 0});
  const double before = si_sdr(mix.channel(0), target.channel(0));
  const double after = si_sdr(out.channel(0), target.channel(0));
  EXPECT_GE(after, before);
  EXPECT_GT(after, 60.0);
}

TEST(TdGwf, StackedTargetsMatchSeparateRuns) {
  std::mt19937_64 rng(3);
  const MultiChannelWaveform mix(oracle::randn(3, 3000, rng));
  const MultiChannelWaveform est(oracle::randn(2, 3000, rng));
  const TdGwfConfig cfg{householder_transform(random_householder_params(32, 2, 1)), 4, 1e-6, 0};
  const auto joint = td_gwf(mix, est, cfg);
  for (long c = 0; c < 2; ++c) {
    const auto single = td_gwf(mix, MultiChannelWaveform::mono(est.channel(c)), cfg);
    EXPECT_LE((joint.samples.row(c) - single.samples.row(0)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(TdGwf, IdentityVEqualsOneIsTimeDomainFiltering) {
  // With one group and the identity transform each frame output is a linear
  // combination of the frame samples of every channel; the bank shape says so.
  std::mt19937_64 rng(4);
  const MultiChannelWaveform mix(oracle::randn(2, 2000, rng));
  const auto res = td_gwf_detailed(mix, MultiChannelWaveform::mono(mix.channel(1)),
                                   {identity_transform(16), 1, 0.0, 0});
  ASSERT_EQ(res.bank.filters.size(), 1u);
  EXPECT_EQ(res.bank.filters[0].rows(), 32);
  EXPECT_EQ(res.bank.filters[0].cols(), 16);
  Eigen::MatrixXd sel = Eigen::MatrixXd::Zero(32, 16);
  sel.bottomRows(16).setIdentity();
  EXPECT_LE((res.bank.filters[0] - sel).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(TdGwf, RejectsMismatchedInputs) {
  std::mt19937_64 rng(5);
  const MultiChannelWaveform mix(oracle::randn(2, 1000, rng));
  const MultiChannelWaveform shorter(oracle::randn(1, 999, rng));
  EXPECT_THROW(td_gwf(mix, shorter, {identity_transform(16), 1, 1e-6, 0}), InvalidArgument);
  MultiChannelWaveform other_rate(oracle::randn(1, 1000, rng), 8000);
  EXPECT_THROW(td_gwf(mix, other_rate, {identity_transform(16), 1, 1e-6, 0}), InvalidArgument);
  EXPECT_THROW(td_gwf(mix, MultiChannelWaveform::mono(mix.channel(0)), {identity_transform(16), 3, 1e-6, 0}),
               InvalidArgument);
}
