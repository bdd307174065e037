#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "tdgwf/signal.hpp"
#include "tdgwf/wav.hpp"

using namespace tdgwf;

namespace {

MultiChannelWaveform ramp(long len, long channels = 1) {
  Eigen::MatrixXd s(channels, len);
  for (long m = 0; m < channels; ++m)
    for (long n = 0; n < len; ++n) s(m, n) = static_cast<double>(n + 1) + 100.0 * m;
  return MultiChannelWaveform(s);
}

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<size_t>(v.size())};
}

}  // namespace

TEST(Frame, SingleFrameEqualsSignal) {
  const auto w = ramp(8);
  const FrameStack f = frame(w, 8, 2);
  ASSERT_EQ(f.num_frames(), 1);
  for (long n = 0; n < 8; ++n) EXPECT_EQ(f.channels[0](n, 0), w.samples(0, n));
}

TEST(Frame, TenSamplesWindowEightHopTwoNeedsTwoFrames) {
  const auto w = ramp(10);
  const FrameStack f = frame(w, 8, 2);
  ASSERT_EQ(f.num_frames(), 2);
  // Frame 1 covers samples 2..9, all inside the signal.
  for (long n = 0; n < 8; ++n) EXPECT_EQ(f.channels[0](n, 1), w.samples(0, n + 2));
}

TEST(Frame, TailPaddingFillsLastFrameWithZeros) {
  const auto w = ramp(10);
  const FrameStack f = frame(w, 8, 8);
  ASSERT_EQ(f.num_frames(), 2);
  for (long n = 0; n < 2; ++n) EXPECT_EQ(f.channels[0](n, 1), w.samples(0, 8 + n));
  for (long n = 2; n < 8; ++n) EXPECT_EQ(f.channels[0](n, 1), 0.0);
}

TEST(Frame, HannWindowOnOnes) {
  MultiChannelWaveform w(Eigen::MatrixXd::Ones(1, 4));
  const Eigen::VectorXd win = hann(4);
  const FrameStack f = frame(w, 4, 1, as_span(win));
  EXPECT_NEAR(f.channels[0](0, 0), 0.0, 1e-15);
  EXPECT_NEAR(f.channels[0](1, 0), 0.5, 1e-15);
  EXPECT_NEAR(f.channels[0](2, 0), 1.0, 1e-15);
  EXPECT_NEAR(f.channels[0](3, 0), 0.5, 1e-15);
}

TEST(Frame, RejectsBadArguments) {
  const auto w = ramp(16);
  EXPECT_THROW(frame(w, 32, 8), InvalidArgument);
  EXPECT_THROW(frame(w, 8, 3), InvalidArgument);
  EXPECT_THROW(frame(w, 8, 0), InvalidArgument);
  EXPECT_THROW(frame(w, 1, 1), InvalidArgument);
  auto bad = w;
  bad.samples(0, 3) = std::nan("");
  EXPECT_THROW(frame(bad, 8, 2), InvalidArgument);
  const Eigen::VectorXd short_win = hann(4);
  EXPECT_THROW(frame(w, 8, 2, as_span(short_win)), InvalidArgument);
}

TEST(Frame, CountMatchesLoopOracle) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> pexp(1, 8), lenrand(0, 2000), div(0, 3);
  for (int i = 0; i < 100; ++i) {
    const long p = 1L << pexp(rng);
    const long hop = std::max(1L, p >> div(rng));
    const long len = p + lenrand(rng);
    const auto w = ramp(len);
    const FrameStack f = frame(w, p, hop);
    EXPECT_EQ(f.num_frames(), oracle::loop_frame_count(len, p, hop)) << len << " " << p << " " << hop;
    EXPECT_EQ(frame_count(len, p, hop), f.num_frames());
    // Every sample appears in some frame.
    EXPECT_GE((f.num_frames() - 1) * hop + p, len);
  }
}

TEST(Frame, IsLinear) {
  std::mt19937_64 rng(3);
  MultiChannelWaveform a(oracle::randn(2, 100, rng)), b(oracle::randn(2, 100, rng));
  MultiChannelWaveform c(2.5 * a.samples - 0.75 * b.samples);
  const auto fa = frame(a, 16, 4), fb = frame(b, 16, 4), fc = frame(c, 16, 4);
  for (int m = 0; m < 2; ++m)
    EXPECT_LE((fc.channels[m] - (2.5 * fa.channels[m] - 0.75 * fb.channels[m])).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Hann, Definition) {
  const Eigen::VectorXd w = hann(4);
  EXPECT_NEAR(w[0], 0.0, 1e-15);
  EXPECT_NEAR(w[1], 0.5, 1e-15);
  EXPECT_NEAR(w[2], 1.0, 1e-15);
  EXPECT_NEAR(w[3], 0.5, 1e-15);
  for (long p : {2L, 7L, 64L, 1000L}) EXPECT_EQ(hann(p)[0], 0.0);
  EXPECT_THROW(hann(1), InvalidArgument);
}

TEST(Hann, SquaredShiftsAreConstantAtQuarterHop) {
  for (long p : {16L, 64L, 512L}) {
    const Eigen::VectorXd w = hann(p);
    const long hop = p / 4;
    const long frames = 12;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero((frames - 1) * hop + p);
    for (long t = 0; t < frames; ++t) acc.segment(t * hop, p) += w.cwiseAbs2();
    for (long n = p; n < (frames - 1) * hop; ++n) EXPECT_NEAR(acc[n], 1.5, 1e-12);
  }
}

TEST(OverlapAdd, RectangularRoundtripIsExactOnInterior) {
  std::mt19937_64 rng(5);
  for (long p : {8L, 32L, 128L}) {
    MultiChannelWaveform x(oracle::randn(3, 1000, rng));
    const auto f = frame(x, p, p / 4);
    const auto y = overlap_add(f, {}, x.length());
    for (int m = 0; m < 3; ++m) {
      const Eigen::VectorXd a = y.channel(m), b = x.channel(m);
      EXPECT_LE(oracle::rel_err(a, b, p, x.length() - p), 1e-10);
    }
    // Here the whole signal is covered, so the edges come back too.
    EXPECT_LE((y.samples - x.samples).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(OverlapAdd, SingleFrameHopPIsIdentity) {
  const auto x = ramp(16);
  const auto y = overlap_add(frame(x, 16, 16), {}, 16);
  EXPECT_EQ(y.samples, x.samples);
}

TEST(OverlapAdd, HannAnalysisAndSynthesisRoundtrip) {
  std::mt19937_64 rng(9);
  const long p = 64;
  MultiChannelWaveform x(oracle::randn(1, 2000, rng));
  const Eigen::VectorXd w = hann(p);
  const auto y = overlap_add(frame(x, p, p / 4, as_span(w)), as_span(w), x.length());
  EXPECT_LE(oracle::rel_err(y.channel(0), x.channel(0), p, x.length() - p), 1e-6);
  // The first sample has zero window energy and is zeroed.
  EXPECT_EQ(y.samples(0, 0), 0.0);
}

TEST(OverlapAdd, RejectsTooLongOutput) {
  const auto x = ramp(32);
  const auto f = frame(x, 8, 2);
  EXPECT_THROW(overlap_add(f, {}, 33), InvalidArgument);
  EXPECT_NO_THROW(overlap_add(f, {}, 32));
}

TEST(Waveform, Validate) {
  EXPECT_THROW(MultiChannelWaveform(Eigen::MatrixXd(0, 4)).validate(), InvalidArgument);
  EXPECT_THROW(MultiChannelWaveform(Eigen::MatrixXd(1, 0)).validate(), InvalidArgument);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(1, 4);
  s(0, 2) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(MultiChannelWaveform(s).validate(), InvalidArgument);
}

class WavTest : public ::testing::Test {
 protected:
  std::filesystem::path dir = std::filesystem::temp_directory_path() / "tdgwf_wav_test";
  void SetUp() override { std::filesystem::create_directories(dir); }
  void TearDown() override { std::filesystem::remove_all(dir); }
};

TEST_F(WavTest, Float32RoundtripIsExactForFloatValues) {
  std::mt19937_64 rng(1);
  Eigen::MatrixXd s = (0.3 * oracle::randn(3, 500, rng)).cast<float>().cast<double>();
  MultiChannelWaveform w(s, 16000);
  wav::write(dir / "a.wav", w, wav::SampleFormat::float32);
  const auto r = wav::read(dir / "a.wav");
  EXPECT_EQ(r.channels(), 3);
  EXPECT_EQ(r.length(), 500);
  EXPECT_EQ(r.sample_rate, 16000);
  EXPECT_EQ(r.samples, s);
}

TEST_F(WavTest, Pcm16RoundtripWithinQuantization) {
  std::mt19937_64 rng(2);
  Eigen::MatrixXd s = (0.2 * oracle::randn(2, 400, rng)).cwiseMax(-0.99).cwiseMin(0.99);
  wav::write(dir / "b.wav", MultiChannelWaveform(s, 8000), wav::SampleFormat::pcm16);
  const auto r = wav::read(dir / "b.wav");
  EXPECT_EQ(r.sample_rate, 8000);
  EXPECT_LE((r.samples - s).cwiseAbs().maxCoeff(), 1.0 / 32768.0);
}

TEST_F(WavTest, MissingAndMalformedFiles) {
  EXPECT_THROW(wav::read(dir / "missing.wav"), IoError);
  std::ofstream(dir / "junk.wav") << "not a wave file at all, just text";
  EXPECT_THROW(wav::read(dir / "junk.wav"), IoError);
}
