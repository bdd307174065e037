#pragma once

// RIFF/WAVE reader and writer: 16-bit PCM and 32-bit IEEE float,
// any channel count. Samples are normalized to [-1, 1] on read.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "tdgwf/error.hpp"
#include "tdgwf/signal.hpp"

namespace tdgwf::wav {

enum class SampleFormat { pcm16, float32 };

namespace detail {

inline uint16_t read_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}
inline uint32_t read_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}
inline void put_u16(std::string& s, uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
}
inline void put_u32(std::string& s, uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

}  // namespace detail

inline MultiChannelWaveform read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open WAV file: " + path.string());
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  const auto fail = [&](const std::string& why) {
    throw IoError("malformed WAV file " + path.string() + ": " + why);
  };
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0) {
    fail("missing RIFF/WAVE header");
  }

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  const unsigned char* data = nullptr;
  size_t data_len = 0;
  size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const unsigned char* hdr = buf.data() + pos;
    const uint32_t len = detail::read_u32(hdr + 4);
    const size_t body = pos + 8;
    if (body + len > buf.size() && std::memcmp(hdr, "data", 4) != 0) fail("truncated chunk");
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (len < 16) fail("short fmt chunk");
      format = detail::read_u16(buf.data() + body);
      channels = detail::read_u16(buf.data() + body + 2);
      rate = detail::read_u32(buf.data() + body + 4);
      bits = detail::read_u16(buf.data() + body + 14);
      if (format == 0xFFFE && len >= 26) format = detail::read_u16(buf.data() + body + 24);
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      data = buf.data() + body;
      data_len = std::min<size_t>(len, buf.size() - body);
    }
    pos = body + len + (len & 1u);
  }
  if (channels == 0) fail("missing fmt chunk");
  if (data == nullptr) fail("missing data chunk");

  const bool pcm16 = format == 1 && bits == 16;
  const bool f32 = format == 3 && bits == 32;
  if (!pcm16 && !f32) {
    throw IoError("unsupported WAV encoding in " + path.string() + " (format " +
                  std::to_string(format) + ", " + std::to_string(bits) + " bits)");
  }
  const size_t frame_bytes = static_cast<size_t>(channels) * (bits / 8);
  const long frames = static_cast<long>(data_len / frame_bytes);
  Eigen::MatrixXd samples(channels, frames);
  for (long n = 0; n < frames; ++n) {
    for (long c = 0; c < channels; ++c) {
      const unsigned char* p = data + static_cast<size_t>(n) * frame_bytes +
                               static_cast<size_t>(c) * (bits / 8);
      if (pcm16) {
        samples(c, n) = static_cast<int16_t>(detail::read_u16(p)) / 32768.0;
      } else {
        uint32_t raw = detail::read_u32(p);
        float v;
        std::memcpy(&v, &raw, sizeof v);
        samples(c, n) = static_cast<double>(v);
      }
    }
  }
  return MultiChannelWaveform(std::move(samples), static_cast<double>(rate));
}

inline void write(const std::filesystem::path& path, const MultiChannelWaveform& w,
                  SampleFormat fmt = SampleFormat::float32) {
  w.validate("wav::write");
  const uint16_t channels = static_cast<uint16_t>(w.channels());
  const uint16_t bits = fmt == SampleFormat::pcm16 ? 16 : 32;
  const uint32_t rate = static_cast<uint32_t>(std::lround(w.sample_rate));
  const uint32_t data_len =
      static_cast<uint32_t>(w.length()) * channels * (bits / 8);

  std::string out;
  out.reserve(44 + data_len);
  out += "RIFF";
  detail::put_u32(out, 36 + data_len);
  out += "WAVEfmt ";
  detail::put_u32(out, 16);
  detail::put_u16(out, fmt == SampleFormat::pcm16 ? 1 : 3);
  detail::put_u16(out, channels);
  detail::put_u32(out, rate);
  detail::put_u32(out, rate * channels * (bits / 8));
  detail::put_u16(out, static_cast<uint16_t>(channels * (bits / 8)));
  detail::put_u16(out, bits);
  out += "data";
  detail::put_u32(out, data_len);
  for (long n = 0; n < w.length(); ++n) {
    for (long c = 0; c < w.channels(); ++c) {
      const double x = w.samples(c, n);
      if (fmt == SampleFormat::pcm16) {
        const double clipped = std::clamp(x, -1.0, 32767.0 / 32768.0);
        detail::put_u16(out, static_cast<uint16_t>(static_cast<int16_t>(
                                 std::lround(clipped * 32768.0))));
      } else {
        const float v = static_cast<float>(x);
        uint32_t raw;
        std::memcpy(&raw, &v, sizeof raw);
        detail::put_u32(out, raw);
      }
    }
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open WAV file for writing: " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("failed writing WAV file: " + path.string());
}

}  // namespace tdgwf::wav
