#pragma once

// JSON run configuration and scene manifests. Every key is optional on
// input; missing keys keep their defaults and unknown keys are rejected.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tdgwf/acoustics.hpp"
#include "tdgwf/bench.hpp"
#include "tdgwf/error.hpp"
#include "tdgwf/transforms.hpp"

namespace tdgwf {

using json = nlohmann::ordered_json;

/// Single-beamformer settings used by the beamform command.
struct BeamformSettings {
  std::string beamformer = "td_gwf";  // td_gwf | fd_mcwf | fd_pmwf
  double window_ms = 4.0;
  long groups = 1;
  double eps = kDefaultLoading;
  double beta = 0.0;
  TransformKind transform = TransformKind::identity;
  long householder_reflections = 2;
};

struct RunConfig {
  uint64_t seed = 1;
  BenchConfig bench;
  BeamformSettings beamform;
};

namespace detail {

inline void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  require(j.is_object(), "config: '" + where + "' must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw InvalidArgument("config: unknown key '" + where + "." + k + "'");
  }
}

template <typename T>
void read_opt(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgument("config: bad value for '" + where + "." + key + "': " + e.what());
  }
}

inline void read_range(const json& j, const char* key, double& lo, double& hi, const std::string& where) {
  if (!j.contains(key)) return;
  const json& r = j.at(key);
  require(r.is_array() && r.size() == 2 && r[0].is_number() && r[1].is_number(),
          "config: '" + where + "." + key + "' must be a [min, max] pair");
  lo = r[0].get<double>();
  hi = r[1].get<double>();
}

inline void read_range(const json& j, const char* key, long& lo, long& hi, const std::string& where) {
  if (!j.contains(key)) return;
  const json& r = j.at(key);
  require(r.is_array() && r.size() == 2 && r[0].is_number_integer() && r[1].is_number_integer(),
          "config: '" + where + "." + key + "' must be an integer [min, max] pair");
  lo = r[0].get<long>();
  hi = r[1].get<long>();
}

}  // namespace detail

inline json to_json(const SceneConfig& c) {
  return json{{"length", {c.length_min, c.length_max}},
              {"width", {c.width_min, c.width_max}},
              {"height", {c.height_min, c.height_max}},
              {"t60", {c.t60_min, c.t60_max}},
              {"wall_margin", c.wall_margin},
              {"min_source_mic_distance", c.min_source_mic_distance},
              {"array", to_string(c.array)},
              {"circular_mics", c.circular_mics},
              {"circular_diameter", c.circular_diameter},
              {"adhoc_mics", {c.adhoc_mics_min, c.adhoc_mics_max}},
              {"overlap", {c.overlap_min, c.overlap_max}},
              {"speaker_snr_db", {c.speaker_snr_min_db, c.speaker_snr_max_db}},
              {"noise_snr_db", {c.noise_snr_min_db, c.noise_snr_max_db}},
              {"num_speakers", c.num_speakers},
              {"duration_s", c.duration_s},
              {"sample_rate", c.sample_rate},
              {"speed_of_sound", c.speed_of_sound},
              {"rejection_budget", c.rejection_budget}};
}

inline void from_json(const json& j, SceneConfig& c) {
  const std::string w = "scene";
  detail::check_keys(j,
                     {"length", "width", "height", "t60", "wall_margin", "min_source_mic_distance",
                      "array", "circular_mics", "circular_diameter", "adhoc_mics", "overlap",
                      "speaker_snr_db", "noise_snr_db", "num_speakers", "duration_s",
                      "sample_rate", "speed_of_sound", "rejection_budget"},
                     w);
  detail::read_range(j, "length", c.length_min, c.length_max, w);
  detail::read_range(j, "width", c.width_min, c.width_max, w);
  detail::read_range(j, "height", c.height_min, c.height_max, w);
  detail::read_range(j, "t60", c.t60_min, c.t60_max, w);
  detail::read_opt(j, "wall_margin", c.wall_margin, w);
  detail::read_opt(j, "min_source_mic_distance", c.min_source_mic_distance, w);
  if (j.contains("array")) {
    std::string a;
    detail::read_opt(j, "array", a, w);
    c.array = parse_array_kind(a);
  }
  detail::read_opt(j, "circular_mics", c.circular_mics, w);
  detail::read_opt(j, "circular_diameter", c.circular_diameter, w);
  detail::read_range(j, "adhoc_mics", c.adhoc_mics_min, c.adhoc_mics_max, w);
  detail::read_range(j, "overlap", c.overlap_min, c.overlap_max, w);
  detail::read_range(j, "speaker_snr_db", c.speaker_snr_min_db, c.speaker_snr_max_db, w);
  detail::read_range(j, "noise_snr_db", c.noise_snr_min_db, c.noise_snr_max_db, w);
  detail::read_opt(j, "num_speakers", c.num_speakers, w);
  detail::read_opt(j, "duration_s", c.duration_s, w);
  detail::read_opt(j, "sample_rate", c.sample_rate, w);
  detail::read_opt(j, "speed_of_sound", c.speed_of_sound, w);
  detail::read_opt(j, "rejection_budget", c.rejection_budget, w);
  c.validate();
}

inline json to_json(const BenchConfig& c) {
  return json{{"scenes", c.scenes},
              {"fd_windows_ms", c.fd_windows_ms},
              {"pmwf_betas", c.pmwf_betas},
              {"pmwf_window_ms", c.pmwf_window_ms},
              {"td_windows_ms", c.td_windows_ms},
              {"groups", c.groups},
              {"eps", c.eps},
              {"transform", to_string(c.transform)},
              {"householder_reflections", c.householder_reflections},
              {"reference_channel", c.reference_channel}};
}

inline void from_json(const json& j, BenchConfig& c) {
  const std::string w = "bench";
  detail::check_keys(j,
                     {"scenes", "fd_windows_ms", "pmwf_betas", "pmwf_window_ms", "td_windows_ms",
                      "groups", "eps", "transform", "householder_reflections", "reference_channel"},
                     w);
  detail::read_opt(j, "scenes", c.scenes, w);
  detail::read_opt(j, "fd_windows_ms", c.fd_windows_ms, w);
  detail::read_opt(j, "pmwf_betas", c.pmwf_betas, w);
  detail::read_opt(j, "pmwf_window_ms", c.pmwf_window_ms, w);
  detail::read_opt(j, "td_windows_ms", c.td_windows_ms, w);
  detail::read_opt(j, "groups", c.groups, w);
  detail::read_opt(j, "eps", c.eps, w);
  if (j.contains("transform")) {
    std::string t;
    detail::read_opt(j, "transform", t, w);
    c.transform = parse_transform_kind(t);
  }
  detail::read_opt(j, "householder_reflections", c.householder_reflections, w);
  detail::read_opt(j, "reference_channel", c.reference_channel, w);
  detail::require(c.scenes >= 1, "config: bench.scenes must be >= 1");
  detail::require(c.eps >= 0.0, "config: bench.eps must be >= 0");
  for (long g : c.groups) detail::require(g >= 1, "config: bench.groups entries must be >= 1");
  for (double b : c.pmwf_betas) detail::require(b >= 0.0, "config: bench.pmwf_betas must be >= 0");
}

inline json to_json(const BeamformSettings& c) {
  return json{{"beamformer", c.beamformer}, {"window_ms", c.window_ms},
              {"groups", c.groups},         {"eps", c.eps},
              {"beta", c.beta},             {"transform", to_string(c.transform)},
              {"householder_reflections", c.householder_reflections}};
}

inline void validate(const BeamformSettings& c) {
  detail::require(c.beamformer == "td_gwf" || c.beamformer == "fd_mcwf" || c.beamformer == "fd_pmwf",
                  "config: beamformer must be td_gwf, fd_mcwf or fd_pmwf, got '" + c.beamformer + "'");
  detail::require(c.window_ms > 0.0, "config: window_ms must be positive");
  detail::require(c.groups >= 1, "config: groups must be >= 1");
  detail::require(c.eps >= 0.0, "config: eps must be >= 0");
  detail::require(c.beta >= 0.0, "config: beta must be >= 0");
}

inline void from_json(const json& j, BeamformSettings& c) {
  const std::string w = "beamform";
  detail::check_keys(j, {"beamformer", "window_ms", "groups", "eps", "beta", "transform",
                         "householder_reflections"},
                     w);
  detail::read_opt(j, "beamformer", c.beamformer, w);
  detail::read_opt(j, "window_ms", c.window_ms, w);
  detail::read_opt(j, "groups", c.groups, w);
  detail::read_opt(j, "eps", c.eps, w);
  detail::read_opt(j, "beta", c.beta, w);
  if (j.contains("transform")) {
    std::string t;
    detail::read_opt(j, "transform", t, w);
    c.transform = parse_transform_kind(t);
  }
  detail::read_opt(j, "householder_reflections", c.householder_reflections, w);
  validate(c);
}

inline json to_json(const RunConfig& c) {
  return json{{"seed", c.seed},
              {"scene", to_json(c.bench.scene)},
              {"bench", to_json(c.bench)},
              {"beamform", to_json(c.beamform)}};
}

/// Accepts either a bare config object or a manifest carrying one under
/// "config".
inline RunConfig run_config_from_json(const json& root) {
  const json& j = root.contains("config") && root.at("config").is_object() ? root.at("config") : root;
  detail::check_keys(j, {"seed", "scene", "bench", "beamform"}, "config");
  RunConfig c;
  detail::read_opt(j, "seed", c.seed, "config");
  if (j.contains("scene")) from_json(j.at("scene"), c.bench.scene);
  if (j.contains("bench")) from_json(j.at("bench"), c.bench);
  if (j.contains("beamform")) from_json(j.at("beamform"), c.beamform);
  c.bench.seed = c.seed;
  return c;
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument("'" + path.string() + "': " + e.what());
  }
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  return run_config_from_json(read_json_file(path));
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline const char* kEnvPrefix = "TDGWF_";

/// Applies TDGWF_<NAME> environment overrides: SEED, SCENES, ARRAY,
/// BEAMFORMER, WINDOW_MS, GROUPS, BETA, EPS, TRANSFORM.
inline void apply_env_overrides(RunConfig& c) {
  auto env = [](const char* name) -> const char* {
    return std::getenv((std::string(kEnvPrefix) + name).c_str());
  };
  auto num = [](const char* name, const char* v) {
    char* end = nullptr;
    const double d = std::strtod(v, &end);
    if (end == v || *end != '\0')
      throw InvalidArgument(std::string("environment: ") + kEnvPrefix + name + " is not a number");
    return d;
  };
  if (const char* v = env("SEED")) c.seed = c.bench.seed = std::strtoull(v, nullptr, 10);
  if (const char* v = env("SCENES")) c.bench.scenes = static_cast<long>(num("SCENES", v));
  if (const char* v = env("ARRAY")) c.bench.scene.array = parse_array_kind(v);
  if (const char* v = env("BEAMFORMER")) c.beamform.beamformer = v;
  if (const char* v = env("WINDOW_MS")) c.beamform.window_ms = num("WINDOW_MS", v);
  if (const char* v = env("GROUPS")) c.beamform.groups = static_cast<long>(num("GROUPS", v));
  if (const char* v = env("BETA")) c.beamform.beta = num("BETA", v);
  if (const char* v = env("EPS")) c.beamform.eps = c.bench.eps = num("EPS", v);
  if (const char* v = env("TRANSFORM")) c.beamform.transform = c.bench.transform = parse_transform_kind(v);
}

inline json point_json(const Point3& p) { return json::array({p.x(), p.y(), p.z()}); }

/// Scene metadata; impulse responses are not serialized since they are
/// regenerated from the seed.
inline json scene_manifest(const SceneInstance& s) {
  json mics = json::array();
  for (const auto& p : s.array.positions) mics.push_back(point_json(p));
  json sources = json::array();
  for (const auto& p : s.source_positions) sources.push_back(point_json(p));
  return json{{"seed", s.seed},
              {"room", {{"length", s.room.length}, {"width", s.room.width},
                        {"height", s.room.height}, {"t60", s.room.t60},
                        {"speed_of_sound", s.room.speed_of_sound}}},
              {"array", {{"kind", to_string(s.array.kind)}, {"diameter", s.array.diameter},
                         {"mics", mics}}},
              {"sources", sources},
              {"overlap_ratio", s.overlap_ratio},
              {"speaker_snr_db", s.speaker_snr_db},
              {"noise_snr_db", s.noise_snr_db},
              {"duration_s", s.duration_s},
              {"sample_rate", s.sample_rate}};
}

}  // namespace tdgwf
