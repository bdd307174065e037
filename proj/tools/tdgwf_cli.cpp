// tdgwf: scene simulation, oracle benchmark and offline beamforming.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "tdgwf/config.hpp"
#include "tdgwf/tdgwf.hpp"

namespace fs = std::filesystem;
using namespace tdgwf;

namespace {

struct Flags {
  std::string config;
  uint64_t seed = 0;
  std::string out = ".";
  long scenes = 0;
  std::string array;
  std::string beamformer;
  double window_ms = 0.0;
  long groups = 0;
  double beta = 0.0;
  double eps = 0.0;
  std::string transform;
  bool assert_trends = false;
  std::string mixture;
  std::string estimate;
};

struct Options {
  CLI::Option* seed = nullptr;
  CLI::Option* scenes = nullptr;
  CLI::Option* array = nullptr;
  CLI::Option* beamformer = nullptr;
  CLI::Option* window_ms = nullptr;
  CLI::Option* groups = nullptr;
  CLI::Option* beta = nullptr;
  CLI::Option* eps = nullptr;
  CLI::Option* transform = nullptr;
};

void add_common(CLI::App* cmd, Flags& f, Options& o) {
  cmd->add_option("--config", f.config, "JSON config or manifest to start from");
  o.seed = cmd->add_option("--seed", f.seed, "Base seed");
  cmd->add_option("--out", f.out, "Output directory");
}

// Defaults, then config file, then TDGWF_* environment, then flags.
RunConfig resolve(const Flags& f, const Options& o) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_run_config(f.config);
  apply_env_overrides(c);
  if (o.seed && o.seed->count()) c.seed = f.seed;
  if (o.scenes && o.scenes->count()) c.bench.scenes = f.scenes;
  if (o.array && o.array->count()) c.bench.scene.array = parse_array_kind(f.array);
  if (o.beamformer && o.beamformer->count()) c.beamform.beamformer = f.beamformer;
  if (o.window_ms && o.window_ms->count()) c.beamform.window_ms = f.window_ms;
  if (o.groups && o.groups->count()) c.beamform.groups = f.groups;
  if (o.beta && o.beta->count()) c.beamform.beta = f.beta;
  if (o.eps && o.eps->count()) c.beamform.eps = c.bench.eps = f.eps;
  if (o.transform && o.transform->count())
    c.beamform.transform = c.bench.transform = parse_transform_kind(f.transform);
  c.bench.seed = c.seed;
  c.bench.scene.validate();
  validate(c.beamform);
  detail::require(c.bench.scenes >= 1, "--scenes must be >= 1");
  return c;
}

fs::path prepare_out(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw IoError("cannot create output directory '" + p.string() + "': " + ec.message());
  return p;
}

std::string scene_dir_name(long i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "scene_%03ld", i);
  return buf;
}

int cmd_simulate(const Flags& f, const Options& o) {
  const RunConfig c = resolve(f, o);
  const fs::path out = prepare_out(f.out);
  json scenes = json::array();
  for (long i = 0; i < c.bench.scenes; ++i) {
    const SceneInstance scene = sample_scene(c.bench.scene, derive_seed(c.seed, static_cast<uint64_t>(i)));
    const SceneSignals sig = synthesize_mixture(scene, synthetic_scene_sources(scene));
    const fs::path dir = prepare_out((out / scene_dir_name(i)).string());
    json files = json::object();
    wav::write(dir / "mixture.wav", sig.mixture);
    files["mixture"] = (fs::path(scene_dir_name(i)) / "mixture.wav").generic_string();
    for (size_t s = 0; s < sig.reverberant.size(); ++s) {
      const std::string rev = "reverberant_s" + std::to_string(s) + ".wav";
      const std::string dir_name = "direct_s" + std::to_string(s) + ".wav";
      wav::write(dir / rev, sig.reverberant[s]);
      wav::write(dir / dir_name, sig.direct[s]);
      files["reverberant"].push_back((fs::path(scene_dir_name(i)) / rev).generic_string());
      files["direct"].push_back((fs::path(scene_dir_name(i)) / dir_name).generic_string());
    }
    wav::write(dir / "noise.wav", sig.noise_image);
    files["noise"] = (fs::path(scene_dir_name(i)) / "noise.wav").generic_string();
    json m = scene_manifest(scene);
    m["index"] = i;
    m["onsets"] = sig.onsets;
    m["speaker_gain_db"] = sig.speaker_gain_db;
    m["noise_gain"] = sig.noise_gain;
    m["files"] = files;
    scenes.push_back(m);
    std::cout << scene_dir_name(i) << ": " << scene.array.num_mics() << " mics, room "
              << scene.room.length << " x " << scene.room.width << " x " << scene.room.height
              << " m, T60 " << scene.room.t60 << " s\n";
  }
  json manifest{{"command", "simulate"}, {"config", to_json(c)}, {"scenes", scenes}};
  write_text_file(out / "manifest.json", manifest.dump(2) + "\n");
  return 0;
}

int cmd_oracle_bench(const Flags& f, const Options& o) {
  const RunConfig c = resolve(f, o);
  const fs::path out = prepare_out(f.out);
  json scenes = json::array();
  const BenchResult res = run_oracle_bench(c.bench, [&](long i, const SceneInstance& s, const SceneSignals&) {
    json m = scene_manifest(s);
    m["index"] = i;
    scenes.push_back(m);
    std::cerr << "scene " << i + 1 << "/" << c.bench.scenes << "\n";
  });
  write_text_file(out / "oracle_bench.csv", bench_csv(res.summary));
  write_text_file(out / "oracle_bench.md", bench_markdown(res.summary));
  json manifest{{"command", "oracle-bench"}, {"config", to_json(c)}, {"scenes", scenes}};
  write_text_file(out / "manifest.json", manifest.dump(2) + "\n");
  std::cout << bench_markdown(res.summary);

  bool ok = true;
  for (const auto& t : check_trends(res.summary)) {
    std::cout << (t.passed ? "PASS " : "FAIL ") << t.name << ": " << t.detail << "\n";
    ok = ok && t.passed;
  }
  if (f.assert_trends && !ok) {
    std::cerr << "error: trend assertion failed\n";
    return 1;
  }
  return 0;
}

int cmd_beamform(const Flags& f, const Options& o) {
  const RunConfig c = resolve(f, o);
  const BeamformSettings& b = c.beamform;
  const MultiChannelWaveform mix = wav::read(f.mixture);
  const MultiChannelWaveform est = wav::read(f.estimate);
  if (mix.length() != est.length()) {
    throw InvalidArgument("mixture '" + f.mixture + "' has " + std::to_string(mix.length()) +
                          " samples but estimate '" + f.estimate + "' has " +
                          std::to_string(est.length()));
  }
  if (mix.sample_rate != est.sample_rate) {
    throw InvalidArgument("mixture and estimate sample rates differ");
  }
  const long p = window_samples(b.window_ms, mix.sample_rate);
  MultiChannelWaveform y;
  if (b.beamformer == "td_gwf") {
    detail::require(p <= mix.length(), "window of " + std::to_string(p) +
                                           " samples exceeds the signal length");
    TdGwfConfig td{make_transform(b.transform, p, c.seed, b.householder_reflections), b.groups, b.eps, 0};
    y = td_gwf(mix, est, td);
  } else if (b.beamformer == "fd_mcwf") {
    y = fd_mcwf_beamform(mix, est, p, b.eps);
  } else {
    if (est.channels() != mix.channels()) {
      throw InvalidArgument("fd_pmwf needs an estimate with one channel per microphone: mixture has " +
                            std::to_string(mix.channels()) + " channels, estimate has " +
                            std::to_string(est.channels()));
    }
    const MultiChannelWaveform interference(mix.samples - est.samples, mix.sample_rate);
    y = fd_pmwf_beamform(mix, est, interference, {b.beta, 0}, p, b.eps);
  }
  const fs::path out = prepare_out(f.out);
  wav::write(out / "beamformed.wav", y);
  json manifest{{"command", "beamform"},
                {"config", to_json(c)},
                {"mixture", f.mixture},
                {"estimate", f.estimate},
                {"output", "beamformed.wav"}};
  write_text_file(out / "manifest.json", manifest.dump(2) + "\n");
  std::cout << "wrote " << (out / "beamformed.wav").string() << " (" << y.channels() << " ch, "
            << y.length() << " samples)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-domain grouped Wiener filter toolkit"};
  app.require_subcommand(1);
  Flags f;

  Options sim_opt, bench_opt, bf_opt;
  CLI::App* sim = app.add_subcommand("simulate", "Sample scenes and write mixture and target WAVs");
  add_common(sim, f, sim_opt);
  sim_opt.scenes = sim->add_option("--scenes", f.scenes, "Number of scenes");
  sim_opt.array = sim->add_option("--array", f.array, "circular or adhoc")
                      ->check(CLI::IsMember({"circular", "adhoc"}));

  CLI::App* bench = app.add_subcommand("oracle-bench", "Oracle beamformer benchmark");
  add_common(bench, f, bench_opt);
  bench_opt.scenes = bench->add_option("--scenes", f.scenes, "Number of scenes");
  bench_opt.array = bench->add_option("--array", f.array, "circular or adhoc")
                        ->check(CLI::IsMember({"circular", "adhoc"}));
  bench_opt.eps = bench->add_option("--eps", f.eps, "Diagonal loading");
  bench_opt.transform = bench->add_option("--transform", f.transform, "identity, householder or unconstrained");
  bench->add_flag("--assert-trends", f.assert_trends, "Exit nonzero if an expected ordering fails");

  CLI::App* bf = app.add_subcommand("beamform", "Beamform a mixture WAV given estimate WAV(s)");
  add_common(bf, f, bf_opt);
  bf->add_option("--mixture", f.mixture, "Multichannel mixture WAV")->required();
  bf->add_option("--estimate", f.estimate, "Estimate WAV, one row per source")->required();
  bf_opt.beamformer = bf->add_option("--beamformer", f.beamformer, "td_gwf, fd_mcwf or fd_pmwf")
                          ->check(CLI::IsMember({"td_gwf", "fd_mcwf", "fd_pmwf"}));
  bf_opt.window_ms = bf->add_option("--window-ms", f.window_ms, "Window length in ms");
  bf_opt.groups = bf->add_option("--groups", f.groups, "Number of TD-GWF groups V");
  bf_opt.beta = bf->add_option("--beta", f.beta, "FD-PMWF trade-off");
  bf_opt.eps = bf->add_option("--eps", f.eps, "Diagonal loading");
  bf_opt.transform = bf->add_option("--transform", f.transform, "identity, householder or unconstrained");

  CLI11_PARSE(app, argc, argv);
  try {
    if (sim->parsed()) return cmd_simulate(f, sim_opt);
    if (bench->parsed()) return cmd_oracle_bench(f, bench_opt);
    return cmd_beamform(f, bf_opt);
  } catch (const tdgwf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
