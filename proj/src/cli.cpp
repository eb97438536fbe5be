#include "tssynth/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>

#include "CLI11.hpp"

#include "tssynth/eval.hpp"
#include "tssynth/io.hpp"
#include "tssynth/matrix_profile.hpp"
#include "tssynth/synthesis.hpp"

namespace tssynth::cli {

namespace fs = std::filesystem;

namespace {

fs::path with_suffix(const std::string& prefix, const char* suffix) { return prefix + suffix; }

WindowConfig window_from(std::size_t m, std::optional<std::size_t> exclusion) {
  auto cfg = WindowConfig::with_default_exclusion(m);
  if (exclusion) cfg.exclusion_radius = *exclusion;
  return cfg;
}

struct MpArgs {
  std::string input;
  std::size_t m = 0;
  std::optional<std::size_t> exclusion;
  std::string out;
};

int cmd_mp(const MpArgs& a, std::ostream& out) {
  const auto series = io::read_series(a.input);
  const auto cfg = window_from(a.m, a.exclusion);
  const auto mp = mp_fast(series, cfg);
  const auto path = with_suffix(a.out, ".mp.csv");
  io::write_profile(path, mp);
  out << "wrote " << mp.size() << " rows to " << path.string() << '\n';
  return kOk;
}

struct SynthArgs {
  std::string input;
  std::string config;
  std::string out;
  std::size_t m = 0;
  std::size_t exclusion = 0;
  std::size_t iters = 0;
  std::size_t batch = 0;
  double step_size = 0.0;
  double w_local = 0.0;
  double w_distance = 0.0;
  double w_identity = 0.0;
  double margin = 0.0;
  std::string init;
  std::uint64_t seed = 0;
  std::size_t checkpoint_every = 0;
  std::size_t patience = 0;
  std::size_t smoothing_width = 0;
};

// Defaults, then the config file (a config object or a run manifest), then flags.
SynthesisConfig resolve_config(const SynthArgs& a, const CLI::App& app,
                               std::optional<io::RunManifest>& manifest) {
  SynthesisConfig cfg;
  if (!a.config.empty()) {
    const auto j = io::read_json(a.config);
    if (j.contains("config") && j.contains("input")) {
      manifest = io::manifest_from_json(j);
      cfg = manifest->config;
    } else {
      cfg = io::apply_json(cfg, j);
    }
  }
  auto given = [&](const char* flag) { return app.count(flag) > 0; };
  if (given("--window")) cfg.m = a.m;
  if (given("--exclusion")) cfg.exclusion_radius = a.exclusion;
  if (given("--iters")) cfg.iterations = a.iters;
  if (given("--batch")) cfg.batch_size = a.batch;
  if (given("--step-size")) cfg.adam.step_size = a.step_size;
  if (given("--w-local")) cfg.weights.local = a.w_local;
  if (given("--w-distance")) cfg.weights.distance = a.w_distance;
  if (given("--w-identity")) cfg.weights.identity = a.w_identity;
  if (given("--margin")) cfg.weights.identity_margin = a.margin;
  if (given("--init")) cfg.init = parse_init_mode(a.init);
  if (given("--seed")) cfg.seed = a.seed;
  if (given("--checkpoint-every")) cfg.checkpoint_every = a.checkpoint_every;
  if (given("--patience")) cfg.early_stop_patience = a.patience;
  if (given("--smoothing-width")) cfg.smoothing_width = a.smoothing_width;
  return cfg;
}

int cmd_synth(const SynthArgs& a, const CLI::App& app, std::ostream& out, std::ostream& err) {
  std::optional<io::RunManifest> previous;
  const auto cfg = resolve_config(a, app, previous);

  std::string input = a.input;
  if (input.empty()) {
    if (!previous) throw InvalidInput("an input series is required unless --config is a manifest");
    input = previous->input_path;
  }
  const auto series = io::read_series(input);

  io::RunManifest manifest;
  manifest.config = cfg;
  manifest.input_path = fs::absolute(input).string();
  manifest.input_sha256 = io::sha256_file(input);
  manifest.input_length = series.size();
  manifest.started_at = io::utc_timestamp();
  if (previous && previous->input_sha256 != manifest.input_sha256) {
    err << "warning: input checksum differs from the manifest being replayed\n";
  }

  const auto trace_path = with_suffix(a.out, ".trace.csv");
  const auto manifest_path = with_suffix(a.out, ".manifest.json");
  try {
    const auto result = synthesize(series, cfg);
    io::write_series(with_suffix(a.out, ".synth.csv"), result.synth);
    io::write_trace(trace_path, result.trace);
    manifest.status = "ok";
    manifest.finished_at = io::utc_timestamp();
    io::write_json(manifest_path, io::to_json(manifest));
    if (!result.trace.records.empty()) {
      const auto& last = result.trace.records.back();
      out << "iteration " << last.iteration << ": loss " << last.total << ", median |corr| "
          << last.median_abs_corr << ", mp rmse " << last.mp_rmse << '\n';
    }
    out << "wrote " << a.out << ".{synth.csv,trace.csv,manifest.json}\n";
    return kOk;
  } catch (const SynthesisAborted& e) {
    io::write_trace(trace_path, e.trace());
    manifest.status = "aborted";
    manifest.finished_at = io::utc_timestamp();
    io::write_json(manifest_path, io::to_json(manifest));
    err << "error: " << e.what() << '\n';
    return kNumericalAbort;
  }
}

struct EvalArgs {
  std::string original;
  std::string synth;
  std::size_t m = 0;
  std::optional<std::size_t> exclusion;
  std::string labels;
  std::size_t discords = kDefaultDiscordCount;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const auto original = io::read_series(a.original);
  const auto synth = io::read_series(a.synth);
  const auto cfg = window_from(a.m, a.exclusion);
  const auto report =
      a.labels.empty()
          ? evaluate(original, synth, cfg, a.discords)
          : evaluate_with_labels(original, synth, io::read_labels(a.labels), cfg, a.discords);
  out << io::to_json(report).dump(2) << '\n';
  return kOk;
}

struct PlantArgs {
  std::size_t n = 2000;
  std::size_t m = 50;
  std::size_t anomalies = 1;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_plant(const PlantArgs& a, std::ostream& out) {
  const auto data = make_planted_dataset(a.n, a.m, a.anomalies, a.seed);
  io::write_series(with_suffix(a.out, ".csv"), data.series);
  io::write_labels(with_suffix(a.out, ".labels.csv"), data.anomaly_mask);
  out << "wrote " << a.out << ".csv and " << a.out << ".labels.csv\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Matrix-profile-preserving time series anonymization", io::kToolName};
  app.require_subcommand(1);
  app.set_version_flag("--version", io::kToolVersion);

  MpArgs mp_args;
  auto* mp = app.add_subcommand("mp", "Compute the matrix profile and index of a series");
  mp->add_option("input", mp_args.input, "Series file")->required();
  mp->add_option("-m,--window", mp_args.m, "Window length")->required();
  mp->add_option("--exclusion", mp_args.exclusion, "Exclusion radius (default ceil(m/4))");
  mp->add_option("--out", mp_args.out, "Output prefix")->required();

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Synthesize a decorrelated, profile-preserving series");
  synth->add_option("input", sa.input, "Series file (optional when --config is a manifest)");
  synth->add_option("--config", sa.config, "JSON config or run manifest");
  synth->add_option("--out", sa.out, "Output prefix")->required();
  synth->add_option("-m,--window", sa.m, "Window length");
  synth->add_option("--exclusion", sa.exclusion, "Exclusion radius");
  synth->add_option("--iters", sa.iters, "Optimizer iterations");
  synth->add_option("--batch", sa.batch, "Triples per iteration");
  synth->add_option("--step-size", sa.step_size, "Optimizer step size");
  synth->add_option("--w-local", sa.w_local, "Weight of the decorrelation term");
  synth->add_option("--w-distance", sa.w_distance, "Weight of the distance term");
  synth->add_option("--w-identity", sa.w_identity, "Weight of the identity term");
  synth->add_option("--margin", sa.margin, "Identity hinge margin");
  synth->add_option("--init", sa.init, "Initialization")->check(CLI::IsMember({"noise", "smooth"}));
  synth->add_option("--seed", sa.seed, "RNG seed");
  synth->add_option("--checkpoint-every", sa.checkpoint_every, "Checkpoint interval");
  synth->add_option("--patience", sa.patience, "Early-stop patience in checkpoints (0 = off)");
  synth->add_option("--smoothing-width", sa.smoothing_width,
                    "Moving-average width for smooth init");

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Report anonymity and utility metrics as JSON");
  eval->add_option("original", ea.original, "Original series file")->required();
  eval->add_option("synth", ea.synth, "Synthesized series file")->required();
  eval->add_option("-m,--window", ea.m, "Window length")->required();
  eval->add_option("--exclusion", ea.exclusion, "Exclusion radius (default ceil(m/4))");
  eval->add_option("--labels", ea.labels, "Per-timestep 0/1 anomaly labels");
  eval->add_option("--discords", ea.discords, "Discords compared for overlap");

  PlantArgs pa;
  auto* plant = app.add_subcommand("plant", "Write a noisy sine with planted anomalies");
  plant->add_option("-n,--length", pa.n, "Series length");
  plant->add_option("-m,--window", pa.m, "Window length (sine period is 2m)");
  plant->add_option("--anomalies", pa.anomalies, "Number of planted anomalies");
  plant->add_option("--seed", pa.seed, "RNG seed");
  plant->add_option("--out", pa.out, "Output prefix")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidInput;
  }

  try {
    if (mp->parsed()) return cmd_mp(mp_args, out);
    if (synth->parsed()) return cmd_synth(sa, *synth, out, err);
    if (eval->parsed()) return cmd_eval(ea, out);
    if (plant->parsed()) return cmd_plant(pa, out);
  } catch (const NumericalAbort& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalAbort;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }
  return kInvalidInput;
}

}  // namespace tssynth::cli
