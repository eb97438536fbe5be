#include "tssynth/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

namespace tssynth::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view text, double& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InvalidInput("cannot open " + path.string() + " for writing");
  return out;
}

// Non-blank trimmed lines with their 1-based line numbers.
std::vector<std::pair<std::size_t, std::string>> data_lines(const fs::path& path) {
  auto in = open_in(path);
  std::vector<std::pair<std::size_t, std::string>> lines;
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    const auto t = trim(line);
    if (!t.empty()) lines.emplace_back(no, std::string(t));
  }
  return lines;
}

InvalidInput parse_error(const fs::path& path, std::size_t line, const std::string& what) {
  return InvalidInput(path.string() + ":" + std::to_string(line) + ": " + what);
}

template <typename Parse>
auto read_column(const fs::path& path, Parse parse) {
  const auto lines = data_lines(path);
  std::vector<typename decltype(parse(std::string_view{}))::value_type> values;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const auto& [no, text] = lines[n];
    if (text.find(',') != std::string::npos) {
      throw parse_error(path, no, "expected a single column");
    }
    auto v = parse(text);
    if (!v) {
      if (n == 0) continue;  // header
      throw parse_error(path, no, "cannot parse '" + text + "'");
    }
    values.push_back(*v);
  }
  return values;
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw InvalidInput("cannot format value");
  return std::string(buf.data(), ptr);
}

TimeSeries read_series(const fs::path& path) {
  auto values = read_column(path, [](std::string_view t) -> std::optional<double> {
    double v = 0.0;
    if (!parse_double(t, v)) return std::nullopt;
    return v;
  });
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidInput(path.string() + ": non-finite sample");
  }
  if (values.size() < 2) {
    throw InvalidInput(path.string() + ": need at least 2 samples, found " +
                       std::to_string(values.size()));
  }
  return TimeSeries(std::move(values));
}

std::vector<bool> read_labels(const fs::path& path) {
  const auto raw = read_column(path, [](std::string_view t) -> std::optional<bool> {
    if (t == "1" || t == "true") return true;
    if (t == "0" || t == "false") return false;
    return std::nullopt;
  });
  return std::vector<bool>(raw.begin(), raw.end());
}

void write_series(const fs::path& path, const TimeSeries& series) {
  auto out = open_out(path);
  for (double v : series.values()) out << format_double(v) << '\n';
}

void write_labels(const fs::path& path, const std::vector<bool>& labels) {
  auto out = open_out(path);
  for (bool b : labels) out << (b ? '1' : '0') << '\n';
}

void write_profile(const fs::path& path, const MatrixProfile& mp) {
  auto out = open_out(path);
  out << "distance,index\n";
  for (std::size_t i = 0; i < mp.size(); ++i) {
    out << format_double(mp.distances[i]) << ',' << mp.indices[i] << '\n';
  }
}

MatrixProfile read_profile(const fs::path& path, std::size_t m, std::size_t exclusion_radius) {
  MatrixProfile mp;
  mp.m = m;
  mp.exclusion_radius = exclusion_radius;
  const auto lines = data_lines(path);
  for (std::size_t n = 1; n < lines.size(); ++n) {
    const auto& [no, text] = lines[n];
    const auto comma = text.find(',');
    double d = 0.0;
    std::size_t idx = 0;
    const std::string_view rest = std::string_view(text).substr(comma + 1);
    if (comma == std::string::npos || !parse_double(std::string_view(text).substr(0, comma), d) ||
        std::from_chars(rest.data(), rest.data() + rest.size(), idx).ec != std::errc{}) {
      throw parse_error(path, no, "expected 'distance,index'");
    }
    mp.distances.push_back(d);
    mp.indices.push_back(idx);
  }
  return mp;
}

void write_trace(const fs::path& path, const TrainingTrace& trace) {
  auto out = open_out(path);
  out << "iteration,total,local,distance,identity,median_abs_corr,mp_rmse\n";
  for (const auto& r : trace.records) {
    out << r.iteration << ',' << format_double(r.total) << ','
        << format_double(r.components.local) << ',' << format_double(r.components.distance)
        << ',' << format_double(r.components.identity) << ','
        << format_double(r.median_abs_corr) << ',' << format_double(r.mp_rmse) << '\n';
  }
}

TrainingTrace read_trace(const fs::path& path) {
  TrainingTrace trace;
  const auto lines = data_lines(path);
  for (std::size_t n = 1; n < lines.size(); ++n) {
    const auto& [no, text] = lines[n];
    std::vector<double> fields;
    std::string_view rest(text);
    while (true) {
      const auto comma = rest.find(',');
      double v = 0.0;
      if (!parse_double(rest.substr(0, comma), v)) throw parse_error(path, no, "bad trace row");
      fields.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 7) throw parse_error(path, no, "trace rows have 7 fields");
    trace.records.push_back({static_cast<std::size_t>(fields[0]), fields[1],
                             {fields[2], fields[3], fields[4]}, fields[5], fields[6]});
  }
  return trace;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path.string() + " for reading");

  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 initialization failed");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) {
      EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);

  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

json to_json(const SynthesisConfig& cfg) {
  return json{
      {"window", cfg.m},
      {"exclusion_radius", cfg.window().exclusion_radius},
      {"w_local", cfg.weights.local},
      {"w_distance", cfg.weights.distance},
      {"w_identity", cfg.weights.identity},
      {"margin", cfg.weights.identity_margin},
      {"iterations", cfg.iterations},
      {"batch_size", cfg.batch_size},
      {"step_size", cfg.adam.step_size},
      {"beta1", cfg.adam.beta1},
      {"beta2", cfg.adam.beta2},
      {"optimizer_epsilon", cfg.adam.epsilon},
      {"init", std::string(to_string(cfg.init))},
      {"smoothing_width", cfg.effective_smoothing_width()},
      {"seed", cfg.seed},
      {"checkpoint_every", cfg.checkpoint_every},
      {"early_stop_patience", cfg.early_stop_patience},
  };
}

SynthesisConfig apply_json(SynthesisConfig cfg, const json& j) {
  if (!j.is_object()) throw InvalidInput("configuration must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "window") cfg.m = value.get<std::size_t>();
      else if (key == "exclusion_radius") cfg.exclusion_radius = value.get<std::size_t>();
      else if (key == "w_local") cfg.weights.local = value.get<double>();
      else if (key == "w_distance") cfg.weights.distance = value.get<double>();
      else if (key == "w_identity") cfg.weights.identity = value.get<double>();
      else if (key == "margin") cfg.weights.identity_margin = value.get<double>();
      else if (key == "iterations") cfg.iterations = value.get<std::size_t>();
      else if (key == "batch_size") cfg.batch_size = value.get<std::size_t>();
      else if (key == "step_size") cfg.adam.step_size = value.get<double>();
      else if (key == "beta1") cfg.adam.beta1 = value.get<double>();
      else if (key == "beta2") cfg.adam.beta2 = value.get<double>();
      else if (key == "optimizer_epsilon") cfg.adam.epsilon = value.get<double>();
      else if (key == "init") cfg.init = parse_init_mode(value.get<std::string>());
      else if (key == "smoothing_width") cfg.smoothing_width = value.get<std::size_t>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "checkpoint_every") cfg.checkpoint_every = value.get<std::size_t>();
      else if (key == "early_stop_patience") cfg.early_stop_patience = value.get<std::size_t>();
      else throw InvalidInput("unknown configuration key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("bad configuration value: ") + e.what());
  }
  return cfg;
}

json to_json(const EvalReport& r) {
  json j{
      {"global_corr", r.global_corr},
      {"subseq_corr", {{"median", r.subseq_corr.median}, {"mean", r.subseq_corr.mean},
                       {"max", r.subseq_corr.max}}},
      {"mp_rmse", r.mp_rmse},
      {"mpi_agreement", r.mpi_agreement},
      {"discord_overlap", r.discord_overlap},
  };
  if (r.auc_original) j["auc_original"] = *r.auc_original;
  if (r.auc_synth) j["auc_synth"] = *r.auc_synth;
  return j;
}

json to_json(const RunManifest& m) {
  return json{
      {"tool", kToolName},
      {"version", kToolVersion},
      {"seed", m.config.seed},
      {"input", {{"path", m.input_path}, {"sha256", m.input_sha256}, {"length", m.input_length}}},
      {"config", to_json(m.config)},
      {"started_at", m.started_at},
      {"finished_at", m.finished_at},
      {"status", m.status},
  };
}

RunManifest manifest_from_json(const json& j) {
  try {
    RunManifest m;
    m.config = apply_json(SynthesisConfig{}, j.at("config"));
    const auto& input = j.at("input");
    m.input_path = input.at("path").get<std::string>();
    m.input_sha256 = input.at("sha256").get<std::string>();
    m.input_length = input.at("length").get<std::size_t>();
    m.started_at = j.value("started_at", "");
    m.finished_at = j.value("finished_at", "");
    m.status = j.value("status", "");
    return m;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed manifest: ") + e.what());
  }
}

json read_json(const fs::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace tssynth::io
