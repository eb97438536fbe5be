#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tssynth/core.hpp"
#include "tssynth/eval.hpp"
#include "tssynth/matrix_profile.hpp"
#include "tssynth/synthesis.hpp"

namespace tssynth::io {

inline constexpr const char* kToolName = "tssynth";
inline constexpr const char* kToolVersion = "0.1.0";

/// Reads one value per line, or a single-column CSV whose first line may be
/// a header. Blank lines are ignored.
TimeSeries read_series(const std::filesystem::path& path);

/// Labels file: one 0/1 (or true/false) per line, optional header.
std::vector<bool> read_labels(const std::filesystem::path& path);

void write_series(const std::filesystem::path& path, const TimeSeries& series);
void write_labels(const std::filesystem::path& path, const std::vector<bool>& labels);

/// `distance,index` header, one row per window.
void write_profile(const std::filesystem::path& path, const MatrixProfile& mp);
MatrixProfile read_profile(const std::filesystem::path& path, std::size_t m,
                           std::size_t exclusion_radius);

void write_trace(const std::filesystem::path& path, const TrainingTrace& trace);
TrainingTrace read_trace(const std::filesystem::path& path);

/// Shortest text that parses back to exactly `value`, at most 17 digits.
std::string format_double(double value);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

nlohmann::json to_json(const SynthesisConfig& cfg);
/// Overlays the keys present in `j` onto `base`; unknown keys are rejected.
SynthesisConfig apply_json(SynthesisConfig base, const nlohmann::json& j);

nlohmann::json to_json(const EvalReport& report);

struct RunManifest {
  SynthesisConfig config;
  std::string input_path;
  std::string input_sha256;
  std::size_t input_length = 0;
  std::string started_at;
  std::string finished_at;
  std::string status;
};

nlohmann::json to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::json& j);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Current UTC time as ISO-8601.
std::string utc_timestamp();

}  // namespace tssynth::io
