#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tssynth/core.hpp"
#include "tssynth/loss.hpp"
#include "tssynth/matrix_profile.hpp"

namespace tssynth {

enum class InitMode { kNoise, kSmoothedNoise };

std::string_view to_string(InitMode mode);
InitMode parse_init_mode(std::string_view name);

struct AdamParams {
  double step_size = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct SynthesisConfig {
  std::size_t m = 50;
  /// Defaults to ceil(m / 4) when unset.
  std::optional<std::size_t> exclusion_radius;
  /// The decorrelation term lives in [0, 1] while the distance term scales
  /// with m, so the driver upweights it by default.
  LossWeights weights{10.0, 1.0, 1.0, 0.0};
  std::size_t iterations = 5000;
  std::size_t batch_size = 64;
  AdamParams adam;
  InitMode init = InitMode::kSmoothedNoise;
  /// Defaults to ceil(m / 4) when unset.
  std::optional<std::size_t> smoothing_width;
  std::uint64_t seed = 0;
  std::size_t checkpoint_every = 100;
  /// Consecutive non-improving checkpoints before stopping; 0 disables.
  std::size_t early_stop_patience = 0;

  WindowConfig window() const;
  std::size_t effective_smoothing_width() const;
  void validate(std::size_t n) const;
};

struct TraceRecord {
  std::size_t iteration = 0;
  double total = 0.0;
  LossComponents components;
  double median_abs_corr = 0.0;
  double mp_rmse = 0.0;
};

struct TrainingTrace {
  std::vector<TraceRecord> records;
};

struct SynthesisResult {
  TimeSeries synth;
  TrainingTrace trace;
};

/// Thrown when a checkpoint sees a non-finite loss. Carries the trace up to
/// and including the failing checkpoint.
class SynthesisAborted : public NumericalAbort {
 public:
  SynthesisAborted(const std::string& what, TrainingTrace partial)
      : NumericalAbort(what), trace_(std::move(partial)) {}
  const TrainingTrace& trace() const noexcept { return trace_; }

 private:
  TrainingTrace trace_;
};

/// Gaussian noise matching the original's sample mean and standard
/// deviation, optionally smoothed by a centered moving average and rescaled.
TimeSeries initialize(const TimeSeries& original, const SynthesisConfig& cfg);

/// First/second moment accumulators with bias correction.
class AdamOptimizer {
 public:
  AdamOptimizer(std::size_t size, AdamParams params);

  /// Takes one descent step on params.
  void step(std::vector<double>& params, std::span<const double> gradient);
  std::size_t steps_taken() const noexcept { return t_; }

 private:
  AdamParams params_;
  std::vector<double> m1_;
  std::vector<double> m2_;
  std::size_t t_ = 0;
};

/// Median of |pearson_corr| over every aligned window pair.
double median_abs_window_corr(const TimeSeries& a, const TimeSeries& b, const WindowConfig& cfg);

/// Root-mean-square difference between two profile distance vectors.
double mp_rmse(const MatrixProfile& a, const MatrixProfile& b);

/// Optimizes a substitute series against the frozen profile of the original.
SynthesisResult synthesize(const TimeSeries& original, const SynthesisConfig& cfg);

}  // namespace tssynth
