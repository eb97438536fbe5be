#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tssynth/core.hpp"
#include "tssynth/matrix_profile.hpp"

namespace tssynth {

struct CorrelationStats {
  double median = 0.0;
  double mean = 0.0;
  double max = 0.0;
};

/// Anonymity (decorrelation) and utility (profile preservation) of a
/// synthesized series relative to its original.
struct EvalReport {
  double global_corr = 0.0;
  CorrelationStats subseq_corr;  // over |per-window correlation|
  double mp_rmse = 0.0;
  double mpi_agreement = 0.0;
  double discord_overlap = 0.0;
  std::optional<double> auc_original;
  std::optional<double> auc_synth;
};

struct LabeledSeries {
  TimeSeries series;
  std::vector<bool> anomaly_mask;
};

inline constexpr std::size_t kDefaultDiscordCount = 3;

EvalReport evaluate(const TimeSeries& original, const TimeSeries& synth, const WindowConfig& cfg,
                    std::size_t discord_count = kDefaultDiscordCount);

/// evaluate() plus MP-detector AUC on both series against shared labels.
EvalReport evaluate_with_labels(const TimeSeries& original, const TimeSeries& synth,
                                const std::vector<bool>& labels, const WindowConfig& cfg,
                                std::size_t discord_count = kDefaultDiscordCount);

/// Fraction of positions whose nearest-neighbor indices agree within the
/// exclusion radius.
double mpi_agreement(const MatrixProfile& a, const MatrixProfile& b);

/// Fraction of a's top-k discords matched one-to-one by a discord of b no
/// more than `radius` samples away.
double discord_overlap(const MatrixProfile& a, const MatrixProfile& b, std::size_t k,
                       std::size_t radius);

/// Per-timestep anomaly score: the largest profile distance among windows
/// covering the timestep.
std::vector<double> mp_anomaly_score(const TimeSeries& series, const WindowConfig& cfg);
std::vector<double> mp_anomaly_score(const MatrixProfile& mp, std::size_t n);

/// ROC AUC via the Mann-Whitney rank statistic; tied scores count one half.
double auc(std::span<const double> scores, const std::vector<bool>& labels);

/// Noisy sine (period 2m) with anomaly_count windows replaced by a spike,
/// a dropout or a frequency shift. The mask marks the replaced spans.
LabeledSeries make_planted_dataset(std::size_t n, std::size_t m, std::size_t anomaly_count,
                                   std::uint64_t seed);

}  // namespace tssynth
