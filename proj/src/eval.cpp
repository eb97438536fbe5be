#include "tssynth/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "tssynth/synthesis.hpp"

namespace tssynth {

namespace {

void require_same_length(const TimeSeries& a, const TimeSeries& b) {
  if (a.size() != b.size()) {
    throw InvalidInput("series differ in length: " + std::to_string(a.size()) + " vs " +
                       std::to_string(b.size()));
  }
}

std::size_t distance(std::size_t a, std::size_t b) { return a > b ? a - b : b - a; }

constexpr double kNoiseLevel = 0.05;

enum class Distortion { kSpike, kDropout, kFrequencyShift };

}  // namespace

double mpi_agreement(const MatrixProfile& a, const MatrixProfile& b) {
  if (a.size() != b.size() || a.size() == 0) throw InvalidInput("profiles differ in length");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (distance(a.indices[i], b.indices[i]) <= a.exclusion_radius) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(a.size());
}

double discord_overlap(const MatrixProfile& a, const MatrixProfile& b, std::size_t k,
                       std::size_t radius) {
  const auto ours = discord_topk(a, k);
  auto theirs = discord_topk(b, k);
  std::size_t matched = 0;
  for (std::size_t d : ours) {
    auto it = std::find_if(theirs.begin(), theirs.end(),
                           [&](std::size_t e) { return distance(d, e) <= radius; });
    if (it != theirs.end()) {
      ++matched;
      theirs.erase(it);
    }
  }
  return static_cast<double>(matched) / static_cast<double>(ours.size());
}

EvalReport evaluate(const TimeSeries& original, const TimeSeries& synth, const WindowConfig& cfg,
                    std::size_t discord_count) {
  require_same_length(original, synth);
  require_profile_feasible(original.size(), cfg);

  EvalReport report;
  report.global_corr = pearson_corr(original.values(), synth.values(), cfg.variance_epsilon);

  const std::size_t windows = original.window_count(cfg.m);
  std::vector<double> corr(windows);
  for (std::size_t i = 0; i < windows; ++i) {
    corr[i] = std::abs(
        pearson_corr(original.window(i, cfg.m), synth.window(i, cfg.m), cfg.variance_epsilon));
  }
  report.subseq_corr.mean = std::accumulate(corr.begin(), corr.end(), 0.0) / windows;
  report.subseq_corr.max = *std::max_element(corr.begin(), corr.end());
  report.subseq_corr.median = median_abs_window_corr(original, synth, cfg);

  const auto mp_orig = mp_fast(original, cfg);
  const auto mp_synth = mp_fast(synth, cfg);
  report.mp_rmse = mp_rmse(mp_orig, mp_synth);
  report.mpi_agreement = mpi_agreement(mp_orig, mp_synth);
  report.discord_overlap =
      discord_overlap(mp_orig, mp_synth, std::min(discord_count, windows), cfg.m);
  return report;
}

EvalReport evaluate_with_labels(const TimeSeries& original, const TimeSeries& synth,
                                const std::vector<bool>& labels, const WindowConfig& cfg,
                                std::size_t discord_count) {
  auto report = evaluate(original, synth, cfg, discord_count);
  report.auc_original = auc(mp_anomaly_score(original, cfg), labels);
  report.auc_synth = auc(mp_anomaly_score(synth, cfg), labels);
  return report;
}

std::vector<double> mp_anomaly_score(const MatrixProfile& mp, std::size_t n) {
  if (mp.size() + mp.m != n + 1) throw InvalidInput("profile does not match series length");
  std::vector<double> score(n, 0.0);
  for (std::size_t i = 0; i < mp.size(); ++i) {
    for (std::size_t t = i; t < i + mp.m; ++t) score[t] = std::max(score[t], mp.distances[i]);
  }
  return score;
}

std::vector<double> mp_anomaly_score(const TimeSeries& series, const WindowConfig& cfg) {
  return mp_anomaly_score(mp_fast(series, cfg), series.size());
}

double auc(std::span<const double> scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) throw InvalidInput("scores and labels differ in length");
  const auto positives =
      static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
  const std::size_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw InvalidInput("AUC needs at least one positive and one negative label");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of average (1-based) ranks of the positives.
  double rank_sum = 0.0;
  for (std::size_t lo = 0; lo < order.size();) {
    std::size_t hi = lo;
    while (hi + 1 < order.size() && scores[order[hi + 1]] == scores[order[lo]]) ++hi;
    const double avg_rank = 0.5 * static_cast<double>(lo + hi) + 1.0;
    for (std::size_t r = lo; r <= hi; ++r) {
      if (labels[order[r]]) rank_sum += avg_rank;
    }
    lo = hi + 1;
  }
  const double p = static_cast<double>(positives);
  const double q = static_cast<double>(negatives);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * q);
}

LabeledSeries make_planted_dataset(std::size_t n, std::size_t m, std::size_t anomaly_count,
                                   std::uint64_t seed) {
  if (m < kMinWindow) throw InvalidInput("window must be at least 3");
  // Each anomaly gets its own segment of at least 4m samples so spans never touch.
  const std::size_t segment = anomaly_count == 0 ? n : n / anomaly_count;
  if (n < 4 * m || (anomaly_count > 0 && segment < 4 * m)) {
    throw InvalidInput("cannot place " + std::to_string(anomaly_count) +
                       " anomalies of width " + std::to_string(m) + " in " + std::to_string(n) +
                       " samples");
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, kNoiseLevel);
  const double period = 2.0 * static_cast<double>(m);
  const double omega = 2.0 * std::numbers::pi / period;

  std::vector<double> x(n);
  for (std::size_t t = 0; t < n; ++t) x[t] = std::sin(omega * static_cast<double>(t));

  // Distortion kinds cycle from a seeded offset and carry randomized
  // parameters, so no two anomalies are each other's nearest neighbor.
  const int first_kind = std::uniform_int_distribution<int>(0, 2)(rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<bool> mask(n, false);
  for (std::size_t a = 0; a < anomaly_count; ++a) {
    // Start somewhere in the middle of the segment, at least m from its edges.
    const std::size_t lo = a * segment + m;
    const std::size_t hi = (a + 1) * segment - 2 * m;
    const std::size_t start = std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    const auto kind = static_cast<Distortion>((first_kind + static_cast<int>(a)) % 3);
    const double md = static_cast<double>(m);

    const double center = static_cast<double>(start) + md * (0.3 + 0.4 * unit(rng));
    const double height = 2.0 + unit(rng);
    const double width = std::max(1.0, md * (0.05 + 0.05 * unit(rng)));
    const std::size_t drop_from = start + m / 4 + static_cast<std::size_t>(unit(rng) * md / 4.0);
    const std::size_t drop_to = drop_from + m / 3;
    const double level = 0.5 * (2.0 * unit(rng) - 1.0);
    const double factor = 2.0 + unit(rng);

    for (std::size_t t = start; t < start + m; ++t) {
      const double td = static_cast<double>(t);
      switch (kind) {
        case Distortion::kSpike:
          x[t] += height * std::exp(-0.5 * std::pow((td - center) / width, 2.0));
          break;
        case Distortion::kDropout:
          if (t >= drop_from && t < drop_to) x[t] = level;
          break;
        case Distortion::kFrequencyShift:
          x[t] = std::sin(omega * static_cast<double>(start) +
                          factor * omega * static_cast<double>(t - start));
          break;
      }
      mask[t] = true;
    }
  }
  for (double& v : x) v += noise(rng);
  return {TimeSeries(std::move(x)), std::move(mask)};
}

}  // namespace tssynth
