#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "tssynth/core.hpp"
#include "tssynth/matrix_profile.hpp"

namespace tssynth {

/// Anchor i, its nearest neighbor j in the original series, and a negative k.
struct LossTriple {
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t k = 0;

  bool operator==(const LossTriple&) const = default;
};

struct LossWeights {
  double local = 1.0;
  double distance = 1.0;
  double identity = 1.0;
  /// Added inside the identity hinge; 0 gives the plain ReLU ordering loss.
  double identity_margin = 0.0;

  void validate() const;
};

struct LossComponents {
  double local = 0.0;
  double distance = 0.0;
  double identity = 0.0;
};

struct BatchLoss {
  double total = 0.0;
  LossComponents components;
};

/// d(loss)/d(synth[t]) for every timestep t.
using GradientBuffer = std::vector<double>;

/// Squared Pearson correlation between the aligned windows at i.
double loss_local(const TimeSeries& original, const TimeSeries& synth, std::size_t i,
                  const WindowConfig& cfg);

/// (Dist(orig_i, orig_j) - Dist(synth_i, synth_j))^2.
double loss_distance(const TimeSeries& original, const TimeSeries& synth, std::size_t i,
                     std::size_t j, const WindowConfig& cfg);

/// max(0, Dist(synth_i, synth_j) - Dist(synth_i, synth_k) + margin).
double loss_identity(const TimeSeries& synth, const LossTriple& triple, const WindowConfig& cfg,
                     double margin);

/// Weighted sum of the per-term means over the batch.
BatchLoss batch_loss(const TimeSeries& original, const TimeSeries& synth,
                     std::span<const LossTriple> triples, const LossWeights& weights,
                     const WindowConfig& cfg);

/// Analytic gradient of batch_loss with respect to synth. Triples are
/// evaluated in parallel and reduced in batch order, so the result does not
/// depend on the thread count.
GradientBuffer batch_gradient(const TimeSeries& original, const TimeSeries& synth,
                              std::span<const LossTriple> triples, const LossWeights& weights,
                              const WindowConfig& cfg);

/// Loss and gradient in one pass over the batch.
BatchLoss batch_loss_and_gradient(const TimeSeries& original, const TimeSeries& synth,
                                  std::span<const LossTriple> triples, const LossWeights& weights,
                                  const WindowConfig& cfg, GradientBuffer& gradient);

/// Draws batch_size triples: i uniform over all windows, j = mp.indices[i],
/// k uniform over windows outside the exclusion bands of both i and j.
std::vector<LossTriple> sample_triples(const MatrixProfile& mp, std::size_t batch_size,
                                       std::mt19937_64& rng);

/// One triple anchored at i, or nullopt when i has no admissible negative.
std::optional<LossTriple> sample_triple_at(const MatrixProfile& mp, std::size_t i,
                                          std::mt19937_64& rng);

/// Number of admissible negatives for anchor i.
std::size_t admissible_negative_count(const MatrixProfile& mp, std::size_t i);

}  // namespace tssynth
