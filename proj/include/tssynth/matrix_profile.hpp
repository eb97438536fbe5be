#pragma once

#include <cstddef>
#include <vector>

#include "tssynth/core.hpp"

namespace tssynth {

/// Nearest-neighbor distance and location for every length-m window of a
/// series (self-join). indices[i] is never within exclusion_radius of i.
struct MatrixProfile {
  std::vector<double> distances;
  std::vector<std::size_t> indices;
  std::size_t m = 0;
  std::size_t exclusion_radius = 0;

  std::size_t size() const noexcept { return distances.size(); }
};

/// Throws unless every window of a length-n series has at least one
/// neighbor outside its exclusion band.
void require_profile_feasible(std::size_t n, const WindowConfig& cfg);

/// Serial reference: z-normalizes every window, then compares all admissible
/// pairs directly. Ties go to the smallest neighbor index. O(n^2 m).
MatrixProfile mp_brute_force(const TimeSeries& series, const WindowConfig& cfg);

/// Diagonal-wise similarity join with incrementally updated covariances,
/// parallelized over diagonals with OpenMP. Same contract as mp_brute_force.
MatrixProfile mp_fast(const TimeSeries& series, const WindowConfig& cfg);

/// Up to k discord starts, largest distance first, each pick suppressing
/// picks within mp.exclusion_radius of it. Ties go to the smaller index.
std::vector<std::size_t> discord_topk(const MatrixProfile& mp, std::size_t k);

}  // namespace tssynth
