#include "tssynth/matrix_profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <omp.h>

namespace tssynth {

namespace {

// Pairs closer than this (squared distance) are re-evaluated directly from
// the samples; the correlation route loses digits as r -> 1.
constexpr double kRefineSquaredDistance = 1e-3;
constexpr std::size_t kRefreshInterval = 1024;

struct Best {
  double distance = std::numeric_limits<double>::infinity();
  std::size_t index = std::numeric_limits<std::size_t>::max();

  void offer(double d, std::size_t k) noexcept {
    if (d < distance || (d == distance && k < index)) {
      distance = d;
      index = k;
    }
  }
};

MatrixProfile to_profile(const std::vector<Best>& best, const WindowConfig& cfg) {
  MatrixProfile mp;
  mp.m = cfg.m;
  mp.exclusion_radius = cfg.exclusion_radius;
  mp.distances.reserve(best.size());
  mp.indices.reserve(best.size());
  for (const auto& b : best) {
    mp.distances.push_back(b.distance);
    mp.indices.push_back(b.index);
  }
  return mp;
}

}  // namespace

void require_profile_feasible(std::size_t n, const WindowConfig& cfg) {
  cfg.validate(n);
  const std::size_t windows = n - cfg.m + 1;
  // The middle window needs a neighbor beyond its band on one side.
  if (windows < 2 * cfg.exclusion_radius + 2) {
    throw InvalidInput("series of length " + std::to_string(n) + " is too short for window " +
                       std::to_string(cfg.m) + " with exclusion radius " +
                       std::to_string(cfg.exclusion_radius));
  }
}

MatrixProfile mp_brute_force(const TimeSeries& series, const WindowConfig& cfg) {
  require_profile_feasible(series.size(), cfg);
  const std::size_t m = cfg.m;
  const std::size_t windows = series.window_count(m);

  std::vector<std::vector<double>> normalized;
  normalized.reserve(windows);
  for (std::size_t i = 0; i < windows; ++i) {
    normalized.push_back(z_normalize(series.window(i, m), cfg.variance_epsilon));
  }

  std::vector<Best> best(windows);
  for (std::size_t i = 0; i < windows; ++i) {
    for (std::size_t k = 0; k < windows; ++k) {
      const std::size_t gap = i > k ? i - k : k - i;
      if (gap <= cfg.exclusion_radius) continue;
      double ss = 0.0;
      for (std::size_t t = 0; t < m; ++t) {
        const double d = normalized[i][t] - normalized[k][t];
        ss += d * d;
      }
      best[i].offer(std::sqrt(ss), k);
    }
  }
  return to_profile(best, cfg);
}

MatrixProfile mp_fast(const TimeSeries& series, const WindowConfig& cfg) {
  require_profile_feasible(series.size(), cfg);
  const auto x = series.values();
  const std::size_t m = cfg.m;
  const std::size_t windows = series.window_count(m);
  const double md = static_cast<double>(m);

  std::vector<double> mu(windows), sigma(windows), inv_norm(windows);
  std::vector<char> flat(windows);
  for (std::size_t i = 0; i < windows; ++i) {
    const auto s = window_stats(x.subspan(i, m));
    mu[i] = s.mean;
    sigma[i] = s.stddev;
    flat[i] = s.stddev <= cfg.variance_epsilon;
    inv_norm[i] = flat[i] ? 0.0 : 1.0 / (s.stddev * std::sqrt(md));
  }

  // Centered-difference terms for the covariance recurrence
  // C(i, k) = C(i-1, k-1) + df[i] dg[k] + df[k] dg[i].
  std::vector<double> df(windows, 0.0), dg(windows, 0.0);
  for (std::size_t i = 1; i < windows; ++i) {
    df[i] = 0.5 * (x[i + m - 1] - x[i - 1]);
    dg[i] = (x[i + m - 1] - mu[i]) + (x[i - 1] - mu[i - 1]);
  }

  auto direct_cov = [&](std::size_t i, std::size_t k) {
    double c = 0.0;
    for (std::size_t t = 0; t < m; ++t) c += (x[i + t] - mu[i]) * (x[k + t] - mu[k]);
    return c;
  };
  auto direct_dist = [&](std::size_t i, std::size_t k) {
    double ss = 0.0;
    for (std::size_t t = 0; t < m; ++t) {
      const double d = (x[i + t] - mu[i]) / sigma[i] - (x[k + t] - mu[k]) / sigma[k];
      ss += d * d;
    }
    return std::sqrt(ss);
  };
  const double flat_vs_shape = std::sqrt(md);

  const std::size_t first_diag = cfg.exclusion_radius + 1;
  const int threads = omp_get_max_threads();
  std::vector<std::vector<Best>> partial(static_cast<std::size_t>(threads),
                                         std::vector<Best>(windows));

#pragma omp parallel num_threads(threads)
  {
    auto& best = partial[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(dynamic, 16)
    for (std::size_t diag = first_diag; diag < windows; ++diag) {
      double cov = 0.0;
      for (std::size_t i = 0, k = diag; k < windows; ++i, ++k) {
        if (i % kRefreshInterval == 0) {
          cov = direct_cov(i, k);
        } else {
          cov += df[i] * dg[k] + df[k] * dg[i];
        }

        double dist;
        if (flat[i] || flat[k]) {
          dist = (flat[i] && flat[k]) ? 0.0 : flat_vs_shape;
        } else {
          const double r = std::clamp(cov * inv_norm[i] * inv_norm[k], -1.0, 1.0);
          const double sq = 2.0 * md * (1.0 - r);
          dist = sq < kRefineSquaredDistance ? direct_dist(i, k) : std::sqrt(sq);
        }
        best[i].offer(dist, k);
        best[k].offer(dist, i);
      }
    }
  }

  // Lexicographic (distance, index) minimum is independent of merge order.
  std::vector<Best> merged(windows);
  for (const auto& part : partial) {
    for (std::size_t i = 0; i < windows; ++i) merged[i].offer(part[i].distance, part[i].index);
  }
  return to_profile(merged, cfg);
}

std::vector<std::size_t> discord_topk(const MatrixProfile& mp, std::size_t k) {
  if (k == 0 || k > mp.size()) {
    throw InvalidInput("discord count must be in [1, " + std::to_string(mp.size()) + "]");
  }
  std::vector<std::size_t> order(mp.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return mp.distances[a] > mp.distances[b];
  });

  std::vector<std::size_t> picked;
  for (std::size_t candidate : order) {
    if (picked.size() == k) break;
    const bool suppressed = std::any_of(picked.begin(), picked.end(), [&](std::size_t p) {
      const std::size_t gap = p > candidate ? p - candidate : candidate - p;
      return gap <= mp.exclusion_radius;
    });
    if (!suppressed) picked.push_back(candidate);
  }
  return picked;
}

}  // namespace tssynth
