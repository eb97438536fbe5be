#include "tssynth/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tssynth {

namespace {

void require_finite(std::span<const double> x) {
  if (!std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); })) {
    throw InvalidInput("series contains a non-finite sample");
  }
}

void require_window(std::span<const double> x) {
  if (x.size() < kMinWindow) {
    throw InvalidInput("window must have at least 3 samples, got " + std::to_string(x.size()));
  }
}

void require_same_length(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw InvalidInput("length mismatch: " + std::to_string(x.size()) + " vs " +
                       std::to_string(y.size()));
  }
  require_window(x);
}

}  // namespace

TimeSeries::TimeSeries(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) {
    throw InvalidInput("a time series needs at least 2 samples");
  }
  require_finite(values_);
}

std::span<const double> TimeSeries::window(std::size_t start, std::size_t m) const {
  if (m == 0 || m > values_.size() || start > values_.size() - m) {
    throw InvalidInput("window [" + std::to_string(start) + ", " + std::to_string(start + m) +
                       ") out of range for length " + std::to_string(values_.size()));
  }
  return std::span<const double>(values_).subspan(start, m);
}

std::size_t default_exclusion_radius(std::size_t m) noexcept { return (m + 3) / 4; }

WindowConfig WindowConfig::with_default_exclusion(std::size_t m, double epsilon) {
  return WindowConfig{m, default_exclusion_radius(m), epsilon};
}

void WindowConfig::validate(std::size_t n) const {
  if (m < kMinWindow) {
    throw InvalidInput("window length must be >= 3, got " + std::to_string(m));
  }
  if (m > n) {
    throw InvalidInput("window length " + std::to_string(m) + " exceeds series length " +
                       std::to_string(n));
  }
  if (exclusion_radius >= n - m + 1) {
    throw InvalidInput("exclusion radius " + std::to_string(exclusion_radius) +
                       " must be below the window count " + std::to_string(n - m + 1));
  }
  if (!(variance_epsilon > 0.0) || !std::isfinite(variance_epsilon)) {
    throw InvalidInput("variance epsilon must be a positive finite number");
  }
}

WindowStats window_stats(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / n)};
}

std::vector<double> z_normalize(std::span<const double> x, double epsilon) {
  require_window(x);
  require_finite(x);
  const auto [mean, sd] = window_stats(x);
  // Overflowed variance: poison the result rather than report a flat window.
  if (!std::isfinite(sd)) {
    return std::vector<double>(x.size(), std::numeric_limits<double>::quiet_NaN());
  }
  std::vector<double> z(x.size(), 0.0);
  if (sd <= epsilon) return z;
  for (std::size_t t = 0; t < x.size(); ++t) z[t] = (x[t] - mean) / sd;
  return z;
}

double pearson_corr(std::span<const double> x, std::span<const double> y, double epsilon) {
  require_same_length(x, y);
  const auto zx = z_normalize(x, epsilon);
  const auto zy = z_normalize(y, epsilon);
  const double dot = std::inner_product(zx.begin(), zx.end(), zy.begin(), 0.0);
  return std::clamp(dot / static_cast<double>(x.size()), -1.0, 1.0);
}

double znorm_dist(std::span<const double> x, std::span<const double> y, double epsilon) {
  require_same_length(x, y);
  const auto zx = z_normalize(x, epsilon);
  const auto zy = z_normalize(y, epsilon);
  double ss = 0.0;
  for (std::size_t t = 0; t < zx.size(); ++t) {
    const double d = zx[t] - zy[t];
    ss += d * d;
  }
  return std::sqrt(ss);
}

}  // namespace tssynth
