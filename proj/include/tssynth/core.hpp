#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tssynth {

/// Raised for malformed inputs: non-finite samples, bad windows, length mismatches.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an optimization produces a non-finite quantity.
class NumericalAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultVarianceEpsilon = 1e-8;
inline constexpr std::size_t kMinWindow = 3;

/// A finite, univariate series of at least two samples.
class TimeSeries {
 public:
  TimeSeries() = default;
  explicit TimeSeries(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t t) const noexcept { return values_[t]; }

  /// Window [start, start + m). Throws if it does not fit.
  std::span<const double> window(std::size_t start, std::size_t m) const;

  /// Number of length-m windows, n - m + 1 (0 when m > n).
  std::size_t window_count(std::size_t m) const noexcept {
    return m > values_.size() ? 0 : values_.size() - m + 1;
  }

  bool operator==(const TimeSeries&) const = default;

 private:
  std::vector<double> values_;
};

/// Window length plus the trivial-match band and the flatness guard.
struct WindowConfig {
  std::size_t m = 0;
  std::size_t exclusion_radius = 0;
  double variance_epsilon = kDefaultVarianceEpsilon;

  /// ceil(m / 4) exclusion radius, the usual matrix-profile convention.
  static WindowConfig with_default_exclusion(std::size_t m,
                                             double epsilon = kDefaultVarianceEpsilon);

  /// Checks the window against a series of length n.
  void validate(std::size_t n) const;
};

std::size_t default_exclusion_radius(std::size_t m) noexcept;

/// Mean and population standard deviation of a window.
struct WindowStats {
  double mean = 0.0;
  double stddev = 0.0;
};

WindowStats window_stats(std::span<const double> x);

/// Subtract the mean and divide by the population standard deviation.
/// Windows with stddev <= epsilon are flat and map to all zeros.
std::vector<double> z_normalize(std::span<const double> x,
                                double epsilon = kDefaultVarianceEpsilon);

/// Pearson correlation; 0 when either input is flat.
double pearson_corr(std::span<const double> x, std::span<const double> y,
                    double epsilon = kDefaultVarianceEpsilon);

/// Euclidean distance between the z-normalized inputs.
double znorm_dist(std::span<const double> x, std::span<const double> y,
                  double epsilon = kDefaultVarianceEpsilon);

}  // namespace tssynth
