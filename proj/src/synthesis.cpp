#include "tssynth/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace tssynth {

namespace {

// Independent RNG streams derived from the one user seed.
enum class Stream : std::uint64_t { kInit = 1, kBatches = 2, kCheckpoint = 3 };

std::mt19937_64 make_rng(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

struct SampleMoments {
  double mean = 0.0;
  double stddev = 0.0;
};

SampleMoments sample_moments(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

// Centered moving average; windows are truncated at the boundaries.
std::vector<double> moving_average(std::span<const double> x, std::size_t width) {
  const std::size_t n = x.size();
  const std::size_t left = (width - 1) / 2;
  const std::size_t right = width - 1 - left;
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t t = 0; t < n; ++t) prefix[t + 1] = prefix[t] + x[t];
  std::vector<double> out(n);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t lo = t > left ? t - left : 0;
    const std::size_t hi = std::min(n - 1, t + right);
    out[t] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
  }
  return out;
}

void rescale_to(std::vector<double>& x, SampleMoments target) {
  const auto have = sample_moments(x);
  const double gain = have.stddev > 0.0 ? target.stddev / have.stddev : 0.0;
  for (double& v : x) v = target.mean + gain * (v - have.mean);
}

bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

bool finite(const BatchLoss& l) {
  return std::isfinite(l.total) && std::isfinite(l.components.local) &&
         std::isfinite(l.components.distance) && std::isfinite(l.components.identity);
}

std::string describe(std::size_t iteration, const BatchLoss& l) {
  std::ostringstream os;
  os << "non-finite loss at iteration " << iteration << ": total=" << l.total
     << " local=" << l.components.local << " distance=" << l.components.distance
     << " identity=" << l.components.identity;
  return os.str();
}

// One triple per anchor, drawn once; every checkpoint is scored on the same set.
std::vector<LossTriple> checkpoint_triples(const MatrixProfile& mp, std::uint64_t seed) {
  auto rng = make_rng(seed, Stream::kCheckpoint);
  std::vector<LossTriple> out;
  out.reserve(mp.size());
  for (std::size_t i = 0; i < mp.size(); ++i) {
    if (auto t = sample_triple_at(mp, i, rng)) out.push_back(*t);
  }
  return out;
}

}  // namespace

std::string_view to_string(InitMode mode) {
  return mode == InitMode::kNoise ? "noise" : "smooth";
}

InitMode parse_init_mode(std::string_view name) {
  if (name == "noise") return InitMode::kNoise;
  if (name == "smooth" || name == "smoothed-noise") return InitMode::kSmoothedNoise;
  throw InvalidInput("unknown init mode '" + std::string(name) + "' (expected noise or smooth)");
}

WindowConfig SynthesisConfig::window() const {
  return WindowConfig{m, exclusion_radius.value_or(default_exclusion_radius(m)),
                      kDefaultVarianceEpsilon};
}

std::size_t SynthesisConfig::effective_smoothing_width() const {
  return smoothing_width.value_or(default_exclusion_radius(m));
}

void SynthesisConfig::validate(std::size_t n) const {
  require_profile_feasible(n, window());
  weights.validate();
  if (batch_size == 0) throw InvalidInput("batch size must be positive");
  if (!(adam.step_size > 0.0) || !std::isfinite(adam.step_size)) {
    throw InvalidInput("step size must be positive");
  }
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
    throw InvalidInput("optimizer betas must lie in [0, 1)");
  }
  if (!(adam.epsilon > 0.0)) throw InvalidInput("optimizer epsilon must be positive");
  if (effective_smoothing_width() == 0) throw InvalidInput("smoothing width must be positive");
  if (checkpoint_every == 0) throw InvalidInput("checkpoint interval must be positive");
}

TimeSeries initialize(const TimeSeries& original, const SynthesisConfig& cfg) {
  const auto target = sample_moments(original.values());
  auto rng = make_rng(cfg.seed, Stream::kInit);
  std::normal_distribution<double> gauss(target.mean, target.stddev);

  std::vector<double> out(original.size());
  for (double& v : out) v = gauss(rng);
  if (cfg.init == InitMode::kSmoothedNoise) {
    out = moving_average(out, cfg.effective_smoothing_width());
    rescale_to(out, target);
  }
  return TimeSeries(std::move(out));
}

AdamOptimizer::AdamOptimizer(std::size_t size, AdamParams params)
    : params_(params), m1_(size, 0.0), m2_(size, 0.0) {}

void AdamOptimizer::step(std::vector<double>& params, std::span<const double> gradient) {
  ++t_;
  const double t = static_cast<double>(t_);
  const double c1 = 1.0 - std::pow(params_.beta1, t);
  const double c2 = 1.0 - std::pow(params_.beta2, t);
  for (std::size_t p = 0; p < params.size(); ++p) {
    const double g = gradient[p];
    m1_[p] = params_.beta1 * m1_[p] + (1.0 - params_.beta1) * g;
    m2_[p] = params_.beta2 * m2_[p] + (1.0 - params_.beta2) * g * g;
    params[p] -= params_.step_size * (m1_[p] / c1) / (std::sqrt(m2_[p] / c2) + params_.epsilon);
  }
}

double median_abs_window_corr(const TimeSeries& a, const TimeSeries& b, const WindowConfig& cfg) {
  if (a.size() != b.size()) throw InvalidInput("series differ in length");
  cfg.validate(a.size());
  const std::size_t windows = a.window_count(cfg.m);
  std::vector<double> corr(windows);
  for (std::size_t i = 0; i < windows; ++i) {
    corr[i] = std::abs(pearson_corr(a.window(i, cfg.m), b.window(i, cfg.m), cfg.variance_epsilon));
  }
  std::sort(corr.begin(), corr.end());
  const std::size_t mid = windows / 2;
  return windows % 2 == 1 ? corr[mid] : 0.5 * (corr[mid - 1] + corr[mid]);
}

double mp_rmse(const MatrixProfile& a, const MatrixProfile& b) {
  if (a.size() != b.size() || a.size() == 0) {
    throw InvalidInput("matrix profiles differ in length");
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.distances[i] - b.distances[i];
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(a.size()));
}

SynthesisResult synthesize(const TimeSeries& original, const SynthesisConfig& cfg) {
  cfg.validate(original.size());
  const WindowConfig window = cfg.window();

  // Frozen targets: the original's profile is computed once.
  const MatrixProfile target = mp_fast(original, window);
  const auto probe = checkpoint_triples(target, cfg.seed);

  std::vector<double> values = [&] {
    const auto init = initialize(original, cfg);
    return std::vector<double>(init.values().begin(), init.values().end());
  }();

  SynthesisResult result;
  AdamOptimizer adam(values.size(), cfg.adam);
  auto rng = make_rng(cfg.seed, Stream::kBatches);
  GradientBuffer gradient;
  double best_total = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;

  for (std::size_t it = 1; it <= cfg.iterations; ++it) {
    const TimeSeries current(values);
    const auto triples = sample_triples(target, cfg.batch_size, rng);
    const auto batch =
        batch_loss_and_gradient(original, current, triples, cfg.weights, window, gradient);
    if (!finite(batch) || !all_finite(gradient)) {
      throw SynthesisAborted(describe(it, batch), std::move(result.trace));
    }
    adam.step(values, gradient);
    if (!all_finite(values)) {
      throw SynthesisAborted("non-finite sample after step " + std::to_string(it),
                             std::move(result.trace));
    }

    if (it % cfg.checkpoint_every != 0 && it != cfg.iterations) continue;

    const TimeSeries snapshot(values);
    const auto loss = batch_loss(original, snapshot, probe, cfg.weights, window);
    TraceRecord rec;
    rec.iteration = it;
    rec.total = loss.total;
    rec.components = loss.components;
    rec.median_abs_corr = median_abs_window_corr(original, snapshot, window);
    rec.mp_rmse = mp_rmse(target, mp_fast(snapshot, window));
    result.trace.records.push_back(rec);
    if (!finite(loss)) throw SynthesisAborted(describe(it, loss), std::move(result.trace));

    if (loss.total < best_total) {
      best_total = loss.total;
      stale = 0;
    } else if (cfg.early_stop_patience > 0 && ++stale >= cfg.early_stop_patience) {
      break;
    }
  }

  result.synth = TimeSeries(std::move(values));
  return result;
}

}  // namespace tssynth
