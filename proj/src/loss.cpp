#include "tssynth/loss.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tssynth {

namespace {

// Below this the derivative of the distance through its square root is
// evaluated at the floor instead.
constexpr double kDistanceFloor = 1e-7;

struct NormalizedWindow {
  std::vector<double> z;
  double sigma = 0.0;
  bool flat = true;
};

NormalizedWindow normalize(const TimeSeries& s, std::size_t start, const WindowConfig& cfg) {
  const auto w = s.window(start, cfg.m);
  NormalizedWindow out;
  out.sigma = window_stats(w).stddev;
  out.flat = out.sigma <= cfg.variance_epsilon;
  out.z = z_normalize(w, cfg.variance_epsilon);
  return out;
}

// Same arithmetic as pearson_corr / znorm_dist so values agree bitwise.
double corr(const NormalizedWindow& a, const NormalizedWindow& b) {
  const double dot = std::inner_product(a.z.begin(), a.z.end(), b.z.begin(), 0.0);
  return std::clamp(dot / static_cast<double>(a.z.size()), -1.0, 1.0);
}

double dist(const NormalizedWindow& a, const NormalizedWindow& b) {
  double ss = 0.0;
  for (std::size_t t = 0; t < a.z.size(); ++t) {
    const double d = a.z[t] - b.z[t];
    ss += d * d;
  }
  return std::sqrt(ss);
}

// out += scale * d r(a, b) / d b, where r = <z_a, z_b> / m.
void add_corr_grad(const NormalizedWindow& a, const NormalizedWindow& b, double scale,
                   std::span<double> out) {
  if (a.flat || b.flat || scale == 0.0) return;
  const double m = static_cast<double>(b.z.size());
  const double r = std::inner_product(a.z.begin(), a.z.end(), b.z.begin(), 0.0) / m;
  const double c = scale / (m * b.sigma);
  for (std::size_t t = 0; t < out.size(); ++t) out[t] += c * (a.z[t] - r * b.z[t]);
}

// Adds scale * dDist(a, b)/da into grad_a and scale * dDist(a, b)/db into grad_b.
// Dist = sqrt(2m(1 - r)), so dDist/dr = -m / Dist.
void add_dist_grad(const NormalizedWindow& a, const NormalizedWindow& b, double distance,
                   double scale, std::span<double> grad_a, std::span<double> grad_b) {
  if (a.flat || b.flat || scale == 0.0) return;
  const double m = static_cast<double>(a.z.size());
  const double dr = -m / std::max(distance, kDistanceFloor);
  add_corr_grad(b, a, scale * dr, grad_a);
  add_corr_grad(a, b, scale * dr, grad_b);
}

void require_aligned(const TimeSeries& original, const TimeSeries& synth) {
  if (original.size() != synth.size()) {
    throw InvalidInput("original and synthesized series differ in length: " +
                       std::to_string(original.size()) + " vs " + std::to_string(synth.size()));
  }
}

void require_triple(const LossTriple& t, std::size_t windows) {
  if (t.i >= windows || t.j >= windows || t.k >= windows) {
    throw InvalidInput("triple index out of range");
  }
}

// Per-triple result: the three terms plus gradients over windows i, j, k.
struct TripleEval {
  LossComponents terms;
  std::vector<double> grad;  // 3 * m, laid out [i | j | k]
};

TripleEval eval_triple(const TimeSeries& original, const TimeSeries& synth, const LossTriple& t,
                       const LossWeights& w, const WindowConfig& cfg, double batch_scale,
                       bool with_grad) {
  const std::size_t m = cfg.m;
  const auto orig_i = normalize(original, t.i, cfg);
  const auto orig_j = normalize(original, t.j, cfg);
  const auto syn_i = normalize(synth, t.i, cfg);
  const auto syn_j = normalize(synth, t.j, cfg);
  const auto syn_k = normalize(synth, t.k, cfg);

  TripleEval out;
  const double r = corr(orig_i, syn_i);
  out.terms.local = r * r;

  const double target = dist(orig_i, orig_j);
  const double d_ij = dist(syn_i, syn_j);
  const double gap = target - d_ij;
  out.terms.distance = gap * gap;

  const double d_ik = dist(syn_i, syn_k);
  const double hinge = d_ij - d_ik + w.identity_margin;
  out.terms.identity = std::max(0.0, hinge);

  if (!with_grad) return out;
  out.grad.assign(3 * m, 0.0);
  std::span<double> g(out.grad);
  auto gi = g.subspan(0, m), gj = g.subspan(m, m), gk = g.subspan(2 * m, m);

  add_corr_grad(orig_i, syn_i, batch_scale * w.local * 2.0 * r, gi);
  add_dist_grad(syn_i, syn_j, d_ij, batch_scale * w.distance * -2.0 * gap, gi, gj);
  if (hinge > 0.0) {
    add_dist_grad(syn_i, syn_j, d_ij, batch_scale * w.identity, gi, gj);
    add_dist_grad(syn_i, syn_k, d_ik, -batch_scale * w.identity, gi, gk);
  }
  return out;
}

BatchLoss evaluate_batch(const TimeSeries& original, const TimeSeries& synth,
                         std::span<const LossTriple> triples, const LossWeights& weights,
                         const WindowConfig& cfg, GradientBuffer* gradient) {
  require_aligned(original, synth);
  cfg.validate(synth.size());
  weights.validate();
  if (triples.empty()) throw InvalidInput("batch must contain at least one triple");
  const std::size_t windows = synth.window_count(cfg.m);
  for (const auto& t : triples) require_triple(t, windows);

  const double scale = 1.0 / static_cast<double>(triples.size());
  const bool with_grad = gradient != nullptr;
  std::vector<TripleEval> evals(triples.size());

  const auto count = static_cast<std::ptrdiff_t>(triples.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < count; ++b) {
    const auto idx = static_cast<std::size_t>(b);
    evals[idx] = eval_triple(original, synth, triples[idx], weights, cfg, scale, with_grad);
  }

  LossComponents sum;
  for (const auto& e : evals) {
    sum.local += e.terms.local;
    sum.distance += e.terms.distance;
    sum.identity += e.terms.identity;
  }
  BatchLoss out;
  out.components = {sum.local * scale, sum.distance * scale, sum.identity * scale};
  out.total = weights.local * out.components.local + weights.distance * out.components.distance +
              weights.identity * out.components.identity;

  if (with_grad) {
    gradient->assign(synth.size(), 0.0);
    const std::size_t m = cfg.m;
    for (std::size_t b = 0; b < triples.size(); ++b) {
      const auto& t = triples[b];
      const auto& g = evals[b].grad;
      for (std::size_t s = 0; s < m; ++s) {
        (*gradient)[t.i + s] += g[s];
        (*gradient)[t.j + s] += g[m + s];
        (*gradient)[t.k + s] += g[2 * m + s];
      }
    }
  }
  return out;
}

// Exclusion band [lo, hi] around c, clipped to the window range.
std::pair<std::size_t, std::size_t> band(std::size_t c, std::size_t radius, std::size_t windows) {
  return {c > radius ? c - radius : 0, std::min(windows - 1, c + radius)};
}

// Admissible negatives for i are [0, windows) minus the bands of i and j,
// returned as at most three disjoint inclusive ranges.
std::vector<std::pair<std::size_t, std::size_t>> admissible_ranges(const MatrixProfile& mp,
                                                                   std::size_t i) {
  const std::size_t windows = mp.size();
  auto a = band(i, mp.exclusion_radius, windows);
  auto b = band(mp.indices[i], mp.exclusion_radius, windows);
  if (b.first < a.first) std::swap(a, b);
  std::vector<std::pair<std::size_t, std::size_t>> blocked{a};
  if (b.first <= a.second + 1) {
    blocked.back().second = std::max(a.second, b.second);
  } else {
    blocked.push_back(b);
  }

  std::vector<std::pair<std::size_t, std::size_t>> free;
  std::size_t cursor = 0;
  for (const auto& [lo, hi] : blocked) {
    if (lo > cursor) free.emplace_back(cursor, lo - 1);
    cursor = hi + 1;
  }
  if (cursor < windows) free.emplace_back(cursor, windows - 1);
  return free;
}

}  // namespace

void LossWeights::validate() const {
  const bool finite = std::isfinite(local) && std::isfinite(distance) &&
                      std::isfinite(identity) && std::isfinite(identity_margin);
  if (!finite || local < 0.0 || distance < 0.0 || identity < 0.0 || identity_margin < 0.0) {
    throw InvalidInput("loss weights and margin must be finite and non-negative");
  }
  if (local == 0.0 && distance == 0.0 && identity == 0.0) {
    throw InvalidInput("at least one loss weight must be positive");
  }
}

double loss_local(const TimeSeries& original, const TimeSeries& synth, std::size_t i,
                  const WindowConfig& cfg) {
  require_aligned(original, synth);
  const double r =
      pearson_corr(original.window(i, cfg.m), synth.window(i, cfg.m), cfg.variance_epsilon);
  return r * r;
}

double loss_distance(const TimeSeries& original, const TimeSeries& synth, std::size_t i,
                     std::size_t j, const WindowConfig& cfg) {
  require_aligned(original, synth);
  const double target =
      znorm_dist(original.window(i, cfg.m), original.window(j, cfg.m), cfg.variance_epsilon);
  const double actual =
      znorm_dist(synth.window(i, cfg.m), synth.window(j, cfg.m), cfg.variance_epsilon);
  return (target - actual) * (target - actual);
}

double loss_identity(const TimeSeries& synth, const LossTriple& triple, const WindowConfig& cfg,
                     double margin) {
  const auto wi = synth.window(triple.i, cfg.m);
  const double d_ij = znorm_dist(wi, synth.window(triple.j, cfg.m), cfg.variance_epsilon);
  const double d_ik = znorm_dist(wi, synth.window(triple.k, cfg.m), cfg.variance_epsilon);
  return std::max(0.0, d_ij - d_ik + margin);
}

BatchLoss batch_loss(const TimeSeries& original, const TimeSeries& synth,
                     std::span<const LossTriple> triples, const LossWeights& weights,
                     const WindowConfig& cfg) {
  return evaluate_batch(original, synth, triples, weights, cfg, nullptr);
}

GradientBuffer batch_gradient(const TimeSeries& original, const TimeSeries& synth,
                              std::span<const LossTriple> triples, const LossWeights& weights,
                              const WindowConfig& cfg) {
  GradientBuffer gradient;
  evaluate_batch(original, synth, triples, weights, cfg, &gradient);
  return gradient;
}

BatchLoss batch_loss_and_gradient(const TimeSeries& original, const TimeSeries& synth,
                                  std::span<const LossTriple> triples, const LossWeights& weights,
                                  const WindowConfig& cfg, GradientBuffer& gradient) {
  return evaluate_batch(original, synth, triples, weights, cfg, &gradient);
}

std::size_t admissible_negative_count(const MatrixProfile& mp, std::size_t i) {
  if (i >= mp.size()) throw InvalidInput("anchor index out of range");
  std::size_t count = 0;
  for (const auto& [lo, hi] : admissible_ranges(mp, i)) count += hi - lo + 1;
  return count;
}

std::optional<LossTriple> sample_triple_at(const MatrixProfile& mp, std::size_t i,
                                          std::mt19937_64& rng) {
  if (i >= mp.size()) throw InvalidInput("anchor index out of range");
  const auto ranges = admissible_ranges(mp, i);
  std::size_t count = 0;
  for (const auto& [lo, hi] : ranges) count += hi - lo + 1;
  if (count == 0) return std::nullopt;

  std::size_t u = std::uniform_int_distribution<std::size_t>(0, count - 1)(rng);
  for (const auto& [lo, hi] : ranges) {
    const std::size_t len = hi - lo + 1;
    if (u < len) return LossTriple{i, mp.indices[i], lo + u};
    u -= len;
  }
  return std::nullopt;
}

std::vector<LossTriple> sample_triples(const MatrixProfile& mp, std::size_t batch_size,
                                       std::mt19937_64& rng) {
  if (batch_size == 0) throw InvalidInput("batch size must be positive");
  const std::size_t windows = mp.size();
  if (windows == 0 || mp.indices.size() != windows) {
    throw InvalidInput("matrix profile is empty or inconsistent");
  }
  bool any = false;
  for (std::size_t i = 0; i < windows && !any; ++i) any = admissible_negative_count(mp, i) > 0;
  if (!any) throw InvalidInput("no anchor admits a negative sample outside the exclusion bands");

  std::uniform_int_distribution<std::size_t> anchor(0, windows - 1);
  std::vector<LossTriple> out;
  out.reserve(batch_size);
  while (out.size() < batch_size) {
    if (auto t = sample_triple_at(mp, anchor(rng), rng)) out.push_back(*t);
  }
  return out;
}

}  // namespace tssynth
