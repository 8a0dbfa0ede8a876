#include "thts/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "thts/error.hpp"

namespace thts::bandit {

void ArmStats::add(double r) {
  if (t == 0) {
    lo = hi = r;
  } else {
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  ++t;
  sum += r;
  sumsq += r * r;
}

void ArmStats::merge(const ArmStats& other) {
  if (other.t == 0) return;
  if (t == 0) {
    *this = other;
    return;
  }
  t += other.t;
  sum += other.sum;
  sumsq += other.sumsq;
  lo = std::min(lo, other.lo);
  hi = std::max(hi, other.hi);
}

double ArmStats::variance() const {
  if (t < 2) return 0.0;
  const double n = static_cast<double>(t);
  const double mu = sum / n;
  return std::max(0.0, (sumsq - n * mu * mu) / (n - 1.0));
}

double ArmStats::std_dev() const { return std::sqrt(variance()); }

ArmStats ArmStats::of(std::span<const double> samples) {
  ArmStats s;
  for (double x : samples) s.add(x);
  return s;
}

void PolicyConfig::validate() const {
  if (kind == PolicyKind::kUcb1 && !(c > 0.0)) {
    throw std::invalid_argument("UCB1 exploration rate must be > 0");
  }
}

PolicyKind parse_policy_kind(std::string_view name) {
  if (name == "ucb1") return PolicyKind::kUcb1;
  if (name == "ucb1-normal") return PolicyKind::kUcb1Normal;
  if (name == "ucb1-normal2") return PolicyKind::kUcb1Normal2;
  if (name == "ucb1-uniform") return PolicyKind::kUcb1Uniform;
  throw std::invalid_argument("unknown policy '" + std::string(name) + "'");
}

std::string_view policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kUcb1: return "ucb1";
    case PolicyKind::kUcb1Normal: return "ucb1-normal";
    case PolicyKind::kUcb1Normal2: return "ucb1-normal2";
    case PolicyKind::kUcb1Uniform: return "ucb1-uniform";
  }
  return "?";
}

UniformExploration parse_uniform_exploration(std::string_view name) {
  if (name == "scaled") return UniformExploration::kScaled;
  if (name == "shrinking") return UniformExploration::kShrinking;
  throw std::invalid_argument("unknown uniform exploration variant '" + std::string(name) + "'");
}

std::string_view uniform_exploration_name(UniformExploration v) {
  return v == UniformExploration::kScaled ? "scaled" : "shrinking";
}

UniformEstimate mle_uniform(const ArmStats& stats) {
  if (stats.t == 0) throw ContractViolation("mle_uniform needs at least one sample");
  return {stats.lo, stats.hi};
}

GaussianEstimate mle_gaussian(const ArmStats& stats) {
  if (stats.t < 2) throw ContractViolation("mle_gaussian needs at least two samples");
  return {stats.mean(), stats.std_dev()};
}

double mle_mean(const ArmStats& stats) {
  if (stats.t == 0) throw ContractViolation("mle_mean needs at least one sample");
  return stats.mean();
}

simd::IndexParams index_params(const PolicyConfig& cfg, double total) {
  simd::IndexParams p;
  p.log_total = std::log(total);
  p.sign = cfg.direction == Direction::kMaximize ? 1.0 : -1.0;
  switch (cfg.kind) {
    case PolicyKind::kUcb1:
      p.coef = 2.0;
      p.scaling = simd::PullScaling::kDivide;
      break;
    case PolicyKind::kUcb1Normal:
      p.coef = 16.0;
      p.scaling = simd::PullScaling::kDivide;
      break;
    case PolicyKind::kUcb1Normal2:
      p.coef = 2.0;
      p.scaling = simd::PullScaling::kNone;
      break;
    case PolicyKind::kUcb1Uniform:
      p.coef = 6.0;
      p.scaling = cfg.uniform == UniformExploration::kScaled ? simd::PullScaling::kMultiply
                                                            : simd::PullScaling::kDivide;
      break;
  }
  return p;
}

std::pair<double, double> center_and_spread(const ArmStats& stats, const PolicyConfig& cfg) {
  switch (cfg.kind) {
    case PolicyKind::kUcb1: return {stats.mean(), cfg.c};
    case PolicyKind::kUcb1Normal:
    case PolicyKind::kUcb1Normal2: return {stats.mean(), stats.std_dev()};
    case PolicyKind::kUcb1Uniform: return {(stats.hi + stats.lo) / 2.0, stats.hi - stats.lo};
  }
  return {0.0, 0.0};
}

namespace {

double single_index(const ArmStats& stats, double total, const PolicyConfig& cfg) {
  const auto [center, spread] = center_and_spread(stats, cfg);
  const simd::IndexParams p = index_params(cfg, total);
  const double radius =
      spread * std::sqrt(simd::exploration_radicand(p, static_cast<double>(stats.t)));
  return center + p.sign * radius;
}

}  // namespace

double index_ucb1(const ArmStats& stats, double total, const PolicyConfig& cfg) {
  PolicyConfig c = cfg;
  c.kind = PolicyKind::kUcb1;
  // c = 0 means no exploration, even where the radicand is infinite.
  if (c.c == 0.0) return stats.mean();
  return single_index(stats, total, c);
}

double index_ucb1_normal(const ArmStats& stats, double total, Direction direction) {
  PolicyConfig c;
  c.kind = PolicyKind::kUcb1Normal;
  c.direction = direction;
  return single_index(stats, total, c);
}

double index_ucb1_normal2(const ArmStats& stats, double total, Direction direction) {
  PolicyConfig c;
  c.kind = PolicyKind::kUcb1Normal2;
  c.direction = direction;
  return single_index(stats, total, c);
}

double index_ucb1_uniform(const ArmStats& stats, double total, const PolicyConfig& cfg) {
  PolicyConfig c = cfg;
  c.kind = PolicyKind::kUcb1Uniform;
  return single_index(stats, total, c);
}

double index_of(const ArmStats& stats, double total, const PolicyConfig& cfg) {
  switch (cfg.kind) {
    case PolicyKind::kUcb1: return index_ucb1(stats, total, cfg);
    case PolicyKind::kUcb1Normal: return index_ucb1_normal(stats, total, cfg.direction);
    case PolicyKind::kUcb1Normal2: return index_ucb1_normal2(stats, total, cfg.direction);
    case PolicyKind::kUcb1Uniform: return index_ucb1_uniform(stats, total, cfg);
  }
  return 0.0;
}

std::size_t best_index(std::span<const double> indices, Direction direction) {
  std::size_t best = 0;
  bool found = false;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const double v = indices[i];
    if (std::isnan(v)) continue;
    if (!found) {
      best = i;
      found = true;
      continue;
    }
    const bool better = direction == Direction::kMinimize ? v < indices[best] : v > indices[best];
    if (better) best = i;
  }
  return best;
}

std::size_t select_arm(std::span<const ArmStats> arms, double total, const PolicyConfig& cfg) {
  if (arms.empty()) throw ContractViolation("select_arm needs at least one arm");
  for (std::size_t i = 0; i < arms.size(); ++i) {
    if (arms[i].t == 0) return i;
  }
  if (cfg.kind == PolicyKind::kUcb1Normal && cfg.auer_side_condition) {
    const double threshold = std::ceil(8.0 * std::log(total));
    for (std::size_t i = 0; i < arms.size(); ++i) {
      if (static_cast<double>(arms[i].t) < threshold) return i;
    }
  }
  const std::size_t n = arms.size();
  std::vector<double> center(n), spread(n), pulls(n), out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::tie(center[i], spread[i]) = center_and_spread(arms[i], cfg);
    pulls[i] = static_cast<double>(arms[i].t);
  }
  if (cfg.kind == PolicyKind::kUcb1 && cfg.c == 0.0) {
    out = center;
  } else {
    simd::kernels().bandit_indices(center.data(), spread.data(), pulls.data(), n,
                                   index_params(cfg, total), out.data());
  }
  return best_index(out, cfg.direction);
}

double gp_upper_support(const GpParams& p) {
  if (p.xi < 0.0) return p.theta - p.sigma / p.xi;
  return std::numeric_limits<double>::infinity();
}

double gp_pdf(double x, const GpParams& p) {
  if (!(p.sigma > 0.0)) throw std::invalid_argument("gp_pdf: sigma must be > 0");
  if (x < p.theta || x > gp_upper_support(p)) return 0.0;
  const double z = (x - p.theta) / p.sigma;
  if (p.xi == 0.0) return std::exp(-z) / p.sigma;
  const double base = 1.0 + p.xi * z;
  if (base < 0.0) return 0.0;
  return std::pow(base, -(p.xi + 1.0) / p.xi) / p.sigma;
}

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) * (std::numbers::inv_sqrtpi / std::numbers::sqrt2);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace {

GaussianEstimate clark_max(double mu1, double sigma1, double mu2, double sigma2) {
  const double a = std::sqrt(sigma1 * sigma1 + sigma2 * sigma2);
  if (a == 0.0) {
    // Both deterministic: the larger value, exactly.
    return mu1 >= mu2 ? GaussianEstimate{mu1, sigma1} : GaussianEstimate{mu2, sigma2};
  }
  const double alpha = (mu1 - mu2) / a;
  const double cdf = normal_cdf(alpha);
  const double cdf_neg = normal_cdf(-alpha);
  const double pdf = normal_pdf(alpha);
  const double mean = mu1 * cdf + mu2 * cdf_neg + a * pdf;
  const double second = (mu1 * mu1 + sigma1 * sigma1) * cdf +
                        (mu2 * mu2 + sigma2 * sigma2) * cdf_neg + (mu1 + mu2) * a * pdf;
  return {mean, std::sqrt(std::max(0.0, second - mean * mean))};
}

}  // namespace

GaussianEstimate clark_extreme_moments(double mu1, double sigma1, double mu2, double sigma2,
                                       Direction direction) {
  if (sigma1 < 0.0 || sigma2 < 0.0) {
    throw std::invalid_argument("clark_extreme_moments: standard deviations must be >= 0");
  }
  if (direction == Direction::kMaximize) return clark_max(mu1, sigma1, mu2, sigma2);
  // min(X1, X2) = -max(-X1, -X2)
  const GaussianEstimate m = clark_max(-mu1, sigma1, -mu2, sigma2);
  return {-m.mean, m.std_dev};
}

}  // namespace thts::bandit
