#pragma once

// Arm statistics, maximum-likelihood estimates and index policies for
// multi-armed bandits over heuristic rewards.
//
// All policies are direction-parametric: for maximization the index is an
// upper confidence bound and the best arm has the largest index; for
// minimization (cost-to-go rewards) it is a lower confidence bound and the
// best arm has the smallest index.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "thts/simd.hpp"

namespace thts::bandit {

/// Running summary of the rewards observed on one arm.
struct ArmStats {
  std::uint64_t t = 0;
  double sum = 0.0;
  double sumsq = 0.0;
  double lo = 0.0;
  double hi = 0.0;

  void add(double r);
  /// Pools two disjoint sample sets.
  void merge(const ArmStats& other);

  double mean() const { return sum / static_cast<double>(t); }
  /// Bessel-corrected variance from (sum, sumsq), clamped at 0. 0 for t < 2.
  double variance() const;
  double std_dev() const;

  static ArmStats of(std::span<const double> samples);
};

enum class Direction : std::uint8_t { kMinimize, kMaximize };
enum class PolicyKind : std::uint8_t { kUcb1, kUcb1Normal, kUcb1Normal2, kUcb1Uniform };

/// Pull-count scaling of the UCB1-Uniform exploration term:
///   kScaled:    (u - l) * sqrt(6 t ln T)
///   kShrinking: (u - l) * sqrt(6 ln T / t)
enum class UniformExploration : std::uint8_t { kScaled, kShrinking };

struct PolicyConfig {
  PolicyKind kind = PolicyKind::kUcb1Uniform;
  Direction direction = Direction::kMinimize;
  /// Exploration rate for UCB1.
  double c = 1.0;
  UniformExploration uniform = UniformExploration::kScaled;
  /// UCB1-Normal: force-pull arms with t < ceil(8 ln T).
  bool auer_side_condition = true;

  void validate() const;
};

PolicyKind parse_policy_kind(std::string_view name);
std::string_view policy_name(PolicyKind kind);
UniformExploration parse_uniform_exploration(std::string_view name);
std::string_view uniform_exploration_name(UniformExploration v);

struct UniformEstimate {
  double lo;
  double hi;
};

struct GaussianEstimate {
  double mean;
  double std_dev;
};

/// (min, max) of the samples. Throws ContractViolation if t == 0.
UniformEstimate mle_uniform(const ArmStats& stats);
/// Mean and Bessel-corrected standard deviation. Throws if t < 2.
GaussianEstimate mle_gaussian(const ArmStats& stats);
/// Mean only. Throws if t == 0.
double mle_mean(const ArmStats& stats);

double index_ucb1(const ArmStats& stats, double total, const PolicyConfig& cfg);
double index_ucb1_normal(const ArmStats& stats, double total, Direction direction);
double index_ucb1_normal2(const ArmStats& stats, double total, Direction direction);
double index_ucb1_uniform(const ArmStats& stats, double total, const PolicyConfig& cfg);
/// Dispatches on cfg.kind.
double index_of(const ArmStats& stats, double total, const PolicyConfig& cfg);

/// Kernel parameters of the configured policy at total pull count `total`.
simd::IndexParams index_params(const PolicyConfig& cfg, double total);

/// Center and spread the policy reads from raw arm statistics. UCB1's
/// spread is its exploration rate c; Gaussian spreads use std_dev() (0 for
/// t < 2); the uniform spread is hi - lo around the midrange.
std::pair<double, double> center_and_spread(const ArmStats& stats, const PolicyConfig& cfg);

/// Index of the best entry of `indices` for `direction`, ties to the lowest
/// position. NaN entries never win.
std::size_t best_index(std::span<const double> indices, Direction direction);

/// Full arm choice: unvisited arms first (lowest position), then the
/// UCB1-Normal side condition when enabled, then the best index.
std::size_t select_arm(std::span<const ArmStats> arms, double total, const PolicyConfig& cfg);

/// Generalized Pareto density gp(x | theta, sigma, xi).
struct GpParams {
  double theta = 0.0;
  double sigma = 1.0;
  double xi = 0.0;
};

/// Throws std::invalid_argument if sigma <= 0. Zero outside the support
/// [theta, theta - sigma/xi] (xi < 0) or [theta, inf).
double gp_pdf(double x, const GpParams& p);
/// Upper end of the support; +inf unless xi < 0.
double gp_upper_support(const GpParams& p);

double normal_pdf(double x);
double normal_cdf(double x);

/// Moments of the maximum (or minimum) of two independent Gaussians,
/// matched back to a Gaussian.
GaussianEstimate clark_extreme_moments(double mu1, double sigma1, double mu2, double sigma2,
                                       Direction direction);

}  // namespace thts::bandit
