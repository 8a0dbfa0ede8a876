#pragma once

// Stationary multi-armed bandit simulator measuring expected (pseudo-)
// regret of the index policies in bandit.hpp.

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "thts/bandit.hpp"

namespace thts::bandit {

enum class ArmKind : std::uint8_t { kBernoulli, kUniform, kGaussian, kPoint };

struct ArmSpec {
  ArmKind kind = ArmKind::kPoint;
  double a = 0.0;  // p | l | mu | v
  double b = 0.0;  // - | u | sigma | -

  static ArmSpec bernoulli(double p);
  static ArmSpec uniform(double l, double u);
  static ArmSpec gaussian(double mu, double sigma);
  static ArmSpec point(double v);

  double mean() const;
  void validate() const;
  std::string to_string() const;
};

/// "bernoulli:0.9,uniform:2:9,gaussian:0:1,point:1"
std::vector<ArmSpec> parse_arms(std::string_view text);
std::string format_arms(std::span<const ArmSpec> arms);

struct RegretTrace {
  std::vector<std::uint32_t> pulls;
  /// Expected regret increment of each pull.
  std::vector<double> increments;
  /// cumulative[t] = regret after t pulls; cumulative[0] = 0.
  std::vector<double> cumulative;

  double regret_at(std::size_t t) const { return cumulative.at(t); }
};

/// Runs `horizon` pulls. Arm k draws its n-th reward from a stream derived
/// from (seed, k), so every policy sees the same rewards for the same seed.
RegretTrace simulate(std::span<const ArmSpec> arms, const PolicyConfig& policy,
                     std::uint64_t horizon, std::uint64_t seed);

/// Recomputes the cumulative expected regret of a pull sequence.
double cumulative_regret(std::span<const std::uint32_t> pulls, std::span<const ArmSpec> arms,
                         Direction direction);
double cumulative_regret(const RegretTrace& trace, std::span<const ArmSpec> arms,
                         Direction direction);

/// Expected regret ceiling of UCB1 (c = 1):
///   sum over suboptimal arms of 8 ln T / gap + (1 + pi^2/3) * gap.
double ucb1_regret_bound(std::span<const ArmSpec> arms, std::uint64_t horizon,
                         Direction direction);

/// Reward stream of one arm under one seed.
class ArmSampler {
 public:
  ArmSampler(const ArmSpec& spec, std::uint64_t seed, std::uint64_t arm_index);
  double draw();

 private:
  ArmSpec spec_;
  std::mt19937_64 rng_;
};

inline constexpr std::uint64_t kCheckpoints[] = {100, 1000, 10000, 100000};

/// CSV rows `policy,arms,seed,T,regret` at the checkpoints <= horizon (and
/// at the horizon itself if it is not a checkpoint).
void write_regret_csv(std::ostream& out, std::string_view policy_label,
                      std::span<const ArmSpec> arms, std::uint64_t seed,
                      const RegretTrace& trace, bool header);

}  // namespace thts::bandit
