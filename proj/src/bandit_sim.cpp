#include "thts/bandit_sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "thts/error.hpp"

namespace thts::bandit {

ArmSpec ArmSpec::bernoulli(double p) { return {ArmKind::kBernoulli, p, 0.0}; }
ArmSpec ArmSpec::uniform(double l, double u) { return {ArmKind::kUniform, l, u}; }
ArmSpec ArmSpec::gaussian(double mu, double sigma) { return {ArmKind::kGaussian, mu, sigma}; }
ArmSpec ArmSpec::point(double v) { return {ArmKind::kPoint, v, 0.0}; }

double ArmSpec::mean() const {
  switch (kind) {
    case ArmKind::kBernoulli: return a;
    case ArmKind::kUniform: return (a + b) / 2.0;
    case ArmKind::kGaussian: return a;
    case ArmKind::kPoint: return a;
  }
  return 0.0;
}

void ArmSpec::validate() const {
  switch (kind) {
    case ArmKind::kBernoulli:
      if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("bernoulli p must be in [0,1]");
      break;
    case ArmKind::kUniform:
      if (!(a <= b)) throw std::invalid_argument("uniform needs l <= u");
      break;
    case ArmKind::kGaussian:
      if (!(b >= 0.0)) throw std::invalid_argument("gaussian sigma must be >= 0");
      break;
    case ArmKind::kPoint:
      if (!std::isfinite(a)) throw std::invalid_argument("point value must be finite");
      break;
  }
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

double to_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("bad number '" + std::string(s) + "' in arm spec");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string ArmSpec::to_string() const {
  switch (kind) {
    case ArmKind::kBernoulli: return "bernoulli:" + fmt(a);
    case ArmKind::kUniform: return "uniform:" + fmt(a) + ":" + fmt(b);
    case ArmKind::kGaussian: return "gaussian:" + fmt(a) + ":" + fmt(b);
    case ArmKind::kPoint: return "point:" + fmt(a);
  }
  return "?";
}

std::vector<ArmSpec> parse_arms(std::string_view text) {
  std::vector<ArmSpec> arms;
  for (std::string_view item : split(text, ',')) {
    const auto parts = split(item, ':');
    const std::string_view kind = parts[0];
    auto need = [&](std::size_t n) {
      if (parts.size() != n + 1) {
        throw std::invalid_argument("arm '" + std::string(item) + "' needs " +
                                    std::to_string(n) + " parameter(s)");
      }
    };
    ArmSpec spec;
    if (kind == "bernoulli") {
      need(1);
      spec = ArmSpec::bernoulli(to_double(parts[1]));
    } else if (kind == "uniform") {
      need(2);
      spec = ArmSpec::uniform(to_double(parts[1]), to_double(parts[2]));
    } else if (kind == "gaussian") {
      need(2);
      spec = ArmSpec::gaussian(to_double(parts[1]), to_double(parts[2]));
    } else if (kind == "point") {
      need(1);
      spec = ArmSpec::point(to_double(parts[1]));
    } else {
      throw std::invalid_argument("unknown arm kind '" + std::string(kind) + "'");
    }
    spec.validate();
    arms.push_back(spec);
  }
  return arms;
}

std::string format_arms(std::span<const ArmSpec> arms) {
  std::string s;
  for (std::size_t i = 0; i < arms.size(); ++i) {
    if (i) s += ',';
    s += arms[i].to_string();
  }
  return s;
}

ArmSampler::ArmSampler(const ArmSpec& spec, std::uint64_t seed, std::uint64_t arm_index)
    : spec_(spec) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(arm_index), 0x9e3779b9U};
  rng_.seed(seq);
}

double ArmSampler::draw() {
  switch (spec_.kind) {
    case ArmKind::kBernoulli: return std::bernoulli_distribution(spec_.a)(rng_) ? 1.0 : 0.0;
    case ArmKind::kUniform: return std::uniform_real_distribution<double>(spec_.a, spec_.b)(rng_);
    case ArmKind::kGaussian:
      if (spec_.b == 0.0) return spec_.a;
      return std::normal_distribution<double>(spec_.a, spec_.b)(rng_);
    case ArmKind::kPoint: return spec_.a;
  }
  return 0.0;
}

namespace {

double best_mean(std::span<const ArmSpec> arms, Direction direction) {
  double best = arms[0].mean();
  for (const auto& a : arms) {
    best = direction == Direction::kMaximize ? std::max(best, a.mean()) : std::min(best, a.mean());
  }
  return best;
}

double gap(const ArmSpec& arm, double best, Direction direction) {
  return direction == Direction::kMaximize ? best - arm.mean() : arm.mean() - best;
}

}  // namespace

RegretTrace simulate(std::span<const ArmSpec> arms, const PolicyConfig& policy,
                     std::uint64_t horizon, std::uint64_t seed) {
  if (arms.size() < 2) throw std::invalid_argument("simulate needs at least two arms");
  if (horizon < arms.size()) throw std::invalid_argument("horizon must be >= number of arms");
  policy.validate();

  std::vector<ArmSampler> samplers;
  for (std::size_t k = 0; k < arms.size(); ++k) samplers.emplace_back(arms[k], seed, k);
  std::vector<ArmStats> stats(arms.size());
  const double best = best_mean(arms, policy.direction);

  RegretTrace trace;
  trace.pulls.reserve(horizon);
  trace.increments.reserve(horizon);
  trace.cumulative.reserve(horizon + 1);
  trace.cumulative.push_back(0.0);
  for (std::uint64_t step = 0; step < horizon; ++step) {
    // T = pulls so far, at least 1 so ln T is defined.
    const double total = static_cast<double>(std::max<std::uint64_t>(step, 1));
    const std::size_t arm = select_arm(stats, total, policy);
    stats[arm].add(samplers[arm].draw());
    const double inc = gap(arms[arm], best, policy.direction);
    trace.pulls.push_back(static_cast<std::uint32_t>(arm));
    trace.increments.push_back(inc);
    trace.cumulative.push_back(trace.cumulative.back() + inc);
  }
  return trace;
}

double cumulative_regret(std::span<const std::uint32_t> pulls, std::span<const ArmSpec> arms,
                         Direction direction) {
  if (pulls.empty()) return 0.0;
  const double best = best_mean(arms, direction);
  double total = 0.0;
  for (std::uint32_t p : pulls) {
    if (p >= arms.size()) throw ContractViolation("pull references an unknown arm");
    total += gap(arms[p], best, direction);
  }
  return total;
}

double cumulative_regret(const RegretTrace& trace, std::span<const ArmSpec> arms,
                         Direction direction) {
  const double recomputed = cumulative_regret(trace.pulls, arms, direction);
  const double stored = trace.cumulative.empty() ? 0.0 : trace.cumulative.back();
  if (std::abs(recomputed - stored) > 1e-9 * std::max(1.0, std::abs(stored))) {
    throw ContractViolation("regret trace bookkeeping mismatch");
  }
  return recomputed;
}

double ucb1_regret_bound(std::span<const ArmSpec> arms, std::uint64_t horizon,
                         Direction direction) {
  const double best = best_mean(arms, direction);
  const double log_t = std::log(static_cast<double>(horizon));
  double bound = 0.0;
  for (const auto& a : arms) {
    const double g = gap(a, best, direction);
    if (g > 0.0) bound += 8.0 * log_t / g + (1.0 + std::numbers::pi * std::numbers::pi / 3.0) * g;
  }
  return bound;
}

void write_regret_csv(std::ostream& out, std::string_view policy_label,
                      std::span<const ArmSpec> arms, std::uint64_t seed,
                      const RegretTrace& trace, bool header) {
  if (header) out << "policy,arms,seed,T,regret\n";
  const std::uint64_t horizon = trace.pulls.size();
  std::vector<std::uint64_t> points;
  for (std::uint64_t c : kCheckpoints) {
    if (c <= horizon) points.push_back(c);
  }
  if (points.empty() || points.back() != horizon) points.push_back(horizon);
  const std::string arm_text = format_arms(arms);
  for (std::uint64_t t : points) {
    out << policy_label << ",\"" << arm_text << "\"," << seed << ',' << t << ','
        << trace.regret_at(t) << '\n';
  }
}

}  // namespace thts::bandit
