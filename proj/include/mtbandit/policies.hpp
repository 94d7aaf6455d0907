#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "mtbandit/environment.hpp"
#include "mtbandit/rng.hpp"

namespace mtbandit {

enum class PolicyKind { random, epsilon_greedy, ucb1, linucb, oracle, best_arm_oracle };

std::string to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& text);

struct PolicyConfig {
  PolicyKind kind = PolicyKind::epsilon_greedy;
  double epsilon = 0.3;
  double alpha = 1.0;
  double lambda = 1.0;
  std::uint64_t seed = 0;
  /// Sherman-Morrison updates between full re-inversions of A_k.
  std::size_t resolve_interval = 1000;
  /// Report label; defaults to the kind name.
  std::string label;

  bool contextual() const { return kind == PolicyKind::linucb; }
  std::string display_name() const { return label.empty() ? to_string(kind) : label; }
  void validate() const;
};

/// Pull counts and running mean reward per arm.
class MeanTracker {
 public:
  explicit MeanTracker(std::size_t arms = 0) : counts_(arms, 0), means_(arms, 0.0) {}

  void update(std::size_t arm, double reward);
  std::size_t arms() const { return counts_.size(); }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  const std::vector<double>& means() const { return means_; }
  std::uint64_t total() const;
  /// Lowest-index arm never updated, if any.
  std::optional<std::size_t> first_unpulled() const;

 private:
  std::vector<std::uint64_t> counts_;
  std::vector<double> means_;
};

/// Disjoint ridge model of one arm: A = lambda*I + sum x x^T, b = sum r x.
struct LinUcbArm {
  Eigen::MatrixXd A;
  Eigen::MatrixXd A_inv;
  Eigen::VectorXd b;
  std::size_t updates_since_resolve = 0;

  LinUcbArm(std::size_t dim, double lambda);
  Eigen::VectorXd theta() const { return A_inv * b; }
  void update(const Eigen::VectorXd& x, double reward, std::size_t resolve_interval);
};

namespace policy_state {
struct Random {};
struct EpsilonGreedy {
  MeanTracker tracker;
};
struct Ucb1 {
  MeanTracker tracker;
};
struct LinUcb {
  std::size_t dim = 0;
  std::vector<LinUcbArm> arms;
};
struct Oracle {};
struct BestArmOracle {
  std::size_t arm = 0;
};
}  // namespace policy_state

using PolicyState = std::variant<policy_state::Random, policy_state::EpsilonGreedy, policy_state::Ucb1,
                                 policy_state::LinUcb, policy_state::Oracle, policy_state::BestArmOracle>;

/// Uniform choose/update contract over all arm-selection strategies.
class Policy {
 public:
  /// context_dim is required for contextual kinds; best_arm for best_arm_oracle.
  Policy(const PolicyConfig& config, std::size_t arms, std::uint64_t rng_seed,
         std::optional<std::size_t> context_dim = std::nullopt, std::optional<std::size_t> best_arm = std::nullopt);

  /// record_scores holds the raw per-arm scores; only oracle kinds read it.
  std::size_t choose(std::span<const double> context, std::span<const double> record_scores);
  void update(std::size_t arm, double reward, std::span<const double> context);

  const PolicyConfig& config() const { return config_; }
  std::size_t arms() const { return arms_; }
  /// Number of choose calls answered so far.
  std::uint64_t steps() const { return steps_; }
  const PolicyState& state() const { return state_; }

  /// UCB1 index of one arm at step t; +inf for an unpulled arm.
  static double ucb1_index(double mean, std::uint64_t pulls, std::uint64_t t);

 private:
  std::size_t argmax_random_ties(std::span<const double> values);
  void check_context(std::span<const double> context) const;

  PolicyConfig config_;
  std::size_t arms_;
  Rng rng_;
  std::uint64_t steps_ = 0;
  PolicyState state_;
};

/// Column with the highest mean score across the dataset; ties go to the lowest index.
std::size_t precompute_best_arm(const Dataset& dataset);

/// Index of the largest value; ties go to the lowest index.
std::size_t argmax_lowest(std::span<const double> values);

}  // namespace mtbandit
