#include "mtbandit/policies.hpp"

#include <cmath>
#include <limits>

#include "mtbandit/error.hpp"

namespace mtbandit {

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::random: return "random";
    case PolicyKind::epsilon_greedy: return "epsilon_greedy";
    case PolicyKind::ucb1: return "ucb1";
    case PolicyKind::linucb: return "linucb";
    case PolicyKind::oracle: return "oracle";
    case PolicyKind::best_arm_oracle: return "best_arm_oracle";
  }
  return "?";
}

PolicyKind policy_kind_from_string(const std::string& text) {
  if (text == "random") return PolicyKind::random;
  if (text == "epsilon_greedy") return PolicyKind::epsilon_greedy;
  if (text == "ucb1") return PolicyKind::ucb1;
  if (text == "linucb") return PolicyKind::linucb;
  if (text == "oracle") return PolicyKind::oracle;
  if (text == "best_arm_oracle") return PolicyKind::best_arm_oracle;
  throw ConfigError("unknown policy kind '" + text + "'");
}

void PolicyConfig::validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("policy.epsilon must lie in [0,1]");
  if (!(alpha >= 0.0)) throw ConfigError("policy.alpha must be nonnegative");
  if (!(lambda > 0.0)) throw ConfigError("policy.lambda must be positive");
  if (resolve_interval == 0) throw ConfigError("policy.resolve_interval must be positive");
}

void MeanTracker::update(std::size_t arm, double reward) {
  auto n = ++counts_.at(arm);
  means_[arm] += (reward - means_[arm]) / static_cast<double>(n);
}

std::uint64_t MeanTracker::total() const {
  std::uint64_t t = 0;
  for (auto c : counts_) t += c;
  return t;
}

std::optional<std::size_t> MeanTracker::first_unpulled() const {
  for (std::size_t k = 0; k < counts_.size(); ++k)
    if (counts_[k] == 0) return k;
  return std::nullopt;
}

LinUcbArm::LinUcbArm(std::size_t dim, double lambda)
    : A(Eigen::MatrixXd::Identity(dim, dim) * lambda),
      A_inv(Eigen::MatrixXd::Identity(dim, dim) / lambda),
      b(Eigen::VectorXd::Zero(dim)) {}

void LinUcbArm::update(const Eigen::VectorXd& x, double reward, std::size_t resolve_interval) {
  A.noalias() += x * x.transpose();
  b += reward * x;
  if (++updates_since_resolve >= resolve_interval) {
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) throw DataError("LinUCB design matrix lost positive definiteness");
    A_inv = llt.solve(Eigen::MatrixXd::Identity(A.rows(), A.cols()));
    updates_since_resolve = 0;
    return;
  }
  // Sherman-Morrison: (A + x x^T)^-1 = A^-1 - (A^-1 x)(A^-1 x)^T / (1 + x^T A^-1 x)
  const Eigen::VectorXd u = A_inv * x;
  A_inv.noalias() -= (u * u.transpose()) / (1.0 + x.dot(u));
}

std::size_t argmax_lowest(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k)
    if (values[k] > values[best]) best = k;
  return best;
}

std::size_t precompute_best_arm(const Dataset& dataset) {
  if (dataset.empty()) throw DataError("precompute_best_arm: empty dataset");
  std::vector<double> sums(dataset.catalog.size(), 0.0);
  for (const auto& r : dataset.records)
    for (std::size_t k = 0; k < sums.size(); ++k) sums[k] += r.arm_scores[k];
  return argmax_lowest(sums);
}

double Policy::ucb1_index(double mean, std::uint64_t pulls, std::uint64_t t) {
  if (pulls == 0) return std::numeric_limits<double>::infinity();
  return mean + std::sqrt(2.0 * std::log(static_cast<double>(t)) / static_cast<double>(pulls));
}

Policy::Policy(const PolicyConfig& config, std::size_t arms, std::uint64_t rng_seed,
               std::optional<std::size_t> context_dim, std::optional<std::size_t> best_arm)
    : config_(config), arms_(arms), rng_(rng_seed) {
  config_.validate();
  if (arms_ == 0) throw ConfigError("policy needs at least one arm");
  switch (config_.kind) {
    case PolicyKind::random:
      state_ = policy_state::Random{};
      break;
    case PolicyKind::epsilon_greedy:
      state_ = policy_state::EpsilonGreedy{MeanTracker(arms)};
      break;
    case PolicyKind::ucb1:
      state_ = policy_state::Ucb1{MeanTracker(arms)};
      break;
    case PolicyKind::linucb: {
      if (!context_dim || *context_dim == 0) throw ConfigError("linucb requires a feature configuration");
      policy_state::LinUcb s;
      s.dim = *context_dim;
      s.arms.assign(arms, LinUcbArm(s.dim, config_.lambda));
      state_ = std::move(s);
      break;
    }
    case PolicyKind::oracle:
      state_ = policy_state::Oracle{};
      break;
    case PolicyKind::best_arm_oracle:
      if (!best_arm || *best_arm >= arms) throw ConfigError("best_arm_oracle requires a valid precomputed arm");
      state_ = policy_state::BestArmOracle{*best_arm};
      break;
  }
}

void Policy::check_context(std::span<const double> context) const {
  if (config_.contextual()) {
    const auto dim = std::get<policy_state::LinUcb>(state_).dim;
    if (context.empty()) throw DataError(to_string(config_.kind) + " called without context");
    if (context.size() != dim)
      throw DataError("context has " + std::to_string(context.size()) + " dims, policy expects " + std::to_string(dim));
  } else if (!context.empty()) {
    throw DataError(to_string(config_.kind) + " is not contextual but received a context");
  }
}

std::size_t Policy::argmax_random_ties(std::span<const double> values) {
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> ties;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] > best) {
      best = values[k];
      ties.assign(1, k);
    } else if (values[k] == best) {
      ties.push_back(k);
    }
  }
  if (ties.size() == 1) return ties.front();
  std::uniform_int_distribution<std::size_t> pick(0, ties.size() - 1);
  return ties[pick(rng_)];
}

std::size_t Policy::choose(std::span<const double> context, std::span<const double> record_scores) {
  check_context(context);
  const std::uint64_t t = ++steps_;
  auto uniform_arm = [&] { return std::uniform_int_distribution<std::size_t>(0, arms_ - 1)(rng_); };

  switch (config_.kind) {
    case PolicyKind::random:
      return uniform_arm();

    case PolicyKind::epsilon_greedy: {
      const auto& tracker = std::get<policy_state::EpsilonGreedy>(state_).tracker;
      std::vector<std::size_t> unpulled;
      for (std::size_t k = 0; k < arms_; ++k)
        if (tracker.counts()[k] == 0) unpulled.push_back(k);
      if (!unpulled.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, unpulled.size() - 1);
        return unpulled[pick(rng_)];
      }
      std::bernoulli_distribution explore(config_.epsilon);
      if (explore(rng_)) return uniform_arm();
      return argmax_random_ties(tracker.means());
    }

    case PolicyKind::ucb1: {
      const auto& tracker = std::get<policy_state::Ucb1>(state_).tracker;
      if (auto k = tracker.first_unpulled()) return *k;
      std::vector<double> index(arms_);
      for (std::size_t k = 0; k < arms_; ++k) index[k] = ucb1_index(tracker.means()[k], tracker.counts()[k], t);
      return argmax_lowest(index);
    }

    case PolicyKind::linucb: {
      const auto& s = std::get<policy_state::LinUcb>(state_);
      const Eigen::Map<const Eigen::VectorXd> x(context.data(), static_cast<Eigen::Index>(context.size()));
      std::vector<double> score(arms_);
      for (std::size_t k = 0; k < arms_; ++k) {
        const auto& arm = s.arms[k];
        const Eigen::VectorXd Ax = arm.A_inv * x;
        const double width = std::sqrt(std::max(0.0, x.dot(Ax)));
        score[k] = Ax.dot(arm.b) + config_.alpha * width;
      }
      return argmax_random_ties(score);
    }

    case PolicyKind::oracle:
      if (record_scores.size() != arms_) throw DataError("oracle needs the record's per-arm scores");
      return argmax_lowest(record_scores);

    case PolicyKind::best_arm_oracle:
      return std::get<policy_state::BestArmOracle>(state_).arm;
  }
  throw ConfigError("unknown policy kind");
}

void Policy::update(std::size_t arm, double reward, std::span<const double> context) {
  if (arm >= arms_) throw DataError("arm " + std::to_string(arm) + " out of range");
  if (!(reward >= 0.0 && reward <= 1.0)) throw DataError("reward " + std::to_string(reward) + " outside [0,1]");
  check_context(context);
  std::visit(
      [&](auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, policy_state::EpsilonGreedy> || std::is_same_v<S, policy_state::Ucb1>) {
          s.tracker.update(arm, reward);
        } else if constexpr (std::is_same_v<S, policy_state::LinUcb>) {
          const Eigen::Map<const Eigen::VectorXd> x(context.data(), static_cast<Eigen::Index>(context.size()));
          s.arms[arm].update(x, reward, config_.resolve_interval);
        }
      },
      state_);
}

}  // namespace mtbandit
