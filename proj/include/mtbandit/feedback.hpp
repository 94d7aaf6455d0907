#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "mtbandit/rng.hpp"

namespace mtbandit {

enum class FeedbackStyle { scale, granular, variance, skew };

std::string to_string(FeedbackStyle style);
FeedbackStyle feedback_style_from_string(const std::string& text);

struct FeedbackConfig {
  FeedbackStyle style = FeedbackStyle::granular;
  int bins = 5;
  double sigma0 = 0.1;
  /// Per-evaluation multiplier on sigma: sigma_n = sigma0 * shrink^n.
  double shrink = 1.0;
  double skew_factor = 0.25;
  std::uint64_t seed_offset = 0;

  void validate() const;
};

struct Rating {
  int rating = 1;
  double reward = 0.0;
};

// Stateless transforms. All take a score on the 0-100 scale and throw
// DataError when it is out of range.
double scale(double bleu);
Rating granularize(double bleu, int bins);
double skew(double bleu, double skew_factor);

/// Per-run simulated user. Owns the noise stream and the evaluation counter.
class FeedbackSimulator {
 public:
  FeedbackSimulator(FeedbackConfig config, std::uint64_t seed);

  /// Reward in [0,1] for a raw sentence score; increments the evaluation counter.
  double operator()(double bleu);

  /// Gaussian perturbation around bleu/100, clipped to [0,1]. Consumes one draw.
  double perturb_variance(double bleu);

  std::uint64_t evaluations() const { return evaluations_; }
  const FeedbackConfig& config() const { return config_; }

 private:
  FeedbackConfig config_;
  Rng rng_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
  std::uint64_t evaluations_ = 0;
};

}  // namespace mtbandit
