#include "mtbandit/feedback.hpp"

#include <algorithm>
#include <cmath>

#include "mtbandit/error.hpp"

namespace mtbandit {

std::string to_string(FeedbackStyle style) {
  switch (style) {
    case FeedbackStyle::scale: return "scale";
    case FeedbackStyle::granular: return "granular";
    case FeedbackStyle::variance: return "variance";
    case FeedbackStyle::skew: return "skew";
  }
  return "?";
}

FeedbackStyle feedback_style_from_string(const std::string& text) {
  if (text == "scale") return FeedbackStyle::scale;
  if (text == "granular") return FeedbackStyle::granular;
  if (text == "variance") return FeedbackStyle::variance;
  if (text == "skew") return FeedbackStyle::skew;
  throw ConfigError("unknown feedback style '" + text + "'");
}

void FeedbackConfig::validate() const {
  if (bins < 2) throw ConfigError("feedback.bins must be >= 2");
  if (!(sigma0 >= 0.0)) throw ConfigError("feedback.sigma0 must be nonnegative");
  if (!(shrink >= 0.0)) throw ConfigError("feedback.shrink must be nonnegative");
  if (!(skew_factor > 0.0 && skew_factor <= 1.0)) throw ConfigError("feedback.skew_factor must lie in (0,1]");
}

namespace {

void check_range(double bleu) {
  if (!(bleu >= 0.0 && bleu <= 100.0)) throw DataError("feedback input " + std::to_string(bleu) + " outside [0,100]");
}

}  // namespace

double scale(double bleu) {
  check_range(bleu);
  return bleu / 100.0;
}

Rating granularize(double bleu, int bins) {
  check_range(bleu);
  if (bins < 2) throw ConfigError("granularize needs bins >= 2");
  int bin = static_cast<int>(std::floor(bleu * bins / 100.0));
  Rating r;
  r.rating = std::min(bin, bins - 1) + 1;
  r.reward = static_cast<double>(r.rating) / bins;
  return r;
}

double skew(double bleu, double skew_factor) {
  check_range(bleu);
  return skew_factor * (bleu / 100.0);
}

FeedbackSimulator::FeedbackSimulator(FeedbackConfig config, std::uint64_t seed)
    : config_(config), rng_(seed) {
  config_.validate();
}

double FeedbackSimulator::perturb_variance(double bleu) {
  check_range(bleu);
  const double sigma = config_.sigma0 * std::pow(config_.shrink, static_cast<double>(evaluations_));
  const double z = gauss_(rng_);
  ++evaluations_;
  return std::clamp(bleu / 100.0 + sigma * z, 0.0, 1.0);
}

double FeedbackSimulator::operator()(double bleu) {
  double reward = 0.0;
  switch (config_.style) {
    case FeedbackStyle::variance:
      return perturb_variance(bleu);
    case FeedbackStyle::scale:
      reward = scale(bleu);
      break;
    case FeedbackStyle::granular:
      reward = granularize(bleu, config_.bins).reward;
      break;
    case FeedbackStyle::skew:
      reward = skew(bleu, config_.skew_factor);
      break;
  }
  ++evaluations_;
  return reward;
}

}  // namespace mtbandit
