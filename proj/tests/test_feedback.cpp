#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include "mtbandit/error.hpp"
#include "mtbandit/feedback.hpp"
#include "mtbandit/policies.hpp"

using namespace mtbandit;

TEST_CASE("scale") {
  CHECK(scale(0) == 0.0);
  CHECK(scale(100) == 1.0);
  CHECK(scale(29.4) == doctest::Approx(0.294).epsilon(1e-15));
  CHECK_THROWS_AS(scale(-0.1), DataError);
  CHECK_THROWS_AS(scale(100.5), DataError);
}

TEST_CASE("granularize") {
  CHECK(granularize(0, 5).rating == 1);
  CHECK(granularize(0, 5).reward == doctest::Approx(0.2));
  CHECK(granularize(100, 5).rating == 5);
  CHECK(granularize(100, 5).reward == 1.0);
  // floor(37/20) + 1 = 2
  CHECK(granularize(37, 5).rating == 2);
  CHECK(granularize(37, 5).reward == doctest::Approx(0.4));
  CHECK(granularize(19.999, 5).rating == 1);
  CHECK(granularize(20, 5).rating == 2);
  CHECK(granularize(50, 2).rating == 2);
  CHECK_THROWS_AS(granularize(101, 5), DataError);
  CHECK_THROWS_AS(granularize(50, 1), ConfigError);
}

TEST_CASE("skew") {
  CHECK(skew(100, 0.25) == 0.25);
  CHECK(skew(0, 0.25) == 0.0);
  CHECK(skew(40, 0.25) == doctest::Approx(0.10));
  CHECK_THROWS_AS(skew(-1, 0.25), DataError);
}

TEST_CASE("variance with sigma0 = 0 equals scale") {
  FeedbackConfig config;
  config.style = FeedbackStyle::variance;
  config.sigma0 = 0.0;
  FeedbackSimulator sim(config, 1);
  for (double b : {0.0, 12.5, 29.4, 50.0, 99.9, 100.0}) CHECK(sim(b) == scale(b));
  CHECK(sim.evaluations() == 6);
}

TEST_CASE("variance noise is centred on the scaled score") {
  FeedbackConfig config;
  config.style = FeedbackStyle::variance;
  config.sigma0 = 0.1;
  FeedbackSimulator sim(config, 1234);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += sim.perturb_variance(50.0);
  // Standard error 0.1/sqrt(1e5) ~ 3.2e-4; clipping is 5 sd away.
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.004));
  CHECK(std::abs(sum / n - 0.5) <= 0.002);
  CHECK(sim.evaluations() == static_cast<std::uint64_t>(n));
}

TEST_CASE("variance is reproducible and clipped") {
  FeedbackConfig config;
  config.style = FeedbackStyle::variance;
  config.sigma0 = 0.5;
  FeedbackSimulator a(config, 99), b(config, 99), c(config, 100);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    double x = a(95.0), y = b(95.0), z = c(95.0);
    CHECK(x == y);
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
    differs = differs || x != z;
  }
  CHECK(differs);
}

TEST_CASE("shrink below one narrows the noise over time") {
  FeedbackConfig config;
  config.style = FeedbackStyle::variance;
  config.sigma0 = 0.2;
  config.shrink = 0.9;
  FeedbackSimulator sim(config, 3);
  for (int i = 0; i < 400; ++i) sim(40.0);
  // sigma_400 = 0.2 * 0.9^400, effectively zero.
  CHECK(sim(40.0) == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("every style maps into [0,1] monotonically") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  for (int i = 0; i < 5000; ++i) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    CHECK(scale(a) <= scale(b));
    CHECK(granularize(a, 5).reward <= granularize(b, 5).reward);
    CHECK(skew(a, 0.25) <= skew(b, 0.25));
    for (double v : {scale(a), granularize(a, 5).reward, skew(a, 0.25)}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("argmax invariance of the transforms") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> raw(8), scaled(8), skewed(8), granular(8);
    for (std::size_t k = 0; k < 8; ++k) {
      raw[k] = u(rng);
      scaled[k] = scale(raw[k]);
      skewed[k] = skew(raw[k], 0.25);
      granular[k] = granularize(raw[k], 5).reward;
    }
    const auto best = argmax_lowest(raw);
    CHECK(argmax_lowest(scaled) == best);
    CHECK(argmax_lowest(skewed) == best);
    CHECK(granular[best] == *std::max_element(granular.begin(), granular.end()));
  }
}

TEST_CASE("config validation") {
  FeedbackConfig c;
  c.bins = 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.skew_factor = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.sigma0 = -1;
  CHECK_THROWS_AS(FeedbackSimulator(c, 0), ConfigError);
  CHECK_THROWS_AS(feedback_style_from_string("pairwise"), ConfigError);
  CHECK(feedback_style_from_string("skew") == FeedbackStyle::skew);
}
