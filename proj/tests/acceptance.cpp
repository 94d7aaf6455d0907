// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mtbandit/commands.hpp"
#include "mtbandit/config.hpp"
#include "mtbandit/evaluation.hpp"
#include "mtbandit/features.hpp"
#include "mtbandit/policies.hpp"
#include "mtbandit/scoring.hpp"
#include "mtbandit/synth.hpp"
#include "test_util.hpp"

using namespace mtbandit;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double budget_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("[%s] %d %s: %s (%.2fs, budget %.0fs)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(),
              secs, budget_s);
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

Dataset synth_dataset(const SynthSpec& spec) {
  Dataset ds;
  ds.catalog = ArmCatalog(spec.arms);
  ds.records = generate(spec);
  return ds;
}

// Eight arms, one domain, best arm 10 points above the next.
SynthSpec single_domain_spec(std::uint64_t seed) {
  SynthSpec s;
  s.arms = testutil::arm_names(8);
  s.domains = {"general"};
  s.means = {{50}, {40}, {35}, {30}, {25}, {20}, {15}, {10}};
  s.sigma = 5.0;
  s.records_per_domain = 2000;
  s.seed = seed;
  return s;
}

// ---- 1 ------------------------------------------------------------------

Outcome oracle_zero_regret() {
  std::mt19937_64 rng(11);
  std::size_t bad = 0;
  const std::size_t cases = 150;
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t k = 2 + rng() % 7, n = 1 + rng() % 200;
    auto ds = testutil::random_dataset(rng, n, k, {"x", "y", "z"});
    SimulationSetup setup;
    setup.plan.kind = static_cast<ScheduleKind>(rng() % 3);
    setup.plan.block_size = 1 + rng() % 20;
    setup.policy.kind = PolicyKind::oracle;
    setup.seed = rng();
    auto log = run_simulation(ds, setup);
    bool ok = log.size() == n && log.cumulative_regret() == 0.0;
    for (const auto& s : log.steps) ok = ok && s.regret == 0.0;
    bad += !ok;
  }
  return {bad == 0, std::to_string(cases - bad) + "/" + std::to_string(cases) + " datasets with regret exactly 0"};
}

// ---- 2 ------------------------------------------------------------------

Outcome closed_forms() {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double ucb_err = 0.0;
  std::size_t ucb_choice_mismatch = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + rng() % 5;
    PolicyConfig cfg;
    cfg.kind = PolicyKind::ucb1;
    Policy p(cfg, k, rng());
    std::vector<double> sum(k, 0.0);
    std::vector<std::uint64_t> n(k, 0);
    for (std::uint64_t t = 1; t <= 60; ++t) {
      // Expected choice from the hand formula mean + sqrt(2 ln t / n).
      std::vector<double> idx(k);
      std::size_t expected = k;
      for (std::size_t a = 0; a < k; ++a) {
        if (n[a] == 0) {
          if (expected == k) expected = a;
          idx[a] = INFINITY;
          continue;
        }
        const double mean = sum[a] / static_cast<double>(n[a]);
        idx[a] = mean + std::sqrt(2.0 * std::log(static_cast<double>(t)) / static_cast<double>(n[a]));
        ucb_err = std::max(ucb_err, std::abs(idx[a] - Policy::ucb1_index(mean, n[a], t)));
      }
      if (expected == k) expected = argmax_lowest(idx);
      const auto arm = p.choose({}, {});
      if (arm != expected) ++ucb_choice_mismatch;
      const double r = unit(rng);
      p.update(arm, r, {});
      sum[arm] += r;
      ++n[arm];
    }
  }

  double lin_err = 0.0;
  const std::size_t d = 5, arms = 3;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    PolicyConfig cfg;
    cfg.kind = PolicyKind::linucb;
    cfg.lambda = 0.5 + unit(rng);
    Policy p(cfg, arms, rng(), d);
    std::vector<std::vector<Eigen::VectorXd>> xs(arms);
    std::vector<std::vector<double>> ys(arms);
    for (int u = 0; u < 50; ++u) {
      Eigen::VectorXd x(d);
      for (std::size_t i = 0; i < d; ++i) x[i] = normal(rng);
      const std::size_t arm = rng() % arms;
      const double r = unit(rng);
      p.update(arm, r, std::span<const double>(x.data(), d));
      xs[arm].push_back(x);
      ys[arm].push_back(r);
    }
    const auto& state = std::get<policy_state::LinUcb>(p.state());
    for (std::size_t a = 0; a < arms; ++a) {
      Eigen::MatrixXd X(xs[a].size(), d);
      Eigen::VectorXd y(xs[a].size());
      for (std::size_t i = 0; i < xs[a].size(); ++i) {
        X.row(static_cast<Eigen::Index>(i)) = xs[a][i].transpose();
        y[static_cast<Eigen::Index>(i)] = ys[a][i];
      }
      Eigen::MatrixXd A = cfg.lambda * Eigen::MatrixXd::Identity(d, d) + X.transpose() * X;
      Eigen::VectorXd theta = A.ldlt().solve(X.transpose() * y);
      lin_err = std::max(lin_err, (theta - state.arms[a].theta()).cwiseAbs().maxCoeff());
    }
  }
  const bool ok = ucb_err <= 1e-9 && ucb_choice_mismatch == 0 && lin_err <= 1e-6;
  return {ok, "UCB1 max |index diff| " + fmt(ucb_err) + ", choice mismatches " + std::to_string(ucb_choice_mismatch) +
                  "; LinUCB max |theta diff| " + fmt(lin_err)};
}

// ---- 3 ------------------------------------------------------------------

// Quadratic scan: for every hypothesis n-gram position count how many equal
// positions occur in hyp and in ref, and clip. Each distinct gram is counted once.
long brute_matches(const Tokens& hyp, const Tokens& ref, int n) {
  auto gram_at = [n](const Tokens& s, std::size_t i) { return std::vector<std::string>(s.begin() + i, s.begin() + i + n); };
  const auto un = static_cast<std::size_t>(n);
  long matched = 0;
  if (hyp.size() < un) return 0;
  for (std::size_t i = 0; i + un <= hyp.size(); ++i) {
    const auto g = gram_at(hyp, i);
    bool seen = false;
    for (std::size_t j = 0; j < i && !seen; ++j) seen = gram_at(hyp, j) == g;
    if (seen) continue;
    long in_hyp = 0, in_ref = 0;
    for (std::size_t j = 0; j + un <= hyp.size(); ++j) in_hyp += gram_at(hyp, j) == g;
    for (std::size_t j = 0; j + un <= ref.size(); ++j) in_ref += gram_at(ref, j) == g;
    matched += std::min(in_hyp, in_ref);
  }
  return matched;
}

double brute_bleu(const std::vector<std::pair<Tokens, Tokens>>& pairs, bool smoothed) {
  double hl = 0, rl = 0;
  double m[4] = {0, 0, 0, 0}, t[4] = {0, 0, 0, 0};
  for (const auto& [h, r] : pairs) {
    hl += static_cast<double>(h.size());
    rl += static_cast<double>(r.size());
    for (int n = 1; n <= 4; ++n) {
      m[n - 1] += static_cast<double>(brute_matches(h, r, n));
      t[n - 1] += std::max(0.0, static_cast<double>(h.size()) - n + 1);
    }
  }
  if (hl == 0) return 0.0;
  double log_p = 0.0;
  for (int n = 0; n < 4; ++n) {
    const double a = m[n] + (smoothed && n > 0 ? 1 : 0), b = t[n] + (smoothed && n > 0 ? 1 : 0);
    if (a == 0 || b == 0) return 0.0;
    log_p += std::log(a / b);
  }
  const double bp = hl >= rl ? 1.0 : std::exp(1.0 - rl / hl);
  return 100.0 * bp * std::exp(log_p / 4);
}

Outcome bleu_equivalence() {
  std::mt19937_64 rng(31);
  auto sentence = [&](std::size_t lo, std::size_t hi) {
    Tokens t(lo + rng() % (hi - lo + 1));
    for (auto& w : t) w = std::string(1, static_cast<char>('a' + rng() % 5));
    return t;
  };
  double max_err = 0.0;
  bool identical_100 = true;
  for (int c = 0; c < 200; ++c) {
    std::vector<std::pair<Tokens, Tokens>> corpus;
    const std::size_t lines = 1 + rng() % 6;
    for (std::size_t i = 0; i < lines; ++i) corpus.emplace_back(sentence(0, 12), sentence(1, 12));
    for (const auto& [h, r] : corpus)
      max_err = std::max(max_err, std::abs(sentence_bleu(h, r).score - brute_bleu({{h, r}}, true)));
    max_err = std::max(max_err, std::abs(corpus_bleu(corpus).score - brute_bleu(corpus, false)));

    std::vector<std::pair<Tokens, Tokens>> same;
    for (std::size_t i = 0; i < lines; ++i) {
      auto r = sentence(4, 12);
      same.emplace_back(r, r);
    }
    identical_100 = identical_100 && corpus_bleu(same).score == 100.0;
  }
  return {max_err <= 1e-12 && identical_100,
          "max |diff| " + fmt(max_err) + ", hyp=ref corpus BLEU exactly 100: " + (identical_100 ? "yes" : "no")};
}

// ---- 4 / 6 --------------------------------------------------------------

RunLog single_domain_run(std::uint64_t seed, const FeedbackConfig& feedback) {
  auto ds = synth_dataset(single_domain_spec(1000 + seed));
  SimulationSetup setup;
  setup.plan.kind = ScheduleKind::shuffled_mixture;
  setup.policy.kind = PolicyKind::epsilon_greedy;
  setup.policy.epsilon = 0.3;
  setup.feedback = feedback;
  setup.seed = seed;
  setup.max_steps = 2000;
  return run_simulation(ds, setup);
}

Outcome single_domain_convergence() {
  FeedbackConfig fb;
  fb.style = FeedbackStyle::scale;
  double share_sum = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto log = single_domain_run(seed, fb);
    std::size_t best = 0;
    for (std::size_t i = log.size() - 500; i < log.size(); ++i) best += log.steps[i].arm == 0;
    share_sum += static_cast<double>(best) / 500.0;
  }
  const double share = share_sum / 20.0;
  return {share >= 0.55, "mean best-arm share over last 500 steps " + fmt(share) + " (need >= 0.55)"};
}

Outcome feedback_robustness() {
  std::vector<std::pair<std::string, FeedbackConfig>> styles;
  FeedbackConfig f;
  f.style = FeedbackStyle::scale;
  styles.emplace_back("scale", f);
  f = {};
  f.style = FeedbackStyle::granular;
  styles.emplace_back("granular", f);
  f = {};
  f.style = FeedbackStyle::variance;
  f.sigma0 = 0.1;
  styles.emplace_back("variance", f);
  f = {};
  f.style = FeedbackStyle::skew;
  f.skew_factor = 0.25;
  styles.emplace_back("skew", f);

  bool ok = true;
  std::string detail;
  for (const auto& [name, cfg] : styles) {
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      auto log = single_domain_run(seed, cfg);
      std::vector<std::size_t> pulls(8, 0);
      for (std::size_t i = log.size() - 500; i < log.size(); ++i) ++pulls[log.steps[i].arm];
      hits += std::max_element(pulls.begin(), pulls.end()) - pulls.begin() == 0;
    }
    ok = ok && hits >= 18;
    detail += (detail.empty() ? "" : ", ") + name + " " + std::to_string(hits) + "/20";
  }
  return {ok, detail + " (need >= 18 each)"};
}

// ---- 5 ------------------------------------------------------------------

Outcome mixed_domain_win() {
  int lift_wins = 0, regret_wins = 0;
  double lift_sum = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto ds = synth_dataset(table1_spec(1700, 5.0, 500 + seed));
    SimulationSetup setup;
    setup.plan.kind = ScheduleKind::shuffled_mixture;
    setup.feedback.style = FeedbackStyle::scale;
    setup.seed = seed;
    setup.max_steps = 5000;
    FeatureConfig features;
    features.blocks = {FeatureBlock::emb};
    features.emb_prefix_len = 3;

    setup.policy.kind = PolicyKind::linucb;
    setup.features = features;
    auto lin = run_simulation(ds, setup);
    setup.features.reset();
    setup.policy.kind = PolicyKind::epsilon_greedy;
    auto eg = run_simulation(ds, setup);
    setup.policy.kind = PolicyKind::ucb1;
    auto ucb = run_simulation(ds, setup);

    const auto summary = summarize(lin, ds);
    double tail = 0.0;
    for (std::size_t i = lin.size() - 1000; i < lin.size(); ++i) tail += lin.steps[i].raw;
    const double lift = tail / 1000.0 - summary.best_arm_mean_raw;
    lift_sum += lift;
    lift_wins += lift >= 5.0;
    regret_wins += lin.cumulative_regret() < eg.cumulative_regret() && lin.cumulative_regret() < ucb.cumulative_regret();
  }
  return {lift_wins >= 18 && regret_wins >= 16,
          "lift >= 5 in " + std::to_string(lift_wins) + "/20 (mean lift " + fmt(lift_sum / 20) +
              "), regret below eps-greedy and UCB1 in " + std::to_string(regret_wins) + "/20"};
}

// ---- 7 ------------------------------------------------------------------

Outcome cyclic_tracking() {
  SynthSpec spec;
  spec.arms = testutil::arm_names(8);
  spec.domains = {"d0", "d1", "d2"};
  spec.means.assign(8, {30, 30, 30});
  spec.means[0][0] = 60;
  spec.means[4][1] = 60;
  spec.means[7][2] = 60;
  spec.means[1] = {40, 40, 40};
  spec.sigma = 0.0;
  spec.records_per_domain = 400;
  spec.seed = 7;
  auto ds = synth_dataset(spec);

  SimulationSetup setup;
  setup.plan.kind = ScheduleKind::cyclic_blocks;
  setup.plan.block_size = 100;
  setup.policy.kind = PolicyKind::linucb;
  setup.feedback.style = FeedbackStyle::scale;
  FeatureConfig features;
  features.blocks = {FeatureBlock::emb};
  features.emb_prefix_len = 3;
  setup.features = features;
  setup.max_steps = 1000;
  auto log = run_simulation(ds, setup);
  auto heat = decision_heatmap(log, 100);

  const std::map<std::string, std::size_t> best{{"d0", 0}, {"d1", 4}, {"d2", 7}};
  double worst = 1.0;
  std::size_t blocks = 0;
  for (std::size_t c = heat.columns() / 2; c < heat.columns(); ++c) {
    const auto& domain = log.steps[heat.column_starts[c] - 1].domain;
    worst = std::min(worst, heat.cells[best.at(domain)][c]);
    ++blocks;
  }
  return {log.size() == 1000 && blocks == 5 && worst >= 0.7,
          "min best-arm mass over " + std::to_string(blocks) + " second-half blocks " + fmt(worst) + " (need >= 0.7)"};
}

// ---- 8 ------------------------------------------------------------------

Outcome determinism() {
  testutil::TempDir dir("acceptance");
  testutil::write_file(dir / "config.json", R"({
    "synth": {"preset": "table1", "records_per_domain": 200, "sigma": 5, "seed": 4},
    "schedule": {"kind": "shuffled_mixture"},
    "policy": {"kind": "linucb", "alpha": 0.5},
    "feedback": {"style": "variance", "sigma0": 0.1},
    "features": {"blocks": ["bias", "len", "emb"], "emb_prefix_len": 3},
    "seeds": [17]
  })");
  std::ostringstream sink;
  for (const char* out : {"a", "b"}) {
    auto cfg = load_config(dir / "config.json");
    cfg.output_dir = dir / out;
    cmd_run(cfg, sink);
  }
  bool same = true;
  for (const char* f : {"run.log.jsonl", "summary.json", "heatmap.csv"}) {
    const auto a = testutil::read_file(dir / "a" / f), b = testutil::read_file(dir / "b" / f);
    same = same && !a.empty() && a == b;
  }
  return {same, std::string("run log, summary and heatmap ") + (same ? "byte-identical" : "differ")};
}

// ---- 9 ------------------------------------------------------------------

Outcome feature_correctness() {
  std::mt19937_64 rng(91);
  FeatureConfig cfg;
  cfg.blocks = {FeatureBlock::bias, FeatureBlock::oov, FeatureBlock::len, FeatureBlock::emb};
  cfg.vocab = Vocabulary{"v0", "v1", "v2", "v3", "v4", "v5"};
  std::normal_distribution<double> normal(0.0, 1.0);
  int bad = 0;
  for (int c = 0; c < 500; ++c) {
    EvalRecord r;
    r.id = "r";
    r.domain = "d";
    const std::size_t len = 1 + rng() % 30;
    std::size_t unknown = 0;
    for (std::size_t i = 0; i < len; ++i) {
      const bool known = rng() % 4 != 0;
      r.source_tokens.push_back(known ? "v" + std::to_string(rng() % 6) : "u" + std::to_string(i));
      unknown += !known;
    }
    r.arm_scores = {1, 2};
    std::vector<double> emb(50 + rng() % 30);
    for (auto& v : emb) v = normal(rng);
    r.embedding = emb;

    auto fv = featurize(r, cfg);
    // Layout: bias(1), oov(1), len(5 bins: <=5, <=10, <=15, <=20, more), emb(50).
    bool ok = fv.size() == 1 + 1 + 5 + 50;
    ok = ok && fv.values[0] == 1.0;
    const double rate = static_cast<double>(unknown) / static_cast<double>(len);
    ok = ok && fv.values[1] == (rate > 0.1 ? 1.0 : 0.0);
    const std::size_t expected_bin = len <= 5 ? 0 : len <= 10 ? 1 : len <= 15 ? 2 : len <= 20 ? 3 : 4;
    double ones = 0.0;
    for (std::size_t b = 0; b < 5; ++b) {
      const double v = fv.values[2 + b];
      ok = ok && (v == 0.0 || v == 1.0);
      ones += v;
      if (b == expected_bin) ok = ok && v == 1.0;
    }
    ok = ok && ones == 1.0;
    for (std::size_t i = 0; i < 50; ++i) ok = ok && fv.values[7 + i] == emb[i];
    bad += !ok;
  }
  return {bad == 0, std::to_string(500 - bad) + "/500 records match the hand-computed vector"};
}

}  // namespace

int main() {
  criterion(1, "oracle zero regret", 1, oracle_zero_regret);
  criterion(2, "closed-form equivalence", 5, closed_forms);
  criterion(3, "BLEU brute-force equivalence", 5, bleu_equivalence);
  criterion(4, "single-domain convergence", 10, single_domain_convergence);
  criterion(5, "mixed-domain contextual win", 60, mixed_domain_win);
  criterion(6, "feedback robustness", 30, feedback_robustness);
  criterion(7, "cyclic-domain tracking", 10, cyclic_tracking);
  criterion(8, "determinism", 5, determinism);
  criterion(9, "feature correctness", 1, feature_correctness);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
