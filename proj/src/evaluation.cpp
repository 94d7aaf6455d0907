#include "mtbandit/evaluation.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "json.hpp"
#include "mtbandit/error.hpp"
#include "mtbandit/rng.hpp"
#include "mtbandit/scoring.hpp"

namespace mtbandit {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string format_number(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::uint64_t schedule_seed(const SchedulePlan& plan, std::uint64_t master_seed) {
  return derive_seed(master_seed, {kScheduleStream, plan.seed});
}

RunLog run_simulation(const Dataset& dataset, const SimulationSetup& setup) {
  if (dataset.empty()) throw DataError("run_simulation: empty dataset");
  const std::size_t arms = dataset.catalog.size();
  if (setup.policy.contextual() && !setup.features)
    throw ConfigError(to_string(setup.policy.kind) + " requires a feature configuration");

  std::optional<std::size_t> dim;
  if (setup.policy.contextual()) {
    setup.features->validate();
    std::size_t d = 0;
    for (const auto& b : feature_layout(*setup.features)) d += b.width;
    dim = d;
  }
  std::optional<std::size_t> best_arm;
  if (setup.policy.kind == PolicyKind::best_arm_oracle) best_arm = precompute_best_arm(dataset);

  SchedulePlan plan = setup.plan;
  plan.seed = schedule_seed(setup.plan, setup.seed);
  auto stream = build_schedule(dataset, plan);

  Policy policy(setup.policy, arms, derive_seed(setup.seed, {kPolicyStream, setup.policy.seed}), dim, best_arm);
  FeedbackSimulator feedback(setup.feedback, derive_seed(setup.seed, {kFeedbackStream, setup.feedback.seed_offset}));

  RunLog log;
  log.meta.seed = setup.seed;
  log.meta.arm_names = dataset.catalog.names();
  log.meta.policy = setup.policy;
  log.meta.feedback = setup.feedback;
  log.meta.plan = setup.plan;

  const std::size_t limit = setup.max_steps.value_or(stream.size());
  log.steps.reserve(std::min(limit, stream.size()));
  double cumulative = 0.0;
  while (log.steps.size() < limit) {
    const EvalRecord* record = stream.next();
    if (!record) break;
    const std::uint64_t t = log.steps.size() + 1;
    try {
      std::vector<double> context;
      if (dim) {
        context = featurize(*record, *setup.features).values;
        if (context.size() != *dim)
          throw DataError("feature vector length " + std::to_string(context.size()) + " differs from " +
                          std::to_string(*dim));
      }
      const std::size_t arm = policy.choose(context, record->arm_scores);
      const double raw = record->arm_scores[arm];
      const double reward = feedback(raw);
      policy.update(arm, reward, context);

      StepTrace s;
      s.t = t;
      s.record_id = record->id;
      s.domain = record->domain;
      s.arm = arm;
      s.feedback = reward;
      s.raw = raw;
      s.oracle_arm = argmax_lowest(record->arm_scores);
      s.oracle_raw = record->arm_scores[s.oracle_arm];
      s.regret = s.oracle_raw - raw;
      cumulative += s.regret;
      s.regret_cum = cumulative;
      log.steps.push_back(std::move(s));
    } catch (const DataError& e) {
      throw DataError("step " + std::to_string(t) + ": " + e.what());
    } catch (const ConfigError& e) {
      throw ConfigError("step " + std::to_string(t) + ": " + e.what());
    }
  }
  return log;
}

std::string step_to_line(const StepTrace& step) {
  ordered_json j;
  j["t"] = step.t;
  j["record_id"] = step.record_id;
  j["domain"] = step.domain;
  j["arm"] = step.arm;
  j["feedback"] = step.feedback;
  j["raw"] = step.raw;
  j["oracle_arm"] = step.oracle_arm;
  j["oracle_raw"] = step.oracle_raw;
  j["regret_cum"] = step.regret_cum;
  return j.dump();
}

StepTrace step_from_line(const std::string& line) {
  try {
    const auto j = json::parse(line);
    StepTrace s;
    s.t = j.at("t").get<std::uint64_t>();
    s.record_id = j.at("record_id").get<std::string>();
    s.domain = j.at("domain").get<std::string>();
    s.arm = j.at("arm").get<std::size_t>();
    s.feedback = j.at("feedback").get<double>();
    s.raw = j.at("raw").get<double>();
    s.oracle_arm = j.at("oracle_arm").get<std::size_t>();
    s.oracle_raw = j.at("oracle_raw").get<double>();
    s.regret_cum = j.at("regret_cum").get<double>();
    s.regret = s.oracle_raw - s.raw;
    return s;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed step line: ") + e.what());
  }
}

void write_steps(std::ostream& out, const RunLog& log) {
  for (const auto& s : log.steps) out << step_to_line(s) << '\n';
}

RunLog read_steps(std::istream& in, std::vector<std::string> arm_names) {
  RunLog log;
  log.meta.arm_names = std::move(arm_names);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      log.steps.push_back(step_from_line(line));
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(lineno) + ": " + e.what());
    }
    if (log.steps.back().t != log.steps.size())
      throw DataError("line " + std::to_string(lineno) + ": steps must be contiguous from t=1");
  }
  std::size_t max_arm = 0;
  for (const auto& s : log.steps) max_arm = std::max({max_arm, s.arm, s.oracle_arm});
  if (log.meta.arm_names.empty()) {
    for (std::size_t k = 0; k <= max_arm && !log.steps.empty(); ++k) log.meta.arm_names.push_back("arm" + std::to_string(k));
  } else if (!log.steps.empty() && max_arm >= log.meta.arm_names.size()) {
    throw DataError("log references arm " + std::to_string(max_arm) + " but only " +
                    std::to_string(log.meta.arm_names.size()) + " arm names were given");
  }
  return log;
}

Heatmap decision_heatmap(const RunLog& log, std::size_t interval) {
  if (interval == 0) throw ConfigError("heatmap interval must be >= 1");
  if (log.steps.empty()) throw DataError("decision_heatmap: empty log");
  Heatmap h;
  h.arm_names = log.meta.arm_names;
  h.interval = interval;
  const std::size_t T = log.steps.size();
  const std::size_t cols = (T + interval - 1) / interval;
  h.cells.assign(h.arm_names.size(), std::vector<double>(cols, 0.0));
  for (std::size_t j = 0; j < cols; ++j) {
    const std::size_t begin = j * interval;
    const std::size_t end = std::min(T, begin + interval);
    h.column_starts.push_back(begin + 1);
    std::vector<std::size_t> counts(h.arm_names.size(), 0);
    for (std::size_t i = begin; i < end; ++i) {
      if (log.steps[i].arm >= counts.size()) throw DataError("log arm index exceeds arm catalog");
      ++counts[log.steps[i].arm];
    }
    for (std::size_t k = 0; k < counts.size(); ++k)
      h.cells[k][j] = static_cast<double>(counts[k]) / static_cast<double>(end - begin);
  }
  return h;
}

void write_heatmap_csv(std::ostream& out, const Heatmap& heatmap) {
  out << "arm";
  for (auto c : heatmap.column_starts) out << ',' << c;
  out << '\n';
  for (std::size_t k = 0; k < heatmap.arm_names.size(); ++k) {
    out << heatmap.arm_names[k];
    for (double v : heatmap.cells[k]) out << ',' << format_number(v);
    out << '\n';
  }
}

RunSummary summarize(const RunLog& log, const Dataset& dataset) {
  if (log.steps.empty()) throw DataError("summarize: empty log");
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < dataset.size(); ++i) by_id.emplace(dataset.records[i].id, i);

  const std::size_t arms = dataset.catalog.size();
  RunSummary s;
  s.policy = log.meta.policy.display_name();
  s.seed = log.meta.seed;
  s.steps = log.steps.size();
  s.pulls.assign(arms, 0);

  std::vector<const EvalRecord*> records;
  records.reserve(log.steps.size());
  double feedback_sum = 0.0, raw_sum = 0.0, oracle_sum = 0.0;
  std::vector<double> column_sums(arms, 0.0);
  for (const auto& step : log.steps) {
    auto it = by_id.find(step.record_id);
    if (it == by_id.end()) throw DataError("log step " + std::to_string(step.t) + " references unknown record '" + step.record_id + "'");
    const auto& rec = dataset.records[it->second];
    if (step.arm >= arms) throw DataError("log step " + std::to_string(step.t) + " arm out of range");
    if (rec.arm_scores[step.arm] != step.raw)
      throw DataError("log step " + std::to_string(step.t) + " raw score disagrees with dataset");
    records.push_back(&rec);
    ++s.pulls[step.arm];
    feedback_sum += step.feedback;
    raw_sum += step.raw;
    oracle_sum += step.oracle_raw;
    for (std::size_t k = 0; k < arms; ++k) column_sums[k] += rec.arm_scores[k];
  }
  const double T = static_cast<double>(s.steps);
  s.cumulative_regret = log.cumulative_regret();
  s.average_regret = s.cumulative_regret / T;
  s.average_feedback = feedback_sum / T;
  s.mean_chosen_raw = raw_sum / T;
  s.best_arm = argmax_lowest(column_sums);
  s.best_arm_mean_raw = column_sums[s.best_arm] / T;
  s.oracle_mean_raw = oracle_sum / T;
  s.best_arm_average_regret = s.oracle_mean_raw - s.best_arm_mean_raw;

  bool have_text = true;
  for (const auto* r : records) have_text = have_text && r->reference_tokens && r->arm_hypotheses;
  if (have_text) {
    auto corpus = [&](auto pick) {
      std::vector<std::pair<Tokens, Tokens>> pairs;
      for (std::size_t i = 0; i < records.size(); ++i)
        pairs.emplace_back((*records[i]->arm_hypotheses)[pick(i)], *records[i]->reference_tokens);
      return corpus_bleu(pairs).score;
    };
    s.corpus_bleu = corpus([&](std::size_t i) { return log.steps[i].arm; });
    s.best_arm_corpus_bleu = corpus([&](std::size_t) { return s.best_arm; });
    s.oracle_corpus_bleu = corpus([&](std::size_t i) { return log.steps[i].oracle_arm; });
  }
  return s;
}

namespace {

ordered_json meta_to_json(const RunMeta& meta) {
  ordered_json m;
  m["seed"] = meta.seed;
  m["arms"] = meta.arm_names;
  m["policy"] = {{"kind", to_string(meta.policy.kind)},
                 {"label", meta.policy.display_name()},
                 {"epsilon", meta.policy.epsilon},
                 {"alpha", meta.policy.alpha},
                 {"lambda", meta.policy.lambda},
                 {"seed", meta.policy.seed}};
  m["feedback"] = {{"style", to_string(meta.feedback.style)},
                   {"bins", meta.feedback.bins},
                   {"sigma0", meta.feedback.sigma0},
                   {"shrink", meta.feedback.shrink},
                   {"skew_factor", meta.feedback.skew_factor},
                   {"seed", meta.feedback.seed_offset}};
  ordered_json plan;
  plan["kind"] = to_string(meta.plan.kind);
  plan["block_size"] = meta.plan.block_size;
  plan["domain_order"] = meta.plan.domain_order;
  plan["mixture_ratios"] = meta.plan.mixture_ratios;
  plan["seed"] = meta.plan.seed;
  m["schedule"] = std::move(plan);
  return m;
}

}  // namespace

std::string summary_to_json(const RunSummary& s, const RunMeta& meta) {
  ordered_json j;
  j["policy"] = s.policy;
  j["seed"] = s.seed;
  j["steps"] = s.steps;
  j["cumulative_regret"] = s.cumulative_regret;
  j["average_regret"] = s.average_regret;
  j["average_feedback"] = s.average_feedback;
  j["mean_chosen_raw"] = s.mean_chosen_raw;
  ordered_json pulls;
  for (std::size_t k = 0; k < s.pulls.size(); ++k)
    pulls[k < meta.arm_names.size() ? meta.arm_names[k] : "arm" + std::to_string(k)] = s.pulls[k];
  j["pulls"] = std::move(pulls);
  j["corpus_bleu"] = s.corpus_bleu ? ordered_json(*s.corpus_bleu) : ordered_json(nullptr);
  j["best_arm"] = s.best_arm < meta.arm_names.size() ? meta.arm_names[s.best_arm] : std::to_string(s.best_arm);
  j["best_arm_mean_raw"] = s.best_arm_mean_raw;
  j["best_arm_average_regret"] = s.best_arm_average_regret;
  j["best_arm_corpus_bleu"] = s.best_arm_corpus_bleu ? ordered_json(*s.best_arm_corpus_bleu) : ordered_json(nullptr);
  j["oracle_mean_raw"] = s.oracle_mean_raw;
  j["oracle_corpus_bleu"] = s.oracle_corpus_bleu ? ordered_json(*s.oracle_corpus_bleu) : ordered_json(nullptr);
  j["run"] = meta_to_json(meta);
  return j.dump(2) + "\n";
}

std::vector<AggregateRow> aggregate_sweep(const std::vector<RunSummary>& summaries) {
  if (summaries.empty()) throw DataError("aggregate_sweep: no runs");
  std::vector<AggregateRow> rows;
  std::map<std::string, std::vector<const RunSummary*>> groups;
  for (const auto& s : summaries) {
    if (!groups.count(s.policy)) rows.push_back({s.policy, 0, {}});
    groups[s.policy].push_back(&s);
  }
  auto stats = [](const std::vector<double>& xs) {
    MetricStats m;
    for (double x : xs) m.mean += x;
    m.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
      double ss = 0.0;
      for (double x : xs) ss += (x - m.mean) * (x - m.mean);
      m.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return m;
  };
  for (auto& row : rows) {
    const auto& g = groups[row.policy];
    row.runs = g.size();
    std::vector<double> regret, feedback, raw, cum;
    std::vector<double> bleu;
    for (const auto* s : g) {
      regret.push_back(s->average_regret);
      cum.push_back(s->cumulative_regret);
      feedback.push_back(s->average_feedback);
      raw.push_back(s->mean_chosen_raw);
      if (s->corpus_bleu) bleu.push_back(*s->corpus_bleu);
    }
    row.metrics["average_regret"] = stats(regret);
    row.metrics["cumulative_regret"] = stats(cum);
    row.metrics["average_feedback"] = stats(feedback);
    row.metrics["mean_chosen_raw"] = stats(raw);
    if (bleu.size() == g.size()) row.metrics["corpus_bleu"] = stats(bleu);
  }
  return rows;
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  static const char* kColumns[] = {"average_regret", "cumulative_regret", "average_feedback", "mean_chosen_raw",
                                   "corpus_bleu"};
  out << "policy,runs";
  for (const char* c : kColumns) out << ',' << c << "_mean," << c << "_std";
  out << '\n';
  for (const auto& row : rows) {
    out << row.policy << ',' << row.runs;
    for (const char* c : kColumns) {
      auto it = row.metrics.find(c);
      if (it == row.metrics.end()) {
        out << ",,";
      } else {
        out << ',' << format_number(it->second.mean) << ',' << format_number(it->second.std);
      }
    }
    out << '\n';
  }
}

}  // namespace mtbandit
