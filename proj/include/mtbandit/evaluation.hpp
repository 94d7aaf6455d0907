#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mtbandit/environment.hpp"
#include "mtbandit/features.hpp"
#include "mtbandit/feedback.hpp"
#include "mtbandit/policies.hpp"

namespace mtbandit {

struct StepTrace {
  std::uint64_t t = 0;
  std::string record_id;
  std::string domain;
  std::size_t arm = 0;
  double feedback = 0.0;
  double raw = 0.0;
  std::size_t oracle_arm = 0;
  double oracle_raw = 0.0;
  double regret = 0.0;
  double regret_cum = 0.0;
};

struct RunMeta {
  std::uint64_t seed = 0;
  std::vector<std::string> arm_names;
  PolicyConfig policy;
  FeedbackConfig feedback;
  SchedulePlan plan;
};

struct RunLog {
  RunMeta meta;
  std::vector<StepTrace> steps;

  std::size_t size() const { return steps.size(); }
  double cumulative_regret() const { return steps.empty() ? 0.0 : steps.back().regret_cum; }
};

struct SimulationSetup {
  SchedulePlan plan;
  PolicyConfig policy;
  FeedbackConfig feedback;
  std::optional<FeatureConfig> features;
  std::uint64_t seed = 0;
  /// Stop after this many steps; the whole stream when empty.
  std::optional<std::size_t> max_steps;
};

/// Observe, featurize, choose, score, feed back, update; once per scheduled
/// record. Regret is measured on raw scores of every arm. Deterministic in
/// setup.seed: schedule, policy and feedback each draw from their own sub-stream.
RunLog run_simulation(const Dataset& dataset, const SimulationSetup& setup);

/// Seed actually used for the schedule of a run.
std::uint64_t schedule_seed(const SchedulePlan& plan, std::uint64_t master_seed);

// One JSON object per step: t, record_id, domain, arm, feedback, raw,
// oracle_arm, oracle_raw, regret_cum.
std::string step_to_line(const StepTrace& step);
StepTrace step_from_line(const std::string& line);
void write_steps(std::ostream& out, const RunLog& log);
/// Reads step lines; meta is left default except arm_names when given.
RunLog read_steps(std::istream& in, std::vector<std::string> arm_names = {});

struct Heatmap {
  std::vector<std::string> arm_names;
  std::size_t interval = 0;
  std::vector<std::uint64_t> column_starts;
  /// cells[arm][column] = share of that interval's steps choosing arm.
  std::vector<std::vector<double>> cells;

  std::size_t columns() const { return column_starts.size(); }
};

Heatmap decision_heatmap(const RunLog& log, std::size_t interval);
void write_heatmap_csv(std::ostream& out, const Heatmap& heatmap);

struct RunSummary {
  std::string policy;
  std::uint64_t seed = 0;
  std::size_t steps = 0;
  double cumulative_regret = 0.0;
  /// BLEU points per step.
  double average_regret = 0.0;
  double average_feedback = 0.0;
  double mean_chosen_raw = 0.0;
  std::vector<std::uint64_t> pulls;
  std::optional<double> corpus_bleu;
  std::size_t best_arm = 0;
  double best_arm_mean_raw = 0.0;
  double oracle_mean_raw = 0.0;
  double best_arm_average_regret = 0.0;
  std::optional<double> best_arm_corpus_bleu;
  std::optional<double> oracle_corpus_bleu;
};

RunSummary summarize(const RunLog& log, const Dataset& dataset);
std::string summary_to_json(const RunSummary& summary, const RunMeta& meta);

struct MetricStats {
  double mean = 0.0;
  double std = 0.0;
};

struct AggregateRow {
  std::string policy;
  std::size_t runs = 0;
  std::map<std::string, MetricStats> metrics;
};

/// Groups by policy label in order of first appearance; sample std (0 for one run).
std::vector<AggregateRow> aggregate_sweep(const std::vector<RunSummary>& summaries);
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);

/// Shortest decimal form that round-trips.
std::string format_number(double value);

}  // namespace mtbandit
