#include "mtbandit/commands.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <ostream>
#include <thread>

#include "CLI11.hpp"
#include "mtbandit/error.hpp"
#include "mtbandit/scoring.hpp"

namespace mtbandit {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

void cmd_score(const ScoreOptions& options, std::ostream& out) {
  if (options.hypotheses.empty()) throw ConfigError("score needs at least one --hyp file");
  if (!options.arm_names.empty() && options.arm_names.size() != options.hypotheses.size())
    throw ConfigError("got " + std::to_string(options.arm_names.size()) + " arm names for " +
                      std::to_string(options.hypotheses.size()) + " hypothesis files");
  for (const auto& p : options.hypotheses)
    if (!fs::exists(p)) throw DataError("no such file '" + p.string() + "'");
  if (!fs::exists(options.reference)) throw DataError("no such file '" + options.reference.string() + "'");

  RewardMatrixFiles files;
  files.reference = options.reference;
  files.hypotheses = options.hypotheses;
  files.source = options.source;
  files.domain = options.domain;
  const auto records = build_reward_matrix(files);

  auto stream = open_out(options.output);
  write_dataset(stream, records);
  std::vector<std::string> names = options.arm_names;
  if (names.empty())
    for (const auto& p : options.hypotheses) names.push_back(p.stem().string());
  out << "wrote " << records.size() << " records to " << options.output.string() << "\narms:";
  for (const auto& n : names) out << ' ' << n;
  out << '\n';
}

void cmd_synth(const SynthOptions& options, std::ostream& out) {
  SynthSpec spec;
  if (options.config) {
    auto config = load_config(*options.config);
    if (!config.synth) throw ConfigError("config '" + options.config->string() + "' has no 'synth' section");
    spec = *config.synth;
  } else if (options.preset == "table1") {
    spec = table1_spec(options.records_per_domain, options.sigma, options.seed);
  } else {
    throw ConfigError("unknown preset '" + options.preset + "'");
  }
  const auto records = generate(spec);
  auto stream = open_out(options.output);
  write_dataset(stream, records);
  out << "wrote " << records.size() << " records to " << options.output.string() << "\narms:";
  for (const auto& n : spec.arms) out << ' ' << n;
  out << '\n';
}

RunSummary write_run_outputs(const RunLog& log, const Dataset& dataset, std::size_t heatmap_interval,
                             const fs::path& dir) {
  fs::create_directories(dir);
  {
    auto s = open_out(dir / "run.log.jsonl");
    write_steps(s, log);
  }
  auto summary = summarize(log, dataset);
  {
    auto s = open_out(dir / "summary.json");
    s << summary_to_json(summary, log.meta);
  }
  {
    auto s = open_out(dir / "heatmap.csv");
    write_heatmap_csv(s, decision_heatmap(log, heatmap_interval));
  }
  return summary;
}

namespace {

void print_summary(std::ostream& out, const RunSummary& s) {
  out << s.policy << " seed=" << s.seed << " steps=" << s.steps << " avg_regret=" << format_number(s.average_regret)
      << " avg_feedback=" << format_number(s.average_feedback)
      << " best_arm_avg_regret=" << format_number(s.best_arm_average_regret);
  if (s.corpus_bleu) out << " corpus_bleu=" << format_number(*s.corpus_bleu);
  out << '\n';
}

}  // namespace

void cmd_run(const ExperimentConfig& config, std::ostream& out) {
  const auto dataset = config.materialize();
  const auto log = run_simulation(dataset, config.setup(config.policies.front(), config.seeds.front()));
  const auto summary = write_run_outputs(log, dataset, config.heatmap_interval, config.output_dir);
  print_summary(out, summary);
}

void cmd_sweep(const ExperimentConfig& config, std::ostream& out, unsigned threads) {
  const auto dataset = config.materialize();
  struct Job {
    const PolicyConfig* policy;
    std::size_t index;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& p : config.policies)
    for (std::size_t i = 0; i < config.seeds.size(); ++i) jobs.push_back({&p, i, config.seeds[i]});

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<RunLog> logs(jobs.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> workers;
  for (unsigned w = 0; w < std::min<std::size_t>(threads, jobs.size()); ++w) {
    workers.push_back(std::async(std::launch::async, [&] {
      for (std::size_t j = next++; j < jobs.size(); j = next++)
        logs[j] = run_simulation(dataset, config.setup(*jobs[j].policy, jobs[j].seed));
    }));
  }
  for (auto& w : workers) w.get();

  std::vector<RunSummary> summaries;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const auto dir = config.output_dir / jobs[j].policy->display_name() /
                     ("run-" + std::to_string(jobs[j].index + 1) + "-seed-" + std::to_string(jobs[j].seed));
    summaries.push_back(write_run_outputs(logs[j], dataset, config.heatmap_interval, dir));
    print_summary(out, summaries.back());
  }
  const auto rows = aggregate_sweep(summaries);
  auto s = open_out(config.output_dir / "aggregate.csv");
  write_aggregate_csv(s, rows);
  write_aggregate_csv(out, rows);
}

void cmd_report(const ReportOptions& options, std::ostream& out) {
  if (options.logs.empty()) throw ConfigError("report needs at least one --log");
  std::vector<RunLog> logs;
  for (const auto& p : options.logs) {
    std::ifstream in(p);
    if (!in) throw DataError("cannot open log '" + p.string() + "'");
    try {
      logs.push_back(read_steps(in, options.arm_names));
    } catch (const DataError& e) {
      throw DataError(p.string() + ": " + e.what());
    }
    if (logs.back().steps.empty()) throw DataError(p.string() + ": empty log");
  }

  std::size_t longest = 0;
  for (const auto& l : logs) longest = std::max(longest, l.size());
  {
    auto s = open_out(options.output_dir / "regret_curve.csv");
    s << 't';
    for (const auto& p : options.logs) s << ',' << p.string();
    s << '\n';
    for (std::size_t t = 0; t < longest; ++t) {
      s << t + 1;
      for (const auto& l : logs) {
        s << ',';
        if (t < l.size()) s << format_number(l.steps[t].regret_cum);
      }
      s << '\n';
    }
  }
  for (std::size_t i = 0; i < logs.size(); ++i) {
    auto s = open_out(options.output_dir / ("heatmap-" + std::to_string(i + 1) + ".csv"));
    write_heatmap_csv(s, decision_heatmap(logs[i], options.interval));
    out << options.logs[i].string() << ": steps=" << logs[i].size()
        << " cumulative_regret=" << format_number(logs[i].cumulative_regret()) << '\n';
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bandit selection among translation systems with simulated feedback"};
  app.require_subcommand(1);

  ScoreOptions score;
  auto* score_cmd = app.add_subcommand("score", "Build a reward-matrix dataset from reference and hypothesis files");
  score_cmd->add_option("--ref", score.reference, "Reference file, one tokenized sentence per line")->required();
  score_cmd->add_option("--hyp", score.hypotheses, "Hypothesis file per arm, in arm order")->required();
  score_cmd->add_option("--arm", score.arm_names, "Arm name per --hyp (default: file stem)");
  score_cmd->add_option("--src", score.source, "Source file (default: reference doubles as source)");
  score_cmd->add_option("--domain", score.domain, "Domain label for every record");
  score_cmd->add_option("--out", score.output, "Output dataset (JSON lines)")->required();

  SynthOptions synth;
  std::string synth_config;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic multi-domain dataset");
  synth_cmd->add_option("--config", synth_config, "Experiment config whose 'synth' section is used");
  synth_cmd->add_option("--preset", synth.preset, "Built-in score table")->capture_default_str();
  synth_cmd->add_option("--records", synth.records_per_domain, "Records per domain")->capture_default_str();
  synth_cmd->add_option("--sigma", synth.sigma, "Per-record score noise (BLEU points)")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();
  synth_cmd->add_option("--out", synth.output, "Output dataset (JSON lines)")->required();

  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::vector<std::uint64_t> seeds;
  std::string out_dir;
  unsigned threads = 0;

  auto* run_cmd = app.add_subcommand("run", "Run one policy for one seed");
  run_cmd->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run_cmd->add_option("--set", overrides, "Override a config key, e.g. --set policy.kind=ucb1");
  run_cmd->add_option("--seed", seed, "Master seed (default: first of config seeds)");
  run_cmd->add_option("--out", out_dir, "Output directory (default: config output_dir)");

  auto* sweep_cmd = app.add_subcommand("sweep", "Run every configured policy for every seed");
  sweep_cmd->add_option("--config", config_path, "Experiment config (JSON)")->required();
  sweep_cmd->add_option("--set", overrides, "Override a config key");
  sweep_cmd->add_option("--seeds", seeds, "Seed list (default: config seeds)")->delimiter(',');
  sweep_cmd->add_option("--out", out_dir, "Output directory (default: config output_dir)");
  sweep_cmd->add_option("--threads", threads, "Worker threads (default: hardware concurrency)");

  ReportOptions report;
  auto* report_cmd = app.add_subcommand("report", "Regret curves and decision heatmaps from run logs");
  report_cmd->add_option("--log", report.logs, "Run log (JSON lines); repeatable")->required();
  report_cmd->add_option("--interval", report.interval, "Heatmap interval in steps")->capture_default_str();
  report_cmd->add_option("--arms", report.arm_names, "Arm names in index order")->delimiter(',');
  report_cmd->add_option("--out", report.output_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    auto load = [&] {
      auto config = load_config(config_path, overrides);
      if (seed) config.seeds = {*seed};
      if (!seeds.empty()) config.seeds = seeds;
      if (!out_dir.empty()) config.output_dir = out_dir;
      return config;
    };
    if (*score_cmd) {
      cmd_score(score, out);
    } else if (*synth_cmd) {
      if (!synth_config.empty()) synth.config = synth_config;
      cmd_synth(synth, out);
    } else if (*run_cmd) {
      cmd_run(load(), out);
    } else if (*sweep_cmd) {
      cmd_sweep(load(), out, threads);
    } else if (*report_cmd) {
      if (report.interval == 0) throw ConfigError("--interval must be positive");
      cmd_report(report, out);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace mtbandit
