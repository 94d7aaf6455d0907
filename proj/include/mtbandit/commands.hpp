#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mtbandit/config.hpp"

namespace mtbandit {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

struct ScoreOptions {
  std::filesystem::path reference;
  std::vector<std::filesystem::path> hypotheses;
  std::vector<std::string> arm_names;  // defaults to hypothesis file stems
  std::filesystem::path source;
  std::string domain = "default";
  std::filesystem::path output;
};

struct SynthOptions {
  std::optional<std::filesystem::path> config;
  std::string preset = "table1";
  std::size_t records_per_domain = 100;
  double sigma = 5.0;
  std::uint64_t seed = 0;
  std::filesystem::path output;
};

struct ReportOptions {
  std::vector<std::filesystem::path> logs;
  std::size_t interval = 100;
  std::vector<std::string> arm_names;
  std::filesystem::path output_dir;
};

// These throw DataError / ConfigError; run_cli maps them to exit codes.
void cmd_score(const ScoreOptions& options, std::ostream& out);
void cmd_synth(const SynthOptions& options, std::ostream& out);
/// Runs the first configured policy with the first seed.
void cmd_run(const ExperimentConfig& config, std::ostream& out);
/// Every policy crossed with every seed; seeds run in parallel.
void cmd_sweep(const ExperimentConfig& config, std::ostream& out, unsigned threads = 0);
void cmd_report(const ReportOptions& options, std::ostream& out);

/// Writes run.log.jsonl, summary.json and heatmap.csv into dir.
RunSummary write_run_outputs(const RunLog& log, const Dataset& dataset, std::size_t heatmap_interval,
                             const std::filesystem::path& dir);

/// Parses argv and dispatches; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mtbandit
