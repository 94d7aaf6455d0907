#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mtbandit/environment.hpp"
#include "mtbandit/evaluation.hpp"
#include "mtbandit/features.hpp"
#include "mtbandit/feedback.hpp"
#include "mtbandit/policies.hpp"
#include "mtbandit/synth.hpp"

namespace mtbandit {

/// Everything one experiment needs. Either dataset or synth is set, never both.
struct ExperimentConfig {
  std::vector<std::string> arms;
  std::optional<std::filesystem::path> dataset;
  std::optional<SynthSpec> synth;
  SchedulePlan plan;
  std::vector<PolicyConfig> policies;
  FeedbackConfig feedback;
  std::optional<FeatureConfig> features;
  std::optional<std::size_t> max_steps;
  std::vector<std::uint64_t> seeds{0};
  std::filesystem::path output_dir = "out";
  std::size_t heatmap_interval = 100;

  /// Loads the dataset file or generates the synthetic one.
  Dataset materialize() const;
  SimulationSetup setup(const PolicyConfig& policy, std::uint64_t seed) const;
};

/// Applies "a.b.c=value" to a JSON document. The value is parsed as JSON when
/// possible and kept as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Relative dataset and vocabulary paths resolve against base_dir.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

SynthSpec parse_synth_spec(const nlohmann::json& section);

}  // namespace mtbandit
