#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "mtbandit/environment.hpp"

namespace mtbandit {

enum class FeatureBlock { bias, oov, len, emb };

std::string to_string(FeatureBlock block);
FeatureBlock feature_block_from_string(const std::string& text);

using Vocabulary = std::unordered_set<std::string>;

/// One token per line.
Vocabulary load_vocabulary(const std::filesystem::path& path);

struct FeatureConfig {
  std::vector<FeatureBlock> blocks{FeatureBlock::bias};
  std::optional<Vocabulary> vocab;
  double oov_threshold = 0.1;
  /// Upper edges of the length bins; one overflow bin follows the last edge.
  std::vector<std::size_t> len_bin_edges{5, 10, 15, 20};
  std::size_t emb_prefix_len = 50;

  bool enabled(FeatureBlock block) const;
  /// Throws ConfigError on a config that can never featurize a record.
  void validate() const;
};

struct BlockRange {
  std::string name;
  std::size_t offset = 0;
  std::size_t width = 0;
};

struct FeatureVector {
  std::vector<double> values;
  std::vector<BlockRange> layout;

  std::size_t size() const { return values.size(); }
};

/// Block layout in the fixed order bias, oov, len, emb.
std::vector<BlockRange> feature_layout(const FeatureConfig& config);

double oov_rate(const Tokens& tokens, const Vocabulary& vocab);

/// Zero-based bin of a token count; counts past the last edge land in the overflow bin.
std::size_t length_bin(std::size_t length, const std::vector<std::size_t>& edges);

FeatureVector featurize(const EvalRecord& record, const FeatureConfig& config);

}  // namespace mtbandit
