#include "mtbandit/features.hpp"

#include <algorithm>
#include <fstream>

#include "mtbandit/error.hpp"

namespace mtbandit {

std::string to_string(FeatureBlock block) {
  switch (block) {
    case FeatureBlock::bias: return "bias";
    case FeatureBlock::oov: return "oov";
    case FeatureBlock::len: return "len";
    case FeatureBlock::emb: return "emb";
  }
  return "?";
}

FeatureBlock feature_block_from_string(const std::string& text) {
  if (text == "bias") return FeatureBlock::bias;
  if (text == "oov") return FeatureBlock::oov;
  if (text == "len") return FeatureBlock::len;
  if (text == "emb") return FeatureBlock::emb;
  throw ConfigError("unknown feature block '" + text + "'");
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vocabulary '" + path.string() + "'");
  Vocabulary v;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) v.insert(line);
  }
  return v;
}

bool FeatureConfig::enabled(FeatureBlock block) const {
  return std::find(blocks.begin(), blocks.end(), block) != blocks.end();
}

void FeatureConfig::validate() const {
  if (blocks.empty()) throw ConfigError("feature config enables no blocks");
  if (enabled(FeatureBlock::oov) && !vocab) throw ConfigError("oov feature requires a vocabulary");
  if (!(oov_threshold >= 0.0 && oov_threshold <= 1.0)) throw ConfigError("oov_threshold must lie in [0,1]");
  if (enabled(FeatureBlock::len)) {
    if (len_bin_edges.empty()) throw ConfigError("len feature requires at least one bin edge");
    for (std::size_t i = 0; i < len_bin_edges.size(); ++i) {
      if (len_bin_edges[i] == 0) throw ConfigError("length bin edges must be positive");
      if (i && len_bin_edges[i] <= len_bin_edges[i - 1]) throw ConfigError("length bin edges must ascend");
    }
  }
  if (enabled(FeatureBlock::emb) && emb_prefix_len == 0) throw ConfigError("emb_prefix_len must be positive");
}

std::vector<BlockRange> feature_layout(const FeatureConfig& config) {
  std::vector<BlockRange> layout;
  std::size_t offset = 0;
  auto add = [&](FeatureBlock b, std::size_t width) {
    if (!config.enabled(b)) return;
    layout.push_back({to_string(b), offset, width});
    offset += width;
  };
  add(FeatureBlock::bias, 1);
  add(FeatureBlock::oov, 1);
  add(FeatureBlock::len, config.len_bin_edges.size() + 1);
  add(FeatureBlock::emb, config.emb_prefix_len);
  return layout;
}

double oov_rate(const Tokens& tokens, const Vocabulary& vocab) {
  if (tokens.empty()) throw DataError("oov_rate: empty token list");
  std::size_t missing = 0;
  for (const auto& t : tokens)
    if (!vocab.count(t)) ++missing;
  return static_cast<double>(missing) / static_cast<double>(tokens.size());
}

std::size_t length_bin(std::size_t length, const std::vector<std::size_t>& edges) {
  auto it = std::lower_bound(edges.begin(), edges.end(), length);
  return static_cast<std::size_t>(it - edges.begin());
}

FeatureVector featurize(const EvalRecord& record, const FeatureConfig& config) {
  FeatureVector fv;
  fv.layout = feature_layout(config);
  std::size_t width = 0;
  for (const auto& b : fv.layout) width += b.width;
  fv.values.assign(width, 0.0);

  for (const auto& block : fv.layout) {
    double* out = fv.values.data() + block.offset;
    switch (feature_block_from_string(block.name)) {
      case FeatureBlock::bias:
        out[0] = 1.0;
        break;
      case FeatureBlock::oov:
        if (!config.vocab) throw ConfigError("oov feature requires a vocabulary");
        out[0] = oov_rate(record.source_tokens, *config.vocab) > config.oov_threshold ? 1.0 : 0.0;
        break;
      case FeatureBlock::len:
        out[length_bin(record.source_tokens.size(), config.len_bin_edges)] = 1.0;
        break;
      case FeatureBlock::emb: {
        if (!record.embedding) throw DataError("record '" + record.id + "' has no embedding");
        const auto& e = *record.embedding;
        if (e.size() < block.width)
          throw DataError("record '" + record.id + "' embedding has " + std::to_string(e.size()) +
                          " dims, need " + std::to_string(block.width));
        std::copy_n(e.begin(), block.width, out);
        break;
      }
    }
  }
  return fv;
}

}  // namespace mtbandit
