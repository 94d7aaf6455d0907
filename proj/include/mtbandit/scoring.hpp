#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mtbandit/environment.hpp"

namespace mtbandit {

inline constexpr int kBleuMaxOrder = 4;

/// n-gram multisets for n = 1..4, keyed by the space-joined n-gram.
struct NGramCounts {
  std::array<std::unordered_map<std::string, int>, kBleuMaxOrder> orders;

  static NGramCounts from_tokens(const Tokens& tokens);
  /// Number of n-grams of order n (1-based); max(0, len - n + 1).
  int total(int n) const;
};

struct BleuBreakdown {
  std::array<long, kBleuMaxOrder> matched{};
  std::array<long, kBleuMaxOrder> totals{};
  long hyp_length = 0;
  long ref_length = 0;
  double brevity_penalty = 1.0;
  double score = 0.0;
};

/// Clipped n-gram matches of hyp against ref for each order.
std::array<long, kBleuMaxOrder> clipped_matches(const Tokens& hyp, const Tokens& ref);

/// Smoothed BLEU-4 of one sentence: add-one on numerator and denominator for
/// orders >= 2. An empty hypothesis scores 0. Throws DataError on empty ref.
BleuBreakdown sentence_bleu(const Tokens& hyp, const Tokens& ref);

/// Unsmoothed BLEU-4 over aggregated counts and lengths.
BleuBreakdown corpus_bleu(const std::vector<std::pair<Tokens, Tokens>>& pairs);

/// In-memory reward-matrix builder. hyp_lines[k][i] is arm k's output for line i.
/// When source_lines is empty the reference doubles as the source.
std::vector<EvalRecord> build_reward_matrix(const std::vector<std::string>& ref_lines,
                                            const std::vector<std::vector<std::string>>& hyp_lines,
                                            const std::vector<std::string>& source_lines,
                                            const std::string& domain);

struct RewardMatrixFiles {
  std::filesystem::path reference;
  std::vector<std::filesystem::path> hypotheses;  // one per arm, catalog order
  std::filesystem::path source;                   // optional
  std::string domain = "default";
};

/// Arm count is the number of hypothesis files; a single arm is allowed here
/// even though bandit runs need at least two.
std::vector<EvalRecord> build_reward_matrix(const RewardMatrixFiles& files);

std::vector<std::string> read_lines(const std::filesystem::path& path);

}  // namespace mtbandit
