#include "mtbandit/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "mtbandit/error.hpp"

namespace mtbandit {

NGramCounts NGramCounts::from_tokens(const Tokens& tokens) {
  NGramCounts c;
  for (int n = 1; n <= kBleuMaxOrder; ++n) {
    auto& m = c.orders[n - 1];
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      std::string key = tokens[i];
      for (int j = 1; j < n; ++j) {
        key += ' ';
        key += tokens[i + j];
      }
      ++m[key];
    }
  }
  return c;
}

int NGramCounts::total(int n) const {
  int t = 0;
  for (const auto& [_, count] : orders[n - 1]) t += count;
  return t;
}

std::array<long, kBleuMaxOrder> clipped_matches(const Tokens& hyp, const Tokens& ref) {
  const auto h = NGramCounts::from_tokens(hyp);
  const auto r = NGramCounts::from_tokens(ref);
  std::array<long, kBleuMaxOrder> matched{};
  for (int n = 0; n < kBleuMaxOrder; ++n) {
    for (const auto& [gram, count] : h.orders[n]) {
      auto it = r.orders[n].find(gram);
      if (it != r.orders[n].end()) matched[n] += std::min(count, it->second);
    }
  }
  return matched;
}

namespace {

long ngram_total(long length, int n) { return std::max(0L, length - n + 1); }

double brevity_penalty(long hyp_length, long ref_length) {
  if (hyp_length <= 0) return 0.0;
  if (hyp_length >= ref_length) return 1.0;
  return std::exp(1.0 - static_cast<double>(ref_length) / static_cast<double>(hyp_length));
}

// smoothed: add one to matched and total for orders >= 2.
double combine(BleuBreakdown& b, bool smoothed) {
  b.brevity_penalty = brevity_penalty(b.hyp_length, b.ref_length);
  if (b.hyp_length == 0) return 0.0;
  double log_sum = 0.0;
  for (int n = 0; n < kBleuMaxOrder; ++n) {
    double m = static_cast<double>(b.matched[n]);
    double t = static_cast<double>(b.totals[n]);
    if (smoothed && n >= 1) {
      m += 1.0;
      t += 1.0;
    }
    if (m <= 0.0 || t <= 0.0) return 0.0;
    log_sum += std::log(m / t);
  }
  return 100.0 * b.brevity_penalty * std::exp(log_sum / kBleuMaxOrder);
}

}  // namespace

BleuBreakdown sentence_bleu(const Tokens& hyp, const Tokens& ref) {
  if (ref.empty()) throw DataError("sentence_bleu: empty reference");
  BleuBreakdown b;
  b.hyp_length = static_cast<long>(hyp.size());
  b.ref_length = static_cast<long>(ref.size());
  b.matched = clipped_matches(hyp, ref);
  for (int n = 0; n < kBleuMaxOrder; ++n) b.totals[n] = ngram_total(b.hyp_length, n + 1);
  b.score = combine(b, true);
  return b;
}

BleuBreakdown corpus_bleu(const std::vector<std::pair<Tokens, Tokens>>& pairs) {
  if (pairs.empty()) throw DataError("corpus_bleu: empty corpus");
  BleuBreakdown b;
  for (const auto& [hyp, ref] : pairs) {
    if (ref.empty()) throw DataError("corpus_bleu: empty reference");
    auto m = clipped_matches(hyp, ref);
    for (int n = 0; n < kBleuMaxOrder; ++n) {
      b.matched[n] += m[n];
      b.totals[n] += ngram_total(static_cast<long>(hyp.size()), n + 1);
    }
    b.hyp_length += static_cast<long>(hyp.size());
    b.ref_length += static_cast<long>(ref.size());
  }
  b.score = combine(b, false);
  return b;
}

std::vector<EvalRecord> build_reward_matrix(const std::vector<std::string>& ref_lines,
                                            const std::vector<std::vector<std::string>>& hyp_lines,
                                            const std::vector<std::string>& source_lines,
                                            const std::string& domain) {
  if (hyp_lines.empty()) throw DataError("build_reward_matrix: no hypothesis sets");
  for (std::size_t k = 0; k < hyp_lines.size(); ++k)
    if (hyp_lines[k].size() != ref_lines.size())
      throw DataError("hypothesis set " + std::to_string(k) + " has " + std::to_string(hyp_lines[k].size()) +
                      " lines but reference has " + std::to_string(ref_lines.size()));
  if (!source_lines.empty() && source_lines.size() != ref_lines.size())
    throw DataError("source has " + std::to_string(source_lines.size()) + " lines but reference has " +
                    std::to_string(ref_lines.size()));

  std::vector<EvalRecord> out;
  out.reserve(ref_lines.size());
  for (std::size_t i = 0; i < ref_lines.size(); ++i) {
    EvalRecord r;
    r.id = domain + "-" + std::to_string(i + 1);
    r.domain = domain;
    auto ref = split_tokens(ref_lines[i]);
    if (ref.empty()) throw DataError("reference line " + std::to_string(i + 1) + " is empty");
    r.source_tokens = source_lines.empty() ? ref : split_tokens(source_lines[i]);
    if (r.source_tokens.empty()) throw DataError("source line " + std::to_string(i + 1) + " is empty");
    std::vector<Tokens> hyps;
    for (const auto& arm : hyp_lines) {
      hyps.push_back(split_tokens(arm[i]));
      r.arm_scores.push_back(sentence_bleu(hyps.back(), ref).score);
    }
    r.reference_tokens = std::move(ref);
    r.arm_hypotheses = std::move(hyps);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

std::vector<EvalRecord> build_reward_matrix(const RewardMatrixFiles& files) {
  auto refs = read_lines(files.reference);
  std::vector<std::vector<std::string>> hyps;
  for (const auto& p : files.hypotheses) {
    hyps.push_back(read_lines(p));
    if (hyps.back().size() != refs.size())
      throw DataError("line-count mismatch: '" + p.string() + "' has " + std::to_string(hyps.back().size()) +
                      " lines, reference '" + files.reference.string() + "' has " + std::to_string(refs.size()));
  }
  std::vector<std::string> src;
  if (!files.source.empty()) {
    src = read_lines(files.source);
    if (src.size() != refs.size())
      throw DataError("line-count mismatch: '" + files.source.string() + "' has " + std::to_string(src.size()) +
                      " lines, reference '" + files.reference.string() + "' has " + std::to_string(refs.size()));
  }
  return build_reward_matrix(refs, hyps, src, files.domain);
}

}  // namespace mtbandit
