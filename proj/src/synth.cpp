#include "mtbandit/synth.hpp"

#include <algorithm>
#include <random>

#include "mtbandit/error.hpp"
#include "mtbandit/rng.hpp"

namespace mtbandit {

void SynthSpec::validate() const {
  if (arms.empty()) throw ConfigError("synth: no arms");
  if (domains.empty()) throw ConfigError("synth: no domains");
  if (means.size() != arms.size()) throw ConfigError("synth: means needs one row per arm");
  for (const auto& row : means) {
    if (row.size() != domains.size()) throw ConfigError("synth: means needs one column per domain");
    for (double m : row)
      if (!(m >= 0.0 && m <= 100.0)) throw ConfigError("synth: mean " + std::to_string(m) + " outside [0,100]");
  }
  if (!(sigma >= 0.0)) throw ConfigError("synth: sigma must be nonnegative");
  if (records_per_domain == 0) throw ConfigError("synth: records_per_domain must be positive");
  if (min_length == 0 || min_length > max_length) throw ConfigError("synth: need 1 <= min_length <= max_length");
}

std::vector<EvalRecord> generate(const SynthSpec& spec) {
  spec.validate();
  Rng rng(derive_seed(spec.seed, {kSynthStream}));
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> length(spec.min_length, spec.max_length);

  std::vector<EvalRecord> out;
  out.reserve(spec.domains.size() * spec.records_per_domain);
  for (std::size_t d = 0; d < spec.domains.size(); ++d) {
    for (std::size_t i = 0; i < spec.records_per_domain; ++i) {
      EvalRecord r;
      r.id = spec.domains[d] + "-" + std::to_string(i + 1);
      r.domain = spec.domains[d];
      const std::size_t len = length(rng);
      for (std::size_t j = 0; j < len; ++j) r.source_tokens.push_back("w" + std::to_string(j));
      r.arm_scores.reserve(spec.arms.size());
      for (std::size_t k = 0; k < spec.arms.size(); ++k) {
        double s = spec.means[k][d];
        if (spec.sigma > 0.0) s = std::clamp(s + spec.sigma * noise(rng), 0.0, 100.0);
        r.arm_scores.push_back(s);
      }
      if (spec.domain_embedding) {
        std::vector<double> onehot(spec.domains.size(), 0.0);
        onehot[d] = 1.0;
        r.embedding = std::move(onehot);
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

SynthSpec table1_spec(std::size_t records_per_domain, double sigma, std::uint64_t seed) {
  SynthSpec s;
  s.arms = {"nmt-general", "smt-general", "smt-ted",  "nmt-ted",
            "nmt-cont-ted", "smt-wipo",   "nmt-wipo", "nmt-cont-wipo"};
  s.domains = {"general", "ted", "wipo"};
  s.means = {
      {29.4, 34.2, 36.0},  // nmt-general
      {23.9, 30.7, 26.7},  // smt-general
      {16.5, 28.7, 12.0},  // smt-ted
      {16.5, 31.5, 8.4},   // nmt-ted
      {27.5, 39.3, 29.5},  // nmt-cont-ted
      {9.9, 9.7, 51.2},    // smt-wipo
      {6.6, 7.7, 61.9},    // nmt-wipo
      {8.0, 10.0, 62.3},   // nmt-cont-wipo
  };
  s.sigma = sigma;
  s.records_per_domain = records_per_domain;
  s.seed = seed;
  return s;
}

}  // namespace mtbandit
