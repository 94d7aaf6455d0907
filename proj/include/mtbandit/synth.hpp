#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mtbandit/environment.hpp"

namespace mtbandit {

/// Score model for a synthetic multi-domain dataset.
struct SynthSpec {
  std::vector<std::string> arms;
  std::vector<std::string> domains;
  /// means[arm][domain], 0-100 scale.
  std::vector<std::vector<double>> means;
  double sigma = 0.0;
  std::size_t records_per_domain = 100;
  std::uint64_t seed = 0;
  std::size_t min_length = 3;
  std::size_t max_length = 30;
  /// Attach a one-hot domain indicator as the record embedding.
  bool domain_embedding = true;

  void validate() const;
};

/// Records are grouped by domain in the order listed; scores are clipped Gaussians
/// around the per-(arm, domain) mean.
std::vector<EvalRecord> generate(const SynthSpec& spec);

/// Eight arms by three domains (GENERAL, TED, WIPO) with the per-domain
/// BLEU of the German-English systems used for the mixed-domain experiments.
SynthSpec table1_spec(std::size_t records_per_domain, double sigma, std::uint64_t seed);

}  // namespace mtbandit
